"""Pytest configuration and shared fixtures."""

import os
from collections.abc import Iterator

import numpy as np
import pytest
from qredist_sdk.config import set_numeric_config


def pytest_configure(config: pytest.Config) -> None:
    """Configure custom pytest markers."""
    config.addinivalue_line("markers", "integration: mark test as integration test")
    config.addinivalue_line("markers", "contract: mark test as contract test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


@pytest.fixture(autouse=True)
def fresh_numeric_config(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """Start every test from default tolerances, ignoring QREDIST_* variables."""
    for name in list(os.environ):
        if name.startswith("QREDIST_"):
            monkeypatch.delenv(name)
    set_numeric_config(None)
    yield
    set_numeric_config(None)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for randomized properties."""
    return np.random.default_rng(1234)
