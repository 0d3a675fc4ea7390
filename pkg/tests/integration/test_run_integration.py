"""Integration tests for end-to-end experiment runs."""

from collections.abc import Callable
from pathlib import Path

import pytest
from qredist_sdk import ExperimentRunner, Method, RunSummary, load_run_config
from qredist_sdk.reports import write_run

pytestmark = pytest.mark.integration


def _run(out_dir: Path, **overrides: object) -> list[Path]:
    cfg = load_run_config(out_dir=out_dir, **overrides)
    return write_run(ExperimentRunner(cfg).run(), cfg.out_dir)


def test_same_seed_same_bytes(tmp_path: Path) -> None:
    """Test two runs with one seed give byte-identical records, summary and plots."""
    settings = {
        "d": 2,
        "n_states": 4,
        "seed": 42,
        "methods": "exhaustive,rgnp,adam",
        "adam_max_iters": 200,
        "adam_restarts": 2,
    }
    first = _run(tmp_path / "a", **settings)
    second = _run(tmp_path / "b", **settings)

    for a, b in zip(first, second, strict=True):
        if a.name == "timings.csv":
            continue
        assert a.read_bytes() == b.read_bytes(), a.name


def test_different_seed_differs(tmp_path: Path) -> None:
    """Test changing the seed changes the records."""
    first = _run(tmp_path / "a", d=2, n_states=2, seed=0, methods="rgnp")
    second = _run(tmp_path / "b", d=2, n_states=2, seed=1, methods="rgnp")

    assert first[0].read_bytes() != second[0].read_bytes()


@pytest.mark.slow
def test_two_qubit_adam_agreement() -> None:
    """Test Adam matches the two-qubit closed form on a seeded ensemble."""
    cfg = load_run_config(d=2, n_states=100, methods="closed_form_d2,adam", adam_max_iters=3000)
    summary = ExperimentRunner(cfg).run()

    stats = summary.relative_error[Method.CLOSED_FORM_D2]
    assert stats.mean_abs is not None and stats.mean_abs <= 1e-5
    assert stats.max is not None and stats.max <= 1e-3


@pytest.mark.slow
@pytest.mark.parametrize(
    ("d", "low", "high"),
    [(3, -0.01, 0.03), (4, -0.01, 0.01), (5, -0.01, 0.01), (6, -0.01, 0.01)],
)
def test_rgnp_against_adam(d: int, low: float, high: float) -> None:
    """Test the mean rgnp relative error against Adam over 100 states stays in band."""
    cfg = load_run_config(d=d, n_states=100, methods="rgnp,adam", workers=4)
    summary = ExperimentRunner(cfg).run()

    for record in summary.records:
        assert record.delta_s[Method.RGNP] <= record.s_c + 1e-9
    stats = summary.relative_error[Method.RGNP]
    assert stats.mean is not None and low <= stats.mean <= high


@pytest.mark.slow
def test_rgnp_against_adam_d8(record_property: Callable[[str, object], None]) -> None:
    """Test rgnp stays below S_C for two 8-level systems and report its mean relative error."""
    cfg = load_run_config(d=8, n_states=100, methods="rgnp,adam", adam_restarts=1, workers=4)
    summary = ExperimentRunner(cfg).run()

    for record in summary.records:
        assert record.delta_s[Method.RGNP] <= record.s_c + 1e-9
    record_property("rgnp_mean_relative_error_d8", summary.relative_error[Method.RGNP].mean)


@pytest.mark.slow
def test_literal_two_step_lags_at_d3() -> None:
    """Test the bare two-step layout trails the refined one on the qutrit ensemble."""
    base = {"d": 3, "n_states": 20, "methods": "rgnp,exhaustive"}
    refined = ExperimentRunner(load_run_config(**base)).run()
    literal = ExperimentRunner(load_run_config(**base, rgnp_refine=False)).run()

    def mean_gap(summary: RunSummary) -> float:
        gaps = [
            (r.delta_s[Method.EXHAUSTIVE] - r.delta_s[Method.RGNP]) / r.delta_s[Method.EXHAUSTIVE]
            for r in summary.records
        ]
        return sum(gaps) / len(gaps)

    assert mean_gap(refined) <= 0.01
    assert mean_gap(literal) > mean_gap(refined)

