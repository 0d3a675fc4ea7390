"""Configuration management for qredist SDK."""

import logging
from pathlib import Path
from typing import Annotated, Any, Literal

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict

from qredist_sdk.exceptions import ConfigInvalidError
from qredist_sdk.models import Method

logger = logging.getLogger(__name__)

GradientKind = Literal["analytic", "numeric"]
StopRule = Literal["patience", "threshold"]


class NumericConfig(BaseSettings):
    """Numerical tolerances shared by every module.

    All settings can be provided via environment variables with QREDIST_ prefix.
    Example: QREDIST_HERMITIAN_TOL=1e-9
    """

    model_config = SettingsConfigDict(
        env_prefix="QREDIST_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Relative to max(1, ||a||_F)
    hermitian_tol: float = Field(1e-10, gt=0)
    unitary_tol: float = Field(1e-9, gt=0)

    # Eigenvalues at or below this are dropped from entropies
    zero_eigenvalue: float = Field(1e-12, ge=0)
    rank_eps: float = Field(1e-10, ge=0)

    normalization_tol: float = Field(1e-12, gt=0)
    trace_tol: float = Field(1e-10, gt=0)
    positivity_tol: float = Field(1e-10, ge=0)


_numeric_config: NumericConfig | None = None


def get_numeric_config() -> NumericConfig:
    """Return the process-wide numeric configuration, loading it on first use."""
    global _numeric_config
    if _numeric_config is None:
        _numeric_config = NumericConfig()
    return _numeric_config


def set_numeric_config(config: NumericConfig | None) -> None:
    """Replace the process-wide numeric configuration.

    Args:
        config: New configuration, or None to reload from the environment on next use.
    """
    global _numeric_config
    _numeric_config = config


class SuiteScale(BaseSettings):
    """Sample counts of the randomized verification suites.

    Defaults are the full reference sizes; :meth:`quick` gives a reduced set
    for fast test runs. Each count can be set via environment variables with
    QREDIST_VERIFY_ prefix.
    Example: QREDIST_VERIFY_NPP_INSTANCES=200
    """

    model_config = SettingsConfigDict(
        env_prefix="QREDIST_VERIFY_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        frozen=True,
    )

    layout_spectra: int = Field(1000, ge=1, description="Random 2x2 spectra vs the coset scan")
    rank_limited_states: int = Field(100, ge=1, description="States per (d_A, d_B, d_C) triple")
    unreachable_states: int = Field(50, ge=1, description="States with rank(rho_C) > d_A")
    unreachable_unitaries: int = Field(1000, ge=1, description="Random unitaries per state")
    coset_trials: int = Field(100, ge=1, description="Random 3x3 layouts relabeled")
    curvature_d2_spectra: int = Field(100, ge=1, description="Two-qubit local-max checks")
    curvature_d3_spectra: int = Field(20, ge=1, description="Two-qutrit local-max checks")
    npp_instances: int = Field(1000, ge=1, description="Greedy vs brute-force instances")
    identity_states: int = Field(100, ge=1, description="States for the entropy identities")

    @classmethod
    def quick(cls) -> "SuiteScale":
        """Reduced counts for smoke runs."""
        return cls(
            layout_spectra=100,
            rank_limited_states=5,
            unreachable_states=3,
            unreachable_unitaries=200,
            coset_trials=20,
            curvature_d2_spectra=10,
            curvature_d3_spectra=3,
            npp_instances=200,
            identity_states=20,
        )


class AdamConfig(BaseModel):
    """Hyperparameters of the Adam ascent on the entropy difference."""

    model_config = ConfigDict(frozen=True)

    learning_rate: float = Field(0.01, gt=0, description="Initial step size")
    beta1: float = Field(0.9, ge=0, lt=1, description="First-moment decay")
    beta2: float = Field(0.999, ge=0, lt=1, description="Second-moment decay")
    epsilon: float = Field(1e-8, gt=0, description="Denominator guard")
    lr_decay: float = Field(0.999, gt=0, le=1, description="Per-iteration learning-rate factor")
    max_iters: int = Field(5000, ge=1, description="Iteration cap per restart")
    tol: float = Field(1e-8, gt=0, description="Successive-objective change threshold")
    patience: int = Field(10, ge=1, description="Consecutive sub-tol steps to converge")
    restarts: int = Field(5, ge=1, description="Independent restarts; restart 0 is a cold start")
    init_scale: float = Field(0.1, ge=0, description="Std-dev of random restart parameters")
    seed: int = Field(0, ge=0, description="Base seed; restart i uses seed + i")
    gradient: GradientKind = Field("analytic", description="Gradient evaluation strategy")
    gradient_step: float = Field(1e-5, gt=0, description="Central-difference step")
    stop_rule: StopRule = Field(
        "patience",
        description=(
            "patience: lr decay and `patience` sub-tol steps; "
            "threshold: constant lr, stop at the first sub-tol step"
        ),
    )


class RunConfig(BaseSettings):
    """Configuration of one experiment run.

    Values come from CLI flags, a key=value config file, QREDIST_* environment
    variables and defaults, in that order of precedence.
    """

    model_config = SettingsConfigDict(
        env_prefix="QREDIST_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Ensemble
    d_a: int = Field(2, ge=1)
    d_b: int = Field(2, ge=1)
    d_c: int | None = Field(None, ge=1, description="Defaults to d_a * d_b")
    rank_c: int | None = Field(None, ge=1, description="Prescribed rank of rho_C")
    n_states: int = Field(100, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)

    methods: Annotated[list[Method], NoDecode] = Field(
        default_factory=lambda: [Method.RGNP, Method.ADAM]
    )

    # Adam overrides
    adam_lr: float = Field(0.01, gt=0)
    adam_lr_decay: float = Field(0.999, gt=0, le=1)
    adam_max_iters: int = Field(5000, ge=1)
    adam_restarts: int = Field(5, ge=1)
    adam_gradient: GradientKind = "analytic"
    adam_stop_rule: StopRule = "patience"

    # Polish the rgnp layout with cell moves; false gives the bare two-step layout
    rgnp_refine: bool = True

    # Output
    out_dir: Path = Path("runs/latest")
    workers: int = Field(1, ge=1)

    @field_validator("methods", mode="before")
    @classmethod
    def _split_methods(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [part.strip() for part in value.split(",") if part.strip()]
        return value

    @model_validator(mode="after")
    def _default_d_c(self) -> "RunConfig":
        if self.d_c is None:
            self.d_c = self.d_a * self.d_b
        return self

    @property
    def dims(self) -> tuple[int, int, int]:
        """(d_A, d_B, d_C) of the generated ensemble."""
        assert self.d_c is not None
        return (self.d_a, self.d_b, self.d_c)

    def adam_config(self) -> AdamConfig:
        """Build the Adam hyperparameters; restart seeds derive from the run seed."""
        return AdamConfig(
            learning_rate=self.adam_lr,
            lr_decay=self.adam_lr_decay,
            max_iters=self.adam_max_iters,
            restarts=self.adam_restarts,
            gradient=self.adam_gradient,
            stop_rule=self.adam_stop_rule,
            seed=self.seed,
        )

    def check_methods(self) -> None:
        """Reject methods that cannot run at the configured dimensions.

        Raises:
            ConfigInvalidError: If a requested method is not defined for these dims
        """
        if not self.methods:
            raise ConfigInvalidError("At least one method must be requested")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigInvalidError("Duplicate methods requested")
        if Method.EXHAUSTIVE in self.methods and self.d_a * self.d_b > 9:
            raise ConfigInvalidError(
                f"exhaustive search needs d_a*d_b <= 9, got {self.d_a}x{self.d_b}"
            )
        if Method.CLOSED_FORM_D2 in self.methods and (self.d_a, self.d_b) != (2, 2):
            raise ConfigInvalidError("closed_form_d2 needs d_a = d_b = 2")
        if self.rank_c is not None and self.d_c is not None and self.rank_c > self.d_c:
            raise ConfigInvalidError(f"rank_c={self.rank_c} exceeds d_c={self.d_c}")


def load_run_config(config_file: Path | None = None, **overrides: Any) -> RunConfig:
    """Build a RunConfig from an optional key=value file plus explicit overrides.

    Args:
        config_file: Flat ``key = value`` file; keys are RunConfig field names,
            ``d`` sets both ``d_a`` and ``d_b``
        **overrides: Values that win over the file (None values are ignored)

    Returns:
        Validated run configuration

    Raises:
        ConfigInvalidError: If the file is missing or any value is invalid
    """
    values: dict[str, Any] = {}
    if config_file is not None:
        if not config_file.is_file():
            raise ConfigInvalidError(f"Config file not found: {config_file}")
        for key, value in dotenv_values(config_file).items():
            if value is not None:
                values[key.strip().lower()] = value
        logger.debug("Loaded %d keys from %s", len(values), config_file)
        _expand_square_dim(values, values.pop("d", None))
        unknown = sorted(set(values) - set(RunConfig.model_fields))
        if unknown:
            raise ConfigInvalidError(f"Unknown keys in {config_file}: {', '.join(unknown)}")

    explicit = {key: value for key, value in overrides.items() if value is not None}
    square = explicit.pop("d", None)
    values.update(explicit)
    if square is not None:
        values["d_a"] = values["d_b"] = square

    try:
        config = RunConfig(**values)
    except ValidationError as e:
        raise ConfigInvalidError(str(e)) from e

    config.check_methods()
    return config


def _expand_square_dim(values: dict[str, Any], d: Any) -> None:
    if d is not None:
        values.setdefault("d_a", d)
        values.setdefault("d_b", d)
