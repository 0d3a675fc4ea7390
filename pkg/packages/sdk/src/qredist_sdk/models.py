"""Data models for qredist SDK."""

from enum import StrEnum
from typing import Annotated, Any

import numpy as np
from numpy.typing import NDArray
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveInt,
    ValidationError,
    model_validator,
)

from qredist_sdk.exceptions import InvalidDensityError


def _frozen_array(value: Any, dtype: type, ndim: int) -> NDArray[Any]:
    array = np.array(value, dtype=dtype)
    if array.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("array has non-finite entries")
    array.setflags(write=False)
    return array


ComplexMatrix = Annotated[
    np.ndarray, BeforeValidator(lambda v: _frozen_array(v, np.complex128, 2))
]
ComplexVector = Annotated[
    np.ndarray, BeforeValidator(lambda v: _frozen_array(v, np.complex128, 1))
]
RealVector = Annotated[np.ndarray, BeforeValidator(lambda v: _frozen_array(v, np.float64, 1))]

_ARRAY_MODEL = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class Method(StrEnum):
    """Entropy-difference maximization methods."""

    THEOREM1 = "theorem1"
    EXHAUSTIVE = "exhaustive"
    CLOSED_FORM_D2 = "closed_form_d2"
    RGNP = "rgnp"
    ADAM = "adam"

    @property
    def is_permutation(self) -> bool:
        """Whether the method returns a permutation layout of the spectrum."""
        return self in (Method.EXHAUSTIVE, Method.CLOSED_FORM_D2, Method.RGNP)


class Subsystem(StrEnum):
    """Which factor of a bipartite matrix a partial trace keeps."""

    FIRST = "first"
    SECOND = "second"


class PartitionObjective(StrEnum):
    """Objectives of the exhaustive partition oracles."""

    MIN_MAX_SUM = "min_max_sum"
    MAX_MIN_SUM = "max_min_sum"
    MAX_ENTROPY_OF_SUMS = "max_entropy_of_sums"


# Linear algebra


class HermitianEigen(BaseModel):
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""

    model_config = _ARRAY_MODEL

    values: RealVector = Field(..., description="Eigenvalues, descending")
    vectors: ComplexMatrix = Field(..., description="Column j is the eigenvector of values[j]")

    @model_validator(mode="after")
    def _check(self) -> "HermitianEigen":
        n = self.values.shape[0]
        if self.vectors.shape != (n, n):
            raise ValueError(f"vectors shape {self.vectors.shape} does not match {n} values")
        if np.any(np.diff(self.values) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        return self

    def reconstruct(self) -> NDArray[np.complex128]:
        """Return V diag(values) V^dagger."""
        return (self.vectors * self.values) @ self.vectors.conj().T


# States


class TripartitePureState(BaseModel):
    """Normalized pure state on A x B x C, amplitudes indexed (a*d_B + b)*d_C + c."""

    model_config = _ARRAY_MODEL

    dims: tuple[PositiveInt, PositiveInt, PositiveInt] = Field(..., description="(d_A, d_B, d_C)")
    amps: ComplexVector = Field(..., description="Amplitude vector")

    @model_validator(mode="after")
    def _check(self) -> "TripartitePureState":
        from qredist_sdk.config import get_numeric_config

        d_a, d_b, d_c = self.dims
        if self.amps.shape[0] != d_a * d_b * d_c:
            raise ValueError(f"{self.amps.shape[0]} amplitudes do not match dims {self.dims}")
        norm = float(np.linalg.norm(self.amps))
        if abs(norm - 1.0) > get_numeric_config().normalization_tol:
            raise ValueError(f"state is not normalized (norm={norm!r})")
        return self

    @classmethod
    def from_amplitudes(
        cls, dims: tuple[int, int, int], amps: Any, normalize: bool = True
    ) -> "TripartitePureState":
        """Build a state, optionally rescaling the amplitudes to unit norm."""
        vector = np.asarray(amps, dtype=np.complex128).ravel()
        if normalize:
            norm = np.linalg.norm(vector)
            if norm == 0:
                raise ValueError("zero vector cannot be normalized")
            vector = vector / norm
        return cls(dims=dims, amps=vector)

    @property
    def d_a(self) -> int:
        return self.dims[0]

    @property
    def d_b(self) -> int:
        return self.dims[1]

    @property
    def d_c(self) -> int:
        return self.dims[2]

    def ab_by_c(self) -> NDArray[np.complex128]:
        """Amplitudes as a (d_A d_B) x d_C matrix."""
        return self.amps.reshape(self.d_a * self.d_b, self.d_c)


class DensityMatrix(BaseModel):
    """Hermitian, positive semidefinite, unit-trace matrix."""

    model_config = _ARRAY_MODEL

    mat: ComplexMatrix = Field(..., description="Matrix entries")

    @model_validator(mode="after")
    def _check(self) -> "DensityMatrix":
        from qredist_sdk.config import get_numeric_config

        cfg = get_numeric_config()
        rows, cols = self.mat.shape
        if rows != cols:
            raise ValueError(f"density matrix must be square, got {self.mat.shape}")
        scale = max(1.0, float(np.linalg.norm(self.mat)))
        if np.linalg.norm(self.mat - self.mat.conj().T) > cfg.hermitian_tol * scale:
            raise ValueError("density matrix is not Hermitian")
        trace = complex(np.trace(self.mat))
        if abs(trace - 1.0) > cfg.trace_tol:
            raise ValueError(f"density matrix trace is {trace.real!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(self.mat)[0])
        if lowest < -cfg.positivity_tol:
            raise ValueError(f"density matrix has negative eigenvalue {lowest!r}")
        return self

    @classmethod
    def from_matrix(cls, mat: Any) -> "DensityMatrix":
        """Validate a raw matrix as a density matrix.

        Raises:
            InvalidDensityError: If any density-matrix invariant fails
        """
        try:
            return cls(mat=mat)
        except ValidationError as e:
            raise InvalidDensityError(str(e)) from e

    @property
    def dim(self) -> int:
        return int(self.mat.shape[0])


class MutualInfoReport(BaseModel):
    """Entropies and mutual informations of a tripartite pure state, in bits."""

    model_config = ConfigDict(frozen=True)

    s_a: float = Field(..., description="S(rho_A)")
    s_b: float = Field(..., description="S(rho_B)")
    s_c: float = Field(..., description="S(rho_C)")
    s_ab: float = Field(..., description="S(rho_AB)")
    i_ac: float = Field(..., description="I(A:C) = S_C + S_A - S_B")
    i_bc: float = Field(..., description="I(B:C) = S_C + S_B - S_A")
    i_ab_c: float = Field(..., description="I(AB:C) = S_AB + S_C")
    delta_s: float = Field(..., description="S_A - S_B")
    rank_c: int = Field(..., ge=0, description="Numerical rank of rho_C")


# Number partitioning


class PartitionInput(BaseModel):
    """Numbers to split into k sets, optionally with a fixed set size."""

    model_config = ConfigDict(frozen=True)

    numbers: list[NonNegativeFloat] = Field(..., description="Weights to partition")
    k: PositiveInt = Field(..., description="Number of sets")
    per_set: PositiveInt | None = Field(None, description="Required set size k_B")

    @property
    def is_rectangular(self) -> bool:
        return self.per_set is not None and len(self.numbers) == self.k * self.per_set


class Partition(BaseModel):
    """k sets of numbers, each sorted descending."""

    model_config = ConfigDict(frozen=True)

    sets: list[tuple[float, ...]] = Field(..., description="Sets, each descending")

    @model_validator(mode="after")
    def _check(self) -> "Partition":
        for s in self.sets:
            if any(a < b for a, b in zip(s, s[1:], strict=False)):
                raise ValueError(f"set {s} is not sorted descending")
        return self

    @property
    def sums(self) -> list[float]:
        return [float(sum(s)) for s in self.sets]

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.sets]

    @property
    def max_sum(self) -> float:
        return max(self.sums)

    @property
    def min_sum(self) -> float:
        return min(self.sums)

    def sum_entropy(self) -> float:
        """Shannon entropy (bits) of the normalized set sums."""
        sums = np.array(self.sums)
        total = sums.sum()
        if total <= 0:
            return 0.0
        p = sums[sums > 0] / total
        return float(-np.sum(p * np.log2(p)))

    def elements(self) -> list[float]:
        """All elements, descending."""
        return sorted((x for s in self.sets for x in s), reverse=True)


# Permutation optimizer


class Spectrum(BaseModel):
    """Descending eigenvalues of rho_AB with matching eigenvectors."""

    model_config = _ARRAY_MODEL

    d_a: PositiveInt
    d_b: PositiveInt
    probs: RealVector = Field(..., description="Eigenvalues p_mn, descending")
    eigvecs: ComplexMatrix = Field(..., description="Column i is the eigenvector of probs[i]")

    @model_validator(mode="after")
    def _check(self) -> "Spectrum":
        n = self.d_a * self.d_b
        if self.probs.shape != (n,) or self.eigvecs.shape != (n, n):
            raise ValueError(f"spectrum shapes do not match {self.d_a}x{self.d_b}")
        if np.any(np.diff(self.probs) > 0):
            raise ValueError("probabilities must be sorted descending")
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(float(self.probs.sum()) - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {float(self.probs.sum())!r}")
        return self

    @classmethod
    def from_probs(cls, probs: Any, d_a: int, d_b: int) -> "Spectrum":
        """Spectrum of the diagonal state diag(probs) (eigenvectors = computational basis)."""
        p = np.sort(np.asarray(probs, dtype=np.float64))[::-1]
        return cls(d_a=d_a, d_b=d_b, probs=p, eigvecs=np.eye(d_a * d_b))


class LatticeAssignment(BaseModel):
    """Bijection from eigenvalue index to lattice cell (m, n)."""

    model_config = ConfigDict(frozen=True)

    d_a: PositiveInt
    d_b: PositiveInt
    cell_of: tuple[tuple[int, int], ...] = Field(..., description="Cell of eigenvalue i")

    @model_validator(mode="after")
    def _check(self) -> "LatticeAssignment":
        grid = {(m, n) for m in range(self.d_a) for n in range(self.d_b)}
        if len(self.cell_of) != len(grid) or set(self.cell_of) != grid:
            raise ValueError("cell_of must be a bijection onto the lattice")
        return self

    @classmethod
    def identity(cls, d_a: int, d_b: int) -> "LatticeAssignment":
        """Eigenvalue i sits at cell (i // d_b, i % d_b)."""
        return cls(d_a=d_a, d_b=d_b, cell_of=tuple(divmod(i, d_b) for i in range(d_a * d_b)))

    @classmethod
    def from_cell_order(cls, order: Any, d_a: int, d_b: int) -> "LatticeAssignment":
        """Build from ``order[c]`` = eigenvalue index placed at row-major cell c."""
        cell_of: list[tuple[int, int]] = [(0, 0)] * (d_a * d_b)
        for cell, index in enumerate(order):
            cell_of[int(index)] = divmod(cell, d_b)
        return cls(d_a=d_a, d_b=d_b, cell_of=tuple(cell_of))

    def cell_order(self) -> list[int]:
        """Eigenvalue index at each row-major cell (the inverse permutation)."""
        order = [0] * len(self.cell_of)
        for index, (m, n) in enumerate(self.cell_of):
            order[m * self.d_b + n] = index
        return order

    def occupation(self, probs: Any) -> NDArray[np.float64]:
        """d_a x d_b grid with probs[i] at cell_of[i]."""
        p = np.asarray(probs, dtype=np.float64)
        return p[self.cell_order()].reshape(self.d_a, self.d_b)

    def permutation_matrix(self) -> NDArray[np.complex128]:
        """U_s with U_s |i> = |cell_of(i)>."""
        n = len(self.cell_of)
        u = np.zeros((n, n), dtype=np.complex128)
        for index, (m, n_) in enumerate(self.cell_of):
            u[m * self.d_b + n_, index] = 1.0
        return u


class PermResult(BaseModel):
    """Outcome of placing a spectrum on the lattice."""

    model_config = _ARRAY_MODEL

    assignment: LatticeAssignment
    row_sums: tuple[float, ...] = Field(..., description="p_A marginal")
    col_sums: tuple[float, ...] = Field(..., description="p_B marginal")
    s_a: float = Field(..., description="S(rho_A^s), bits")
    s_b: float = Field(..., description="S(rho_B^s), bits")
    delta_s: float = Field(..., description="S_A - S_B, bits")
    unitary: ComplexMatrix = Field(..., description="Composite U_s D")


# Gradient descent


class ParamVector(BaseModel):
    """Real coefficients over a generator basis (radians)."""

    model_config = _ARRAY_MODEL

    h: RealVector = Field(..., description="Coefficients h_a")

    @classmethod
    def zeros(cls, size: int) -> "ParamVector":
        return cls(h=np.zeros(size))

    def __len__(self) -> int:
        return int(self.h.shape[0])


class OptRun(BaseModel):
    """Result of an Adam maximization (best restart)."""

    model_config = _ARRAY_MODEL

    best_delta_s: float = Field(..., description="Best objective seen, bits")
    iterations: int = Field(..., ge=0, description="Iterations of the best restart")
    trajectory: list[tuple[int, float]] = Field(..., description="(iteration, delta_s)")
    final_params: ParamVector = Field(..., description="Parameters at the best objective")
    converged: bool = Field(..., description="Whether the change criterion was met")
    best_unitary: ComplexMatrix = Field(..., description="exp(i sum h_a G_a) at the best point")
    restart: int = Field(0, ge=0, description="Index of the winning restart")
    seed: int = Field(0, ge=0, description="Seed of the winning restart")


class StationarityReport(BaseModel):
    """Finite-difference first and second derivatives at a candidate unitary."""

    model_config = ConfigDict(frozen=True)

    grad_norm: float = Field(..., ge=0, description="Infinity norm of the gradient")
    hessian_diag: list[float] = Field(..., description="Diagonal second derivatives")
    hessian_offdiag_max: float = Field(..., ge=0, description="Largest |off-diagonal|")
    hessian_max_eigenvalue: float = Field(..., description="Largest Hessian eigenvalue")
    labels: list[tuple[int, int]] = Field(..., description="Generator labels, in order")
    is_local_max: bool


# Experiments


class ComparisonRecord(BaseModel):
    """Per-state outcome of one experiment run."""

    model_config = ConfigDict(frozen=True)

    state_index: int = Field(..., ge=0)
    seed: int = Field(..., ge=0)
    s_c: float = Field(..., description="S(rho_C), bits")
    rank_c: int = Field(..., ge=0)
    delta_s: dict[Method, float | None] = Field(..., description="Best delta_s per method")
    relative_errors: dict[Method, float | None] = Field(
        default_factory=dict, description="(adam - perm) / adam per permutation method"
    )
    relative_error: float | None = Field(None, description="Headline relative error")
    relative_error_flagged: bool = Field(False, description="adam delta_s too small to divide")
    errors: dict[Method, str] = Field(default_factory=dict, description="Per-method failures")
    wall_times: dict[Method, float] = Field(default_factory=dict, exclude=True)


class MethodStats(BaseModel):
    """Relative-error statistics of one permutation method against Adam."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(..., ge=0)
    flagged: int = Field(..., ge=0)
    mean: float | None = None
    mean_abs: float | None = None
    min: float | None = None
    max: float | None = None


class RunSummary(BaseModel):
    """Everything needed to audit and re-emit a run."""

    model_config = ConfigDict(frozen=True)

    version: str
    dims: tuple[int, int, int]
    n_states: int
    seed: int
    methods: list[Method]
    ensemble: str = Field(..., description="Description of the random-state ensemble")
    adam: dict[str, Any] = Field(default_factory=dict, description="Adam hyperparameters")
    rgnp_refine: bool = Field(True, description="Whether rgnp layouts were refined by cell moves")
    tolerances: dict[str, float] = Field(default_factory=dict)
    relative_error: dict[Method, MethodStats] = Field(default_factory=dict)
    delta_s_range: dict[Method, tuple[float, float]] = Field(default_factory=dict)
    failures: int = Field(0, ge=0)
    records: list[ComparisonRecord] = Field(default_factory=list)


class SuiteResult(BaseModel):
    """Outcome of one verification suite."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    detail: str = ""
    diff: str = ""
