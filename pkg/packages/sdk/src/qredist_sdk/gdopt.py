"""Gradient ascent of S(rho_A) - S(rho_B) over parameterized unitaries.

Unitaries are ``W(h) = exp(i sum_a h_a G_a)`` over a
:class:`~qredist_sdk.generators.GeneratorBasis`. The gradient is exact by
default (derivative of the matrix exponential in the eigenbasis of the
generator sum); central differences are available for cross-checks.
Second-derivative closed forms at optimal permutation layouts are provided for
two qubits and two qutrits.
"""

import logging
import math
from collections.abc import Callable
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from qredist_sdk.config import AdamConfig, get_numeric_config
from qredist_sdk.exceptions import InvalidSpectrumError
from qredist_sdk.generators import GeneratorBasis
from qredist_sdk.models import (
    DensityMatrix,
    LatticeAssignment,
    OptRun,
    ParamVector,
    StationarityReport,
)
from qredist_sdk.qlinalg import check_unitary, eigh_descending, expm_i_hermitian
from qredist_sdk.states import entropy_from_eigenvalues

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

Objective = Callable[[NDArray[np.float64]], tuple[float, NDArray[np.float64]]]


def _as_array(rho_ab: DensityMatrix | ArrayLike) -> NDArray[np.complex128]:
    if isinstance(rho_ab, DensityMatrix):
        return rho_ab.mat
    return np.asarray(rho_ab, dtype=np.complex128)


def _params(params: ParamVector | ArrayLike) -> NDArray[np.float64]:
    if isinstance(params, ParamVector):
        return params.h
    return np.asarray(params, dtype=np.float64)


def build_unitary(basis: GeneratorBasis, params: ParamVector | ArrayLike) -> NDArray[np.complex128]:
    """W(h) = exp(i sum_a h_a G_a).

    Raises:
        LengthMismatchError: If the parameter count does not match the basis
    """
    return expm_i_hermitian(basis.hamiltonian(_params(params)))


def _marginals(
    sigma: NDArray[np.complex128], d_a: int, d_b: int
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    t = sigma.reshape(d_a, d_b, d_a, d_b)
    return np.einsum("ijkj->ik", t), np.einsum("ijil->jl", t)


def delta_s_objective(
    rho_ab: DensityMatrix | ArrayLike, d_a: int, d_b: int, u: ArrayLike
) -> float:
    """S(Tr_B U rho U^dagger) - S(Tr_A U rho U^dagger), bits."""
    rho = _as_array(rho_ab)
    m = np.asarray(u, dtype=np.complex128)
    rho_a, rho_b = _marginals(m @ rho @ m.conj().T, d_a, d_b)
    s_a = entropy_from_eigenvalues(np.linalg.eigvalsh(rho_a))
    s_b = entropy_from_eigenvalues(np.linalg.eigvalsh(rho_b))
    return float(s_a - s_b)


def _log_and_entropy(
    rho: NDArray[np.complex128], zero: float
) -> tuple[NDArray[np.complex128], float]:
    w, q = np.linalg.eigh(rho)
    log_w = np.log(np.maximum(w, zero))
    return (q * log_w) @ q.conj().T, float(entropy_from_eigenvalues(w, zero))


def value_and_gradient(
    rho_ab: DensityMatrix | ArrayLike,
    d_a: int,
    d_b: int,
    basis: GeneratorBasis,
    params: ParamVector | ArrayLike,
) -> tuple[float, NDArray[np.float64]]:
    """Objective and exact gradient at ``h``.

    With ``U = V e^{i Lambda} V^dagger`` and ``K = (I x log rho_B - log rho_A x I) / ln 2``
    the derivative along ``G_a`` is ``2 Re Tr(G_a B)`` where
    ``B = V (F o (V^dagger rho U^dagger K V)^T)^T V^dagger`` and ``F`` holds the
    divided differences of ``exp(i x)`` over the eigenvalues. Eigenvalues of the
    marginals below the zero cut-off are clipped inside the logarithms.

    Returns:
        (delta_s, gradient)
    """
    rho = _as_array(rho_ab)
    zero = get_numeric_config().zero_eigenvalue
    lam, v = eigh_descending(basis.hamiltonian(_params(params)))
    u = (v * np.exp(1j * lam)) @ v.conj().T
    rho_a, rho_b = _marginals(u @ rho @ u.conj().T, d_a, d_b)
    log_a, s_a = _log_and_entropy(rho_a, zero)
    log_b, s_b = _log_and_entropy(rho_b, zero)
    k = (np.kron(np.eye(d_a), log_b) - np.kron(log_a, np.eye(d_b))) / LN2

    n = v.conj().T @ (rho @ u.conj().T @ k) @ v
    gap = lam[:, None] - lam[None, :]
    divided = 1j * np.exp(0.5j * (lam[:, None] + lam[None, :])) * np.sinc(gap / (2 * np.pi))
    b = v @ (divided * n.T).T @ v.conj().T
    grad = 2.0 * np.real(basis.traces_with(b))
    return s_a - s_b, grad


def analytic_gradient(
    rho_ab: DensityMatrix | ArrayLike,
    d_a: int,
    d_b: int,
    basis: GeneratorBasis,
    params: ParamVector | ArrayLike,
) -> NDArray[np.float64]:
    """Exact gradient of delta_s(W(h) rho W(h)^dagger) with respect to ``h``."""
    return value_and_gradient(rho_ab, d_a, d_b, basis, params)[1]


def numeric_gradient(
    rho_ab: DensityMatrix | ArrayLike,
    d_a: int,
    d_b: int,
    basis: GeneratorBasis,
    params: ParamVector | ArrayLike,
    step: float = 1e-5,
) -> NDArray[np.float64]:
    """Central-difference gradient, ``(f(h + step e_a) - f(h - step e_a)) / (2 step)``."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    rho = _as_array(rho_ab)
    h = _params(params)
    grad = np.empty(len(basis))
    for a in range(len(basis)):
        shift = np.zeros_like(h)
        shift[a] = step
        plus = delta_s_objective(rho, d_a, d_b, build_unitary(basis, h + shift))
        minus = delta_s_objective(rho, d_a, d_b, build_unitary(basis, h - shift))
        grad[a] = (plus - minus) / (2 * step)
    return grad


def _objective(
    rho: NDArray[np.complex128], d_a: int, d_b: int, basis: GeneratorBasis, config: AdamConfig
) -> Objective:
    if config.gradient == "analytic":
        return lambda h: value_and_gradient(rho, d_a, d_b, basis, h)

    def numeric(h: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
        value = delta_s_objective(rho, d_a, d_b, build_unitary(basis, h))
        return value, numeric_gradient(rho, d_a, d_b, basis, h, config.gradient_step)

    return numeric


def _ascend(
    objective: Objective, h0: NDArray[np.float64], config: AdamConfig
) -> tuple[float, NDArray[np.float64], int, list[tuple[int, float]], bool]:
    h = h0.copy()
    m = np.zeros_like(h)
    v = np.zeros_like(h)
    best, best_h = -np.inf, h.copy()
    trajectory: list[tuple[int, float]] = []
    previous: float | None = None
    patience = 1 if config.stop_rule == "threshold" else config.patience
    decay = 1.0 if config.stop_rule == "threshold" else config.lr_decay
    streak = 0
    converged = False
    t = 0
    for t in range(1, config.max_iters + 1):
        value, grad = objective(h)
        trajectory.append((t - 1, value))
        if value > best:
            best, best_h = value, h.copy()
        if previous is not None and abs(value - previous) < config.tol:
            streak += 1
            if streak >= patience:
                converged = True
                break
        else:
            streak = 0
        previous = value

        m = config.beta1 * m + (1 - config.beta1) * grad
        v = config.beta2 * v + (1 - config.beta2) * grad**2
        m_hat = m / (1 - config.beta1**t)
        v_hat = v / (1 - config.beta2**t)
        lr = config.learning_rate * decay ** (t - 1)
        h = h + lr * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return best, best_h, t, trajectory, converged


def adam_maximize(
    rho_ab: DensityMatrix | ArrayLike,
    d_a: int,
    d_b: int,
    config: AdamConfig | None = None,
    basis: GeneratorBasis | None = None,
) -> OptRun:
    """Maximize delta_s with Adam over ``exp(i sum_a h_a G_a)``.

    Restart 0 starts at ``h = 0``; restart ``i > 0`` draws ``h`` from a normal
    distribution of width ``init_scale`` seeded with ``seed + i``. Under the
    ``patience`` stop rule the step size decays by ``lr_decay`` per iteration
    and a restart stops after ``patience`` consecutive steps with an objective
    change below ``tol``; under ``threshold`` the step size is constant and the
    first such step stops it. Every restart ends at ``max_iters`` at the latest.
    The restart with the best value wins, ties going to the smaller seed.

    Args:
        rho_ab: Density matrix on A x B
        d_a: Dimension of A
        d_b: Dimension of B
        config: Hyperparameters, defaults to ``AdamConfig()``
        basis: Generator basis, defaults to the Gell-Mann tensor basis

    Returns:
        Best run over all restarts
    """
    config = config or AdamConfig()
    basis = basis or GeneratorBasis(d_a, d_b)
    rho = _as_array(rho_ab)
    objective = _objective(rho, d_a, d_b, basis, config)

    best: OptRun | None = None
    for restart in range(config.restarts):
        seed = config.seed + restart
        if restart == 0:
            h0 = np.zeros(len(basis))
        else:
            h0 = np.random.default_rng(seed).normal(0.0, config.init_scale, len(basis))
        value, h, iterations, trajectory, converged = _ascend(objective, h0, config)
        logger.debug(
            "Adam restart %d (seed %d): delta_s=%.10f after %d iterations",
            restart,
            seed,
            value,
            iterations,
        )
        if best is None or value > best.best_delta_s:
            best = OptRun(
                best_delta_s=value,
                iterations=iterations,
                trajectory=trajectory,
                final_params=ParamVector(h=h),
                converged=converged,
                best_unitary=build_unitary(basis, h),
                restart=restart,
                seed=seed,
            )

    assert best is not None
    if not best.converged:
        logger.warning(
            "Adam did not converge within %d iterations (best delta_s=%.8f)",
            config.max_iters,
            best.best_delta_s,
        )
    return best


def verify_local_max(
    rho_ab: DensityMatrix | ArrayLike,
    d_a: int,
    d_b: int,
    basis: GeneratorBasis,
    u_candidate: ArrayLike,
    tol_g: float = 1e-4,
    tol_h: float = 1e-4,
    step: float = 1e-4,
) -> StationarityReport:
    """Check that ``u_candidate`` is a local maximum of delta_s.

    Derivatives are taken of ``h -> delta_s(W(h) u rho u^dagger W(h)^dagger)``
    at ``h = 0``: the gradient by central differences of the objective, the
    Hessian by central differences of the exact gradient (then symmetrized).
    The candidate is a local maximum when the gradient infinity norm is at most
    ``tol_g`` and the largest Hessian eigenvalue is at most ``tol_h``.

    Args:
        rho_ab: Density matrix on A x B
        d_a: Dimension of A
        d_b: Dimension of B
        basis: Generator basis
        u_candidate: Unitary on A x B
        tol_g: Gradient tolerance
        tol_h: Curvature tolerance
        step: Finite-difference step for the Hessian

    Returns:
        Stationarity report
    """
    u = np.asarray(u_candidate, dtype=np.complex128)
    check_unitary(u, dim=d_a * d_b)
    rho = u @ _as_array(rho_ab) @ u.conj().T
    size = len(basis)
    origin = np.zeros(size)

    grad = numeric_gradient(rho, d_a, d_b, basis, origin)
    hessian = np.empty((size, size))
    for a in range(size):
        shift = np.zeros(size)
        shift[a] = step
        plus = analytic_gradient(rho, d_a, d_b, basis, shift)
        minus = analytic_gradient(rho, d_a, d_b, basis, -shift)
        hessian[:, a] = (plus - minus) / (2 * step)
    hessian = (hessian + hessian.T) / 2

    off = hessian - np.diag(np.diag(hessian))
    grad_norm = float(np.max(np.abs(grad))) if size else 0.0
    max_eig = float(np.linalg.eigvalsh(hessian)[-1]) if size else 0.0
    return StationarityReport(
        grad_norm=grad_norm,
        hessian_diag=np.diag(hessian).tolist(),
        hessian_offdiag_max=float(np.max(np.abs(off))) if size else 0.0,
        hessian_max_eigenvalue=max_eig,
        labels=list(basis.labels),
        is_local_max=grad_norm <= tol_g and max_eig <= tol_h,
    )


# Closed-form curvatures at optimal layouts


def _check_spectrum(probs: ArrayLike, size: int, descending: bool = True) -> NDArray[np.float64]:
    p = np.asarray(probs, dtype=np.float64)
    if p.shape != (size,):
        raise InvalidSpectrumError(f"Expected {size} probabilities, got shape {p.shape}")
    if np.any(p < 0) or abs(float(p.sum()) - 1.0) > 1e-10:
        raise InvalidSpectrumError("Probabilities must be non-negative and sum to 1")
    if descending and np.any(np.diff(p) > 0):
        raise InvalidSpectrumError("Probabilities must be sorted descending")
    return p


def _xlog_ratio(c: float, num: float, den: float) -> float:
    """c * ln(num / den) with 0 * ln(anything) = 0."""
    if c == 0:
        return 0.0
    with np.errstate(divide="ignore"):
        return float(c * (np.log(num) - np.log(den)))


def _log_ratio_over_gap(total: float, gap: float) -> float:
    """ln((total - |gap|) / (total + |gap|)) / |gap|, tending to -2 / total as gap -> 0."""
    g = abs(gap)
    if total <= 0:
        return 0.0
    if g < 1e-12 * total:
        return -2.0 / total
    with np.errstate(divide="ignore"):
        return float((np.log(total - g) - np.log(total + g)) / g)


def second_derivative_closed_form_d2(probs: ArrayLike, which: tuple[int, int]) -> float:
    """d^2 delta_s / dh^2 along sigma_m x sigma_n at the optimal two-qubit layout.

    The layout puts p1, p4 in row 0 and p2, p3 in row 1 (columns p1 + p2 and
    p4 + p3). Labels ``(m, n)`` with both in {1, 2} share one expression, as do
    (1, 3) with (2, 3) and (3, 1) with (3, 2); any label with a 0 and (3, 3)
    give zero.

    Args:
        probs: Descending spectrum p1 >= p2 >= p3 >= p4
        which: Pauli label (m, n)

    Returns:
        Second derivative in bits per radian squared

    Raises:
        InvalidSpectrumError: If ``probs`` is not a descending 4-spectrum
    """
    p1, p2, p3, p4 = _check_spectrum(probs, 4).tolist()
    m, n = which
    if not (0 <= m <= 3 and 0 <= n <= 3):
        raise ValueError(f"Pauli labels lie in 0..3, got {which}")
    if m == 0 or n == 0 or (m, n) == (3, 3):
        return 0.0
    if m != 3 and n != 3:
        return (2 / LN2) * (
            _xlog_ratio(p1 + p2 - p3 - p4, p3 + p4, p1 + p2)
            + _xlog_ratio(p1 + p4 - p2 - p3, p1 + p4, p2 + p3)
        )
    if n == 3:
        return 8 * (p1 - p2) * (p3 - p4) * _log_ratio_over_gap(1.0, 2 * p2 + 2 * p3 - 1) / LN2
    return 8 * (p2 - p3) * (p1 - p4) * _log_ratio_over_gap(1.0, 2 * p1 + 2 * p2 - 1) / LN2


class QutritForm(StrEnum):
    """Second-derivative families for two qutrits."""

    FORM1 = "form1"
    FORM2 = "form2"
    FORM3 = "form3"

    @property
    def label(self) -> tuple[int, int]:
        """Gell-Mann label whose curvature the form gives."""
        return {"form1": (1, 2), "form2": (1, 3), "form3": (1, 8)}[self.value]


def second_derivative_closed_form_d3(
    probs: ArrayLike, which: QutritForm, assignment: LatticeAssignment | None = None
) -> float:
    """d^2 delta_s / dh^2 along a Gell-Mann product at a two-qutrit layout.

    The forms are written in the lattice occupations s1..s9 (row-major). With
    ``assignment`` the probabilities are a descending spectrum placed by the
    layout; without it they are taken as the occupations directly.

    Raises:
        InvalidSpectrumError: If ``probs`` is not a valid 9-spectrum
    """
    p = _check_spectrum(probs, 9, descending=assignment is not None)
    s = assignment.occupation(p).ravel() if assignment is not None else p
    s1, s2, s3, s4, s5, s6, s7, s8, _ = s.tolist()

    if which is QutritForm.FORM1:
        return (2 / LN2) * (
            _xlog_ratio(s1 + s2 - s4 - s5, s1 + s2 + s3, s4 + s5 + s6)
            + _xlog_ratio(-s1 + s2 - s4 + s5, s1 + s4 + s7, s2 + s5 + s8)
        )

    gap = s1 + s2 + s3 - s4 - s5 - s6
    ratio = _log_ratio_over_gap(s1 + s2 + s3 + s4 + s5 + s6, gap)
    if which is QutritForm.FORM2:
        part1 = 4 * (s1 - s4) * (s2 - s5) + (s6 - s3) * (s4 + s5) + (s1 + s2) * (s3 - s6)
        return part1 * (-2 / LN2) * ratio
    part1 = (s1 + s2 - s4 - s5) * (s3 - s6)
    return part1 * (-6 / LN2) * ratio
