"""Tripartite pure states, entropies and the rank-limited optimal unitary.

All entropies are in bits. Amplitudes of a state on A x B x C are indexed
``(a * d_B + b) * d_C + c``.
"""

import logging
from typing import Any

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from qredist_sdk.config import get_numeric_config
from qredist_sdk.exceptions import (
    AsymmetricDimsError,
    DimensionMismatchError,
    RankTooLargeError,
)
from qredist_sdk.models import DensityMatrix, MutualInfoReport, TripartitePureState
from qredist_sdk.qlinalg import check_unitary

logger = logging.getLogger(__name__)


def shannon_entropy(p: ArrayLike, zero: float | None = None) -> float:
    """Shannon entropy in bits, dropping entries at or below ``zero`` (0 log 0 = 0)."""
    return float(entropy_from_eigenvalues(np.asarray(p, dtype=np.float64), zero))


def entropy_from_eigenvalues(values: NDArray[np.float64], zero: float | None = None) -> Any:
    """Entropy along the last axis of an array of spectra.

    Args:
        values: Spectrum or stack of spectra
        zero: Cut-off below which eigenvalues count as 0

    Returns:
        Entropy in bits (scalar for 1-d input, array otherwise)
    """
    zero = get_numeric_config().zero_eigenvalue if zero is None else zero
    kept = np.where(values > zero, values, 1.0)
    return -np.sum(np.where(values > zero, values * np.log2(kept), 0.0), axis=-1)


def von_neumann_entropy(rho: DensityMatrix | ArrayLike) -> float:
    """S(rho) = -Tr[rho log2 rho].

    Args:
        rho: Density matrix, or a raw matrix that is validated first

    Returns:
        Entropy in bits, within [0, log2 dim]

    Raises:
        InvalidDensityError: If a raw matrix is not a density matrix
    """
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix.from_matrix(rho)
    return float(entropy_from_eigenvalues(np.linalg.eigvalsh(rho.mat)))


def _hermitize(m: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return (m + m.conj().T) / 2


def density_from_pure(psi: TripartitePureState) -> DensityMatrix:
    """|psi><psi| on A x B x C."""
    return DensityMatrix(mat=np.outer(psi.amps, psi.amps.conj()))


def reduced_states(
    psi: TripartitePureState,
) -> tuple[DensityMatrix, DensityMatrix, DensityMatrix, DensityMatrix]:
    """Reduced density matrices of a pure state.

    Returns:
        (rho_A, rho_B, rho_C, rho_AB)
    """
    t = psi.amps.reshape(psi.dims)
    m = psi.ab_by_c()
    rho_a = np.einsum("abc,dbc->ad", t, t.conj())
    rho_b = np.einsum("abc,adc->bd", t, t.conj())
    rho_c = m.T @ m.conj()
    rho_ab = m @ m.conj().T
    return (
        DensityMatrix(mat=_hermitize(rho_a)),
        DensityMatrix(mat=_hermitize(rho_b)),
        DensityMatrix(mat=_hermitize(rho_c)),
        DensityMatrix(mat=_hermitize(rho_ab)),
    )


def reduced_ab(psi: TripartitePureState) -> DensityMatrix:
    """rho_AB = Tr_C |psi><psi|."""
    m = psi.ab_by_c()
    return DensityMatrix(mat=_hermitize(m @ m.conj().T))


def mutual_info_report(psi: TripartitePureState) -> MutualInfoReport:
    """Entropies, mutual informations and rank of rho_C for a pure state."""
    rho_a, rho_b, rho_c, rho_ab = reduced_states(psi)
    s_a = von_neumann_entropy(rho_a)
    s_b = von_neumann_entropy(rho_b)
    s_ab = von_neumann_entropy(rho_ab)
    eig_c = np.linalg.eigvalsh(rho_c.mat)
    s_c = float(entropy_from_eigenvalues(eig_c))
    rank_c = int(np.count_nonzero(eig_c > get_numeric_config().rank_eps))
    return MutualInfoReport(
        s_a=s_a,
        s_b=s_b,
        s_c=s_c,
        s_ab=s_ab,
        i_ac=s_c + s_a - s_b,
        i_bc=s_c + s_b - s_a,
        i_ab_c=s_ab + s_c,
        delta_s=s_a - s_b,
        rank_c=rank_c,
    )


def apply_bipartite_unitary(psi: TripartitePureState, u: ArrayLike) -> TripartitePureState:
    """Return (U x I_C)|psi>.

    Raises:
        DimensionMismatchError: If ``u`` is not (d_A d_B) x (d_A d_B)
        NotUnitaryError: If ``u`` is not unitary within tolerance
    """
    m = np.asarray(u, dtype=np.complex128)
    check_unitary(m, dim=psi.d_a * psi.d_b)
    return TripartitePureState.from_amplitudes(psi.dims, (m @ psi.ab_by_c()).ravel())


def theorem1_optimal_unitary(
    psi: TripartitePureState,
) -> tuple[NDArray[np.complex128], MutualInfoReport]:
    """Unitary on AB that reaches delta_s = S(rho_C) when rank(rho_C) <= d_A.

    The state is Schmidt-decomposed across AB|C. The n-th Schmidt vector on AB
    is sent to |n>_A |0>_B, and the remaining basis of AB is completed in
    computational order, so B ends up in a product state.

    Args:
        psi: Tripartite pure state

    Returns:
        (unitary, report of the transformed state)

    Raises:
        RankTooLargeError: If rank(rho_C) > d_A
    """
    d_a, d_b, _ = psi.dims
    u_svd, singular, _ = scipy.linalg.svd(psi.ab_by_c(), full_matrices=True)
    rank = int(np.count_nonzero(singular**2 > get_numeric_config().rank_eps))
    if rank > d_a:
        raise RankTooLargeError(f"rank(rho_C) = {rank} exceeds d_A = {d_a}")

    targets = [n * d_b for n in range(rank)]
    taken = set(targets)
    targets += [i for i in range(d_a * d_b) if i not in taken]
    t = np.zeros((d_a * d_b, d_a * d_b), dtype=np.complex128)
    t[targets, np.arange(d_a * d_b)] = 1.0
    w = t @ u_svd.conj().T
    logger.debug("Rank-%d construction on %dx%d", rank, d_a, d_b)
    return w, mutual_info_report(apply_bipartite_unitary(psi, w))


def mutual_info_range(psi: TripartitePureState, i_max: float) -> tuple[float, float]:
    """Range (2 S_C - i_max, i_max) of I(A:C) over unitaries on AB.

    Raises:
        AsymmetricDimsError: If d_A != d_B
    """
    if psi.d_a != psi.d_b:
        raise AsymmetricDimsError(f"Need d_A == d_B, got {psi.d_a} and {psi.d_b}")
    m = psi.ab_by_c()
    s_c = float(entropy_from_eigenvalues(np.linalg.eigvalsh(_hermitize(m.T @ m.conj()))))
    return (2 * s_c - i_max, i_max)


def random_pure_state(
    dims: tuple[int, int, int], seed: int | None = None, rank_c: int | None = None
) -> TripartitePureState:
    """Haar-random pure state from normalized i.i.d. complex Gaussians.

    Args:
        dims: (d_A, d_B, d_C)
        seed: Seed, deterministic for a fixed value
        rank_c: If set, only the first ``rank_c`` levels of C are populated

    Returns:
        Normalized tripartite state

    Raises:
        DimensionMismatchError: If ``rank_c`` is outside [1, d_C]
    """
    d_a, d_b, d_c = dims
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal((d_a * d_b, d_c)) + 1j * rng.standard_normal((d_a * d_b, d_c))
    if rank_c is not None:
        if not 1 <= rank_c <= d_c:
            raise DimensionMismatchError(f"rank_c must lie in [1, {d_c}], got {rank_c}")
        amps[:, rank_c:] = 0.0
    return TripartitePureState.from_amplitudes(dims, amps.ravel())


def ghz_state(d: int = 2) -> TripartitePureState:
    """(1/sqrt d) sum_i |iii>."""
    amps = np.zeros(d**3, dtype=np.complex128)
    amps[[(i * d + i) * d + i for i in range(d)]] = 1.0
    return TripartitePureState.from_amplitudes((d, d, d), amps)


def product_state(dims: tuple[int, int, int]) -> TripartitePureState:
    """|000>."""
    amps = np.zeros(dims[0] * dims[1] * dims[2], dtype=np.complex128)
    amps[0] = 1.0
    return TripartitePureState(dims=dims, amps=amps)


def max_delta_s_over_unitaries(psi: TripartitePureState, unitaries: ArrayLike) -> float:
    """Largest S_A - S_B reached by any unitary of a batch applied on AB.

    Args:
        psi: Tripartite pure state
        unitaries: Array of shape (count, d_A d_B, d_A d_B)

    Returns:
        Best entropy difference, bits
    """
    d_a, d_b, _ = psi.dims
    us = np.asarray(unitaries, dtype=np.complex128)
    m = psi.ab_by_c()
    rho = m @ m.conj().T
    rotated = (us @ rho @ us.conj().transpose(0, 2, 1)).reshape(-1, d_a, d_b, d_a, d_b)
    rho_a = np.einsum("xijkj->xik", rotated)
    rho_b = np.einsum("xijil->xjl", rotated)
    s_a = entropy_from_eigenvalues(np.linalg.eigvalsh(rho_a))
    s_b = entropy_from_eigenvalues(np.linalg.eigvalsh(rho_b))
    return float(np.max(s_a - s_b))
