"""Disentangle-then-permute optimizer.

rho_AB is rotated into its eigenbasis (the disentangling unitary ``D``) so its
eigenvalues sit on the ``d_A x d_B`` computational lattice, and a basis
permutation ``U_s`` then rearranges them. Row sums of the lattice are the
spectrum of rho_A and column sums that of rho_B.
"""

import itertools
import logging
from collections import defaultdict, deque
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from qredist_sdk.exceptions import DimensionMismatchError, SearchTooLargeError, WrongDimsError
from qredist_sdk.models import (
    DensityMatrix,
    LatticeAssignment,
    Partition,
    PartitionInput,
    PartitionObjective,
    PermResult,
    Spectrum,
)
from qredist_sdk.npp import exhaustive_balanced, rgnp
from qredist_sdk.qlinalg import eig_hermitian
from qredist_sdk.states import entropy_from_eigenvalues, shannon_entropy

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 9
TIE_TOL = 1e-12
MAX_CYCLE = 3
# Lattice cells evaluated per vectorized batch of candidate moves
_CHUNK_CELLS = 1 << 22

# Inverse permutations over GF(2): cell (m, n) holds eigenvalue bits M @ (m, n) mod 2
_GF2_COSETS: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = (
    ((1, 0), (0, 1)),
    ((0, 1), (1, 0)),
    ((1, 0), (1, 1)),
    ((1, 1), (0, 1)),
    ((0, 1), (1, 1)),
    ((1, 1), (1, 0)),
)
_OPTIMAL_COSET = 4


def disentangle(
    rho_ab: DensityMatrix, d_a: int, d_b: int
) -> tuple[NDArray[np.complex128], Spectrum]:
    """Unitary D that diagonalizes rho_AB with eigenvalues descending.

    Returns:
        (D, spectrum) with ``D rho D^dagger = diag(spectrum.probs)``

    Raises:
        DimensionMismatchError: If rho_AB is not (d_a d_b)-dimensional
    """
    if rho_ab.dim != d_a * d_b:
        raise DimensionMismatchError(f"rho_AB of dim {rho_ab.dim} does not match {d_a}x{d_b}")
    eig = eig_hermitian(rho_ab.mat)
    probs = np.clip(eig.values, 0.0, None)
    probs = probs / probs.sum()
    spectrum = Spectrum(d_a=d_a, d_b=d_b, probs=probs, eigvecs=eig.vectors)
    return eig.vectors.conj().T, spectrum


def coset_representatives_d2() -> list[NDArray[np.int64]]:
    """The six GF(2) matrices representing the right cosets of S_2 x S_2 in S_4."""
    return [np.array(m) for m in _GF2_COSETS]


def gf2_assignment(matrix: ArrayLike) -> LatticeAssignment:
    """2x2 layout whose cell (m, n) holds eigenvalue index ``2 i + j``, ``(i, j) = M (m, n)``."""
    mat = np.asarray(matrix, dtype=np.int64)
    order = []
    for m, n in itertools.product(range(2), repeat=2):
        i, j = (mat @ np.array([m, n])) % 2
        order.append(2 * int(i) + int(j))
    return LatticeAssignment.from_cell_order(order, 2, 2)


def apply_assignment(spectrum: Spectrum, s: LatticeAssignment) -> PermResult:
    """Place the spectrum on the lattice and evaluate the marginals.

    Raises:
        DimensionMismatchError: If the layout and spectrum dims differ
    """
    if (s.d_a, s.d_b) != (spectrum.d_a, spectrum.d_b):
        raise DimensionMismatchError(
            f"Layout {s.d_a}x{s.d_b} does not match spectrum {spectrum.d_a}x{spectrum.d_b}"
        )
    occupation = s.occupation(spectrum.probs)
    row_sums = occupation.sum(axis=1)
    col_sums = occupation.sum(axis=0)
    s_a = shannon_entropy(row_sums)
    s_b = shannon_entropy(col_sums)
    return PermResult(
        assignment=s,
        row_sums=tuple(row_sums.tolist()),
        col_sums=tuple(col_sums.tolist()),
        s_a=s_a,
        s_b=s_b,
        delta_s=s_a - s_b,
        unitary=s.permutation_matrix() @ spectrum.eigvecs.conj().T,
    )


@lru_cache(maxsize=8)
def enumerate_assignments(d_a: int, d_b: int) -> NDArray[np.int8]:
    """Every layout as a row of eigenvalue indices in row-major cell order.

    Raises:
        SearchTooLargeError: If d_a * d_b > 9
    """
    n = d_a * d_b
    if n > EXHAUSTIVE_LIMIT:
        raise SearchTooLargeError(f"{n}! layouts are too many to enumerate")
    table = np.array(list(itertools.permutations(range(n))), dtype=np.int8)
    table.setflags(write=False)
    logger.debug("Enumerated %d layouts for %dx%d", table.shape[0], d_a, d_b)
    return table


def _first_best(values: NDArray[np.float64]) -> int:
    return int(np.flatnonzero(values >= values.max() - TIE_TOL)[0])


def exhaustive_search(spectrum: Spectrum) -> PermResult:
    """Best layout over all permutations.

    At 2x2 the six coset representatives are scanned; otherwise every layout
    is. Ties go to the first layout in enumeration order.

    Raises:
        SearchTooLargeError: If d_a * d_b > 9
    """
    if (spectrum.d_a, spectrum.d_b) == (2, 2):
        results = [apply_assignment(spectrum, gf2_assignment(m)) for m in _GF2_COSETS]
        best = _first_best(np.array([r.delta_s for r in results]))
        return results[best]

    table = enumerate_assignments(spectrum.d_a, spectrum.d_b)
    occupation = spectrum.probs[table].reshape(-1, spectrum.d_a, spectrum.d_b)
    delta = entropy_from_eigenvalues(occupation.sum(axis=2)) - entropy_from_eigenvalues(
        occupation.sum(axis=1)
    )
    best = _first_best(delta)
    return apply_assignment(
        spectrum, LatticeAssignment.from_cell_order(table[best], spectrum.d_a, spectrum.d_b)
    )


def closed_form_d2(spectrum: Spectrum) -> PermResult:
    """Optimal 2x2 layout: rows {p1, p4} and {p2, p3}.

    Raises:
        WrongDimsError: Unless d_a = d_b = 2
    """
    if (spectrum.d_a, spectrum.d_b) != (2, 2):
        raise WrongDimsError(f"closed form needs 2x2, got {spectrum.d_a}x{spectrum.d_b}")
    return apply_assignment(spectrum, gf2_assignment(_GF2_COSETS[_OPTIMAL_COSET]))


def rgnp_two_step(spectrum: Spectrum) -> PermResult:
    """Balance the row sums with rgnp, then sort every row descending.

    Rows are ordered by descending sum; the j-th largest element of a row goes
    to column j. Equal eigenvalues are placed in index order.
    """
    d_a, d_b = spectrum.d_a, spectrum.d_b
    partition = rgnp(PartitionInput(numbers=spectrum.probs.tolist(), k=d_a, per_set=d_b))
    queues: dict[float, deque[int]] = defaultdict(deque)
    for index, p in enumerate(spectrum.probs.tolist()):
        queues[p].append(index)
    order = [queues[x].popleft() for row in partition.sets for x in row]
    return apply_assignment(spectrum, LatticeAssignment.from_cell_order(order, d_a, d_b))


@lru_cache(maxsize=4)
def _cycle_moves(n: int, length: int) -> tuple[NDArray[np.intp], NDArray[np.intp]]:
    """Cells touched by every ``length``-cycle of ``n`` cells and where each takes its value."""
    positions, sources = [], []
    for cells in itertools.combinations(range(n), length):
        for shift in range(1, length):
            positions.append(cells)
            sources.append(cells[shift:] + cells[:shift])
    return np.array(positions, dtype=np.intp), np.array(sources, dtype=np.intp)


def _best_move(
    probs: NDArray[np.float64], order: NDArray[np.intp], d_a: int, d_b: int, length: int
) -> tuple[float, NDArray[np.intp]]:
    positions, sources = _cycle_moves(order.size, length)
    step = max(1, _CHUNK_CELLS // order.size)
    best_value, best_order = -np.inf, order
    for lo in range(0, positions.shape[0], step):
        moved, taken = positions[lo : lo + step], sources[lo : lo + step]
        table = np.tile(order, (moved.shape[0], 1))
        table[np.arange(moved.shape[0])[:, None], moved] = order[taken]
        occupation = probs[table].reshape(-1, d_a, d_b)
        delta = entropy_from_eigenvalues(occupation.sum(axis=2)) - entropy_from_eigenvalues(
            occupation.sum(axis=1)
        )
        i = int(np.argmax(delta))
        if delta[i] > best_value:
            best_value, best_order = float(delta[i]), table[i]
    return best_value, best_order


def refine_layout(
    spectrum: Spectrum,
    s: LatticeAssignment,
    max_cycle: int = MAX_CYCLE,
    max_moves: int | None = None,
) -> PermResult:
    """Steepest ascent of delta_s over cyclic moves of lattice cells, starting at ``s``.

    Each step scans every transposition of two cells and applies the best one.
    When no transposition raises delta_s by more than ``TIE_TOL``, 3-cycles are
    scanned the same way (with ``max_cycle=3``); any accepted move returns the
    search to transpositions. A move may lower S_A when it lowers S_B further,
    so the rows of the result need not be a balanced partition any more.

    Args:
        spectrum: Descending spectrum of rho_AB
        s: Starting layout
        max_cycle: Longest cycle scanned, 2 or 3
        max_moves: Cap on accepted moves, defaults to ``(d_a d_b)**2``

    Returns:
        Layout with delta_s at least that of ``s``

    Raises:
        DimensionMismatchError: If the layout and spectrum dims differ
        ValueError: If ``max_cycle`` is not 2 or 3
    """
    if max_cycle not in (2, 3):
        raise ValueError(f"max_cycle must be 2 or 3, got {max_cycle}")
    start = apply_assignment(spectrum, s)
    d_a, d_b = spectrum.d_a, spectrum.d_b
    n = d_a * d_b
    if n < 2:
        return start

    cap = n * n if max_moves is None else max_moves
    order = np.array(s.cell_order(), dtype=np.intp)
    current = start.delta_s
    length, moves = 2, 0
    while moves < cap:
        value, candidate = _best_move(spectrum.probs, order, d_a, d_b, min(length, n))
        if value > current + TIE_TOL:
            order, current = candidate, value
            moves += 1
            length = 2
        elif length < min(max_cycle, n):
            length += 1
        else:
            break
    logger.debug(
        "Refined %dx%d layout in %d moves: delta_s %.10f -> %.10f",
        d_a,
        d_b,
        moves,
        start.delta_s,
        current,
    )
    if moves == 0:
        return start
    return apply_assignment(spectrum, LatticeAssignment.from_cell_order(order, d_a, d_b))


def rgnp_refined(spectrum: Spectrum, max_cycle: int = MAX_CYCLE) -> PermResult:
    """:func:`rgnp_two_step` followed by :func:`refine_layout`."""
    return refine_layout(spectrum, rgnp_two_step(spectrum).assignment, max_cycle)


def row_partition(spectrum: Spectrum, s: LatticeAssignment) -> Partition:
    """Rows of a layout as a partition of the spectrum (each row descending)."""
    occupation = s.occupation(spectrum.probs)
    rows = [tuple(sorted(row.tolist(), reverse=True)) for row in occupation]
    return Partition(sets=sorted(rows, key=sum, reverse=True))


def majorizes(x: ArrayLike, y: ArrayLike, tol: float = 1e-12) -> bool:
    """Whether ``x`` majorizes ``y`` (partial sums of sorted x dominate those of y)."""
    xs = np.sort(np.asarray(x, dtype=np.float64))[::-1]
    ys = np.sort(np.asarray(y, dtype=np.float64))[::-1]
    if xs.shape != ys.shape or abs(xs.sum() - ys.sum()) > tol:
        return False
    return bool(np.all(np.cumsum(xs) >= np.cumsum(ys) - tol))


_OBJECTIVE_SCORES: dict[PartitionObjective, Callable[[Partition], float]] = {
    PartitionObjective.MIN_MAX_SUM: lambda p: -p.max_sum,
    PartitionObjective.MAX_MIN_SUM: lambda p: p.min_sum,
    PartitionObjective.MAX_ENTROPY_OF_SUMS: lambda p: p.sum_entropy(),
}


def matched_objectives(spectrum: Spectrum, s: LatticeAssignment) -> list[PartitionObjective]:
    """Partition objectives under which the rows of a layout are optimal.

    The rows are scored against :func:`~qredist_sdk.npp.exhaustive_balanced`
    for each objective, so the spectrum is limited to 16 eigenvalues.

    Raises:
        InstanceTooLargeError: If the spectrum has more than 16 eigenvalues
    """
    rows = row_partition(spectrum, s)
    problem = PartitionInput(numbers=spectrum.probs.tolist(), k=spectrum.d_a, per_set=spectrum.d_b)
    matched = []
    for objective, score in _OBJECTIVE_SCORES.items():
        best = exhaustive_balanced(problem, objective)
        if score(rows) >= score(best) - TIE_TOL:
            matched.append(objective)
    logger.debug("Layout rows optimal for %s", [o.value for o in matched])
    return matched
