"""Dense complex linear algebra used throughout qredist.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every public
function validates its inputs against the tolerances of
:func:`qredist_sdk.config.get_numeric_config` and raises a
:class:`~qredist_sdk.exceptions.QRedistError` subclass on violation.
"""

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.stats import unitary_group

from qredist_sdk.config import get_numeric_config
from qredist_sdk.exceptions import (
    DimensionMismatchError,
    NonHermitianError,
    NonSquareError,
    NotUnitaryError,
)
from qredist_sdk.models import HermitianEigen, Subsystem

CArray = NDArray[np.complex128]


def as_matrix(a: ArrayLike) -> CArray:
    """Coerce to a complex 2-d array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatchError(f"Expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("Matrix has non-finite entries")
    return m


def frobenius_norm(a: ArrayLike) -> float:
    return float(np.linalg.norm(np.asarray(a), "fro"))


def hermitian_part(a: ArrayLike) -> CArray:
    """Return (a + a^dagger) / 2."""
    m = as_matrix(a)
    return (m + m.conj().T) / 2


def check_square(a: CArray) -> None:
    """Raise NonSquareError unless ``a`` is square."""
    if a.shape[0] != a.shape[1]:
        raise NonSquareError(f"Matrix must be square, got shape {a.shape}")


def check_hermitian(a: CArray, tol: float | None = None) -> None:
    """Raise NonHermitianError if ||a - a^dagger||_F > tol * max(1, ||a||_F).

    Args:
        a: Square matrix
        tol: Relative tolerance, defaults to ``NumericConfig.hermitian_tol``
    """
    check_square(a)
    tol = get_numeric_config().hermitian_tol if tol is None else tol
    deviation = frobenius_norm(a - a.conj().T)
    if deviation > tol * max(1.0, frobenius_norm(a)):
        raise NonHermitianError(f"Matrix is not Hermitian (||a - a^dagger||_F = {deviation:.3e})")


def is_unitary(u: ArrayLike, tol: float | None = None) -> bool:
    """Whether ||u^dagger u - I||_F <= tol."""
    m = np.asarray(u, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    tol = get_numeric_config().unitary_tol if tol is None else tol
    return frobenius_norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def check_unitary(u: CArray, dim: int | None = None, tol: float | None = None) -> None:
    """Raise unless ``u`` is a ``dim`` x ``dim`` unitary.

    Raises:
        DimensionMismatchError: If the shape is not (dim, dim)
        NotUnitaryError: If the unitarity tolerance is violated
    """
    if dim is not None and u.shape != (dim, dim):
        raise DimensionMismatchError(f"Expected a {dim}x{dim} unitary, got shape {u.shape}")
    check_square(u)
    if not is_unitary(u, tol):
        raise NotUnitaryError("Matrix is not unitary within tolerance")


def eigh_descending(a: CArray) -> tuple[NDArray[np.float64], CArray]:
    """Unchecked Hermitian eigensolver returning eigenvalues in descending order."""
    values, vectors = scipy.linalg.eigh(a)
    return values[::-1].copy(), vectors[:, ::-1].copy()


def eig_hermitian(a: ArrayLike) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with eigenvalues descending.

    Degenerate eigenspaces get an arbitrary orthonormal basis.

    Args:
        a: Hermitian matrix

    Returns:
        HermitianEigen with ``V diag(values) V^dagger == a``

    Raises:
        NonSquareError: If ``a`` is not square
        NonHermitianError: If ``a`` violates the Hermitian tolerance
    """
    m = as_matrix(a)
    check_hermitian(m)
    values, vectors = eigh_descending((m + m.conj().T) / 2)
    return HermitianEigen(values=values, vectors=vectors)


def kron(a: ArrayLike, b: ArrayLike) -> CArray:
    """Kronecker product, ``kron(a, b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(rho: ArrayLike, dims: tuple[int, int], keep: Subsystem) -> CArray:
    """Trace out one factor of a bipartite operator.

    Args:
        rho: (d1*d2) x (d1*d2) operator
        dims: (d1, d2)
        keep: Which factor survives

    Returns:
        d1 x d1 (keep FIRST) or d2 x d2 (keep SECOND) operator

    Raises:
        DimensionMismatchError: If ``rho`` does not match ``dims``
    """
    m = as_matrix(rho)
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatchError(f"Operator of shape {m.shape} does not match dims {dims}")
    t = m.reshape(d1, d2, d1, d2)
    if keep is Subsystem.FIRST:
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def expm_i_hermitian(h: ArrayLike) -> CArray:
    """Return exp(i h) = V diag(exp(i values)) V^dagger for Hermitian ``h``.

    Raises:
        NonHermitianError: If ``h`` violates the Hermitian tolerance
    """
    m = as_matrix(h)
    check_hermitian(m)
    values, vectors = eigh_descending((m + m.conj().T) / 2)
    return (vectors * np.exp(1j * values)) @ vectors.conj().T


def random_unitaries(dim: int, count: int, seed: int | None = None) -> NDArray[np.complex128]:
    """Draw Haar-random unitaries.

    Args:
        dim: Matrix size
        count: Number of unitaries
        seed: Seed for reproducibility

    Returns:
        Array of shape (count, dim, dim)
    """
    rng = np.random.default_rng(seed)
    if dim == 1:
        return np.exp(2j * np.pi * rng.random(count)).reshape(count, 1, 1)
    samples = unitary_group.rvs(dim, size=count, random_state=rng)
    return np.asarray(samples, dtype=np.complex128).reshape(count, dim, dim)
