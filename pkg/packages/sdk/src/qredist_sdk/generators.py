"""Hermitian generator bases for bipartite unitaries.

Each subsystem gets the generalized Gell-Mann matrices with the identity
prepended (index 0). For a qubit these are the Pauli matrices
(sigma_0, sigma_x, sigma_y, sigma_z); for a qutrit lambda_1 ... lambda_8 in
the standard order. Bipartite generators are the tensor products
``F_j x F_k`` for every label ``(j, k) != (0, 0)``.
"""

from functools import cached_property, lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray

from qredist_sdk.exceptions import DimensionMismatchError, LengthMismatchError


@lru_cache(maxsize=16)
def gell_mann(d: int) -> NDArray[np.complex128]:
    """Identity followed by the d^2 - 1 generalized Gell-Mann matrices.

    For each column ``k = 1 .. d-1`` the symmetric and antisymmetric matrices
    of every pair ``(j, k)``, ``j < k``, come first, then the k-th diagonal one.

    Returns:
        Array of shape (d^2, d, d)
    """
    if d < 1:
        raise DimensionMismatchError(f"Dimension must be positive, got {d}")
    mats = [np.eye(d, dtype=np.complex128)]
    for k in range(1, d):
        for j in range(k):
            sym = np.zeros((d, d), dtype=np.complex128)
            sym[j, k] = sym[k, j] = 1.0
            anti = np.zeros((d, d), dtype=np.complex128)
            anti[j, k], anti[k, j] = -1j, 1j
            mats += [sym, anti]
        diag = np.zeros(d)
        diag[:k] = 1.0
        diag[k] = -k
        mats.append(np.diag(np.sqrt(2 / (k * (k + 1))) * diag).astype(np.complex128))
    stack = np.array(mats)
    stack.setflags(write=False)
    return stack


class GeneratorBasis:
    """Tensor-product generator basis on a d_a x d_b system.

    Example:
        >>> basis = GeneratorBasis(2)
        >>> len(basis)
        15
        >>> basis.labels[:3]
        [(0, 1), (0, 2), (0, 3)]
    """

    def __init__(self, d_a: int, d_b: int | None = None) -> None:
        """Initialize the basis.

        Args:
            d_a: Dimension of A
            d_b: Dimension of B, defaults to ``d_a``
        """
        self.d_a = d_a
        self.d_b = d_a if d_b is None else d_b
        self.factors_a = gell_mann(self.d_a)
        self.factors_b = gell_mann(self.d_b)
        self.labels: list[tuple[int, int]] = [
            (j, k) for j in range(self.d_a**2) for k in range(self.d_b**2) if (j, k) != (0, 0)
        ]

    @classmethod
    def pauli(cls) -> "GeneratorBasis":
        """sigma_m x sigma_n basis on two qubits, labels (m, n) with m, n in 0..3."""
        return cls(2, 2)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"GeneratorBasis(d_a={self.d_a}, d_b={self.d_b}, size={len(self)})"

    @property
    def dim(self) -> int:
        """Dimension d_a * d_b of the matrices."""
        return self.d_a * self.d_b

    def index_of(self, label: tuple[int, int]) -> int:
        """Position of generator ``F_j x F_k`` in parameter vectors."""
        return self.labels.index((int(label[0]), int(label[1])))

    @cached_property
    def gens(self) -> NDArray[np.complex128]:
        """All generators as an array of shape (len, dim, dim)."""
        full = np.einsum("jab,kcd->jkacbd", self.factors_a, self.factors_b)
        return full.reshape(-1, self.dim, self.dim)[1:]

    def _coefficients(self, h: ArrayLike) -> NDArray[np.float64]:
        values = np.asarray(h, dtype=np.float64)
        if values.shape != (len(self),):
            raise LengthMismatchError(f"Expected {len(self)} parameters, got shape {values.shape}")
        return np.concatenate(([0.0], values)).reshape(self.d_a**2, self.d_b**2)

    def hamiltonian(self, h: ArrayLike) -> NDArray[np.complex128]:
        """sum_a h_a G_a.

        Raises:
            LengthMismatchError: If ``h`` does not have one entry per generator
        """
        c = self._coefficients(h)
        h4 = np.einsum("jk,jab,kcd->acbd", c, self.factors_a, self.factors_b, optimize=True)
        return h4.reshape(self.dim, self.dim)

    def traces_with(self, x: ArrayLike) -> NDArray[np.complex128]:
        """Tr(G_a x) for every generator, in label order."""
        x4 = np.asarray(x, dtype=np.complex128).reshape(self.d_a, self.d_b, self.d_a, self.d_b)
        t = np.einsum("jab,kcd,bdac->jk", self.factors_a, self.factors_b, x4, optimize=True)
        return t.reshape(-1)[1:]
