"""Custom exceptions for qredist SDK."""


class QRedistError(Exception):
    """Base exception for all qredist errors."""

    pass


# Linear algebra


class NonSquareError(QRedistError, ValueError):
    """Matrix is not square."""

    pass


class NonHermitianError(QRedistError, ValueError):
    """Matrix violates the Hermitian symmetry tolerance."""

    pass


class DimensionMismatchError(QRedistError, ValueError):
    """Operand shapes do not agree with the declared subsystem dimensions."""

    pass


class NotUnitaryError(QRedistError, ValueError):
    """Matrix violates the unitarity tolerance."""

    pass


# States


class InvalidDensityError(QRedistError, ValueError):
    """Matrix is not a valid density matrix (trace, Hermiticity or positivity)."""

    pass


class RankTooLargeError(QRedistError, ValueError):
    """Rank of rho_C exceeds d_A, so the entropy-difference ceiling is unreachable."""

    pass


class AsymmetricDimsError(QRedistError, ValueError):
    """Operation requires d_A == d_B."""

    pass


# Number partitioning


class TooFewNumbersError(QRedistError, ValueError):
    """Fewer numbers than requested sets."""

    pass


class NotRectangularError(QRedistError, ValueError):
    """Number count is not k_A * k_B."""

    pass


class IterationCapExceededError(QRedistError, RuntimeError):
    """Recurrent partitioning did not finish within its iteration cap."""

    pass


class InstanceTooLargeError(QRedistError, ValueError):
    """Instance is too large for exhaustive enumeration."""

    pass


# Permutation search


class SearchTooLargeError(QRedistError, ValueError):
    """Lattice is too large for exhaustive permutation search."""

    pass


class WrongDimsError(QRedistError, ValueError):
    """Operation is only defined for specific subsystem dimensions."""

    pass


# Gradient descent


class LengthMismatchError(QRedistError, ValueError):
    """Parameter vector length does not match the generator basis."""

    pass


class InvalidSpectrumError(QRedistError, ValueError):
    """Probability vector is not a valid (sorted, normalized) spectrum."""

    pass


# Experiments


class ConfigInvalidError(QRedistError, ValueError):
    """Run configuration is inconsistent."""

    pass


class SummaryInvalidError(QRedistError, ValueError):
    """Stored run summary cannot be read back."""

    pass
