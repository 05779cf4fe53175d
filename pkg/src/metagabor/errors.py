"""Exception hierarchy shared by all modules."""


class MetagaborError(Exception):
    """Base class for all library errors."""


class DimensionError(MetagaborError, ValueError):
    """Array shapes or half-dimensions do not match."""


class NotSymplecticError(MetagaborError, ValueError):
    """A matrix fails the symplectic test.

    ``relation`` names the first violated block relation when known.
    """

    def __init__(self, message, residual=None, relation=None):
        super().__init__(message)
        self.residual = residual
        self.relation = relation


class InvalidFactorError(MetagaborError, ValueError):
    """A generator factor violates its invariants (singular E, asymmetric C)."""


class NotShiftInvertibleError(MetagaborError, ValueError):
    """The block E of a 4d x 4d symplectic matrix is (numerically) singular."""


class FactorizationError(MetagaborError, RuntimeError):
    """No regularizing chirp could be found for a free factorization."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class GridMismatchError(MetagaborError, ValueError):
    """Two signals live on different grids."""


class OffLatticeError(MetagaborError, ValueError):
    """A phase-space point does not land on the sampling grid."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class LatticeIncompatibleError(OffLatticeError):
    """A lattice (or its image under E^{-1}) leaves the phase grid."""


class NotCovariantError(MetagaborError, ValueError):
    """The matrix does not have the covariant block pattern."""


class ConditioningError(MetagaborError, ValueError):
    """A normalizing quantity is too close to zero."""


class NotAFrameError(MetagaborError, ValueError):
    """The frame operator is numerically singular."""
