"""Exception hierarchy for the obstruction engine."""


class ObstructionError(Exception):
    """Base class for every failure raised by the engine."""


class DomainError(ObstructionError, ValueError):
    """Input outside the domain of an operation (bad degree, shape, range)."""


class PreconditionError(DomainError):
    """A documented precondition of an operation does not hold."""


class OutsideHypothesesError(DomainError):
    """The manifold description falls outside every supported dimension regime."""


class NotRingMapError(ObstructionError):
    """Generator images (or a matrix family) do not respect the ring relations."""

    def __init__(self, message: str, generator: str = None):
        super().__init__(message)
        self.generator = generator


class NotInvertibleError(ObstructionError):
    """A matrix that must be unimodular has determinant other than +1 or -1."""

    def __init__(self, message: str, degree: int = None):
        super().__init__(message)
        self.degree = degree


class UnresolvedGroupingError(ObstructionError):
    """Two distinct eigenvalue moduli fell inside one grouping window."""


class NonSplitJordanBlockError(ObstructionError):
    """The eigenvalue-1 part of an isometry is not semisimple."""


class NonIsolatedFixedPointsError(ObstructionError):
    """det(A^l - I) vanishes, so periodic points are not isolated."""

    def __init__(self, message: str, period: int = None):
        super().__init__(message)
        self.period = period


class SearchBoundExceededError(ObstructionError):
    """A bounded search ran past its configured limit."""


class OracleMismatchError(ObstructionError):
    """Independent counting paths disagree."""

    def __init__(self, message: str, period: int = None):
        super().__init__(message)
        self.period = period


class InvariantViolation(ObstructionError):
    """An internal consistency check failed."""


class SpecFormatError(DomainError):
    """A JSON input file is malformed or fails schema validation."""
