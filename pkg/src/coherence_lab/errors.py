"""Exception hierarchy shared by all modules."""


class CoherenceLabError(ValueError):
    """Base class for validation errors raised by coherence_lab."""


class DimensionError(CoherenceLabError):
    """Subsystem dimensions are invalid, mismatched or exceed the cap."""


class NormalizationError(CoherenceLabError):
    """A state, weight list or coefficient list is not normalized."""


class NotPhysicalError(CoherenceLabError):
    """A matrix is not Hermitian, not positive semidefinite or not unit trace."""


class NonUnitaryError(CoherenceLabError):
    """An operator expected to be unitary is not."""


class ZeroBranchError(CoherenceLabError):
    """A projection left (numerically) nothing of the state."""


class SchemaError(CoherenceLabError):
    """A state file does not follow the expected JSON layout."""
