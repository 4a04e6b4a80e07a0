"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class ShapeError(ValueError):
    """Matrix or vector dimensions do not conform."""


class RankDeficientError(ValueError):
    """A proposed basis does not span a subspace of the required dimension."""


class NotIsotropicError(ValueError):
    """A proposed subspace is not isotropic for the symplectic form."""


class ResourceLimitError(RuntimeError):
    """An enumeration would exceed the configured size cap."""


class ConsistencyError(RuntimeError):
    """Two independent computations of the same fact disagree.

    This always indicates an internal arithmetic bug and is never caught
    as part of normal control flow.
    """


class VerificationFailure(RuntimeError):
    """A structural cross-check (divisibility, label constancy) failed."""
