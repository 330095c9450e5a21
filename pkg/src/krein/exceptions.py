"""Exception types shared across the package."""


class KreinError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(KreinError, ValueError):
    """Operands have incompatible shapes or lengths."""


class InvalidPointError(KreinError, ValueError):
    """A point violates the invariants of its space."""


class DomainError(KreinError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(KreinError, ValueError):
    """A scalar parameter is out of range (e.g. a non-positive bandwidth)."""


class SpaceMismatchError(KreinError, TypeError):
    """A kernel was evaluated on points of the wrong space."""


class SingularShiftError(KreinError, ValueError):
    """A shifted linear solve hit an eigenvalue of the matrix.

    The offending eigenvalue is stored in ``eigenvalue``.
    """

    def __init__(self, shift: float, eigenvalue: float):
        self.shift = shift
        self.eigenvalue = eigenvalue
        super().__init__(
            f"shift {shift!r} collides with eigenvalue {eigenvalue!r} "
            f"(|eigenvalue + shift| below tolerance)"
        )


class ConvergenceError(KreinError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class ConfigError(KreinError, ValueError):
    """An experiment configuration document is malformed."""
