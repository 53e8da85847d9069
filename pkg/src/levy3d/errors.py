"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when arguments violate a documented precondition."""


class DiagnosticError(RuntimeError):
    """Raised when a computation produced no usable result (degenerate data,
    singular system, too few samples in a fit window)."""
