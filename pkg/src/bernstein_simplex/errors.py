"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition.

    The CLI maps this to exit code 1.
    """


class SizeLimitError(RuntimeError):
    """Raised when a lattice enumeration would exceed the configured size cap.

    The CLI maps this to exit code 2.
    """
