"""Exception types shared across the package."""


class ResourceError(RuntimeError):
    """A computation would exceed its configured size or memory budget."""


class InvariantViolation(AssertionError):
    """A checked mathematical identity or bound failed to hold."""
