"""Exception types shared across the package."""


class VdfLabError(Exception):
    """Base class for all package errors."""


class InputError(VdfLabError):
    """Malformed argument, file, or out-of-range vertex."""


class ZeroMassError(VdfLabError):
    """Conditioning on a set of total weight zero."""


class ContractError(VdfLabError):
    """A mathematical precondition of an operation is violated."""


class ResourceLimitError(VdfLabError):
    """An explicit enumeration cap was exceeded.

    ``partial`` optionally carries whatever was computed before the cap hit.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class RetryLimitError(VdfLabError):
    """A randomized construction failed after its retry budget.

    ``diagnostics`` records which clause failed on each attempt.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class EmptyPropertyError(VdfLabError):
    """No graph on the given vertex count satisfies the property."""
