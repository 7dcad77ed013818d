"""Exception hierarchy shared by all vcsample modules."""


class VCSampleError(Exception):
    """Base class for all package errors."""


class ValidationError(VCSampleError, ValueError):
    """Input data or configuration violates an invariant."""


class InvalidData(ValidationError):
    pass


class EmptyDataset(ValidationError):
    pass


class InvalidArgument(ValidationError):
    pass


class ConfigMismatch(ValidationError):
    pass


class GridTooFine(ValidationError):
    pass


class RadiusExceedsCell(ValidationError):
    pass


class TooManySamples(ValidationError):
    pass


class InsufficientSupport(ValidationError):
    pass


class NoValueDimensions(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class AlreadySampled(VCSampleError):
    pass


class NotSampled(VCSampleError):
    pass


class EmptyLocalSample(VCSampleError):
    """A point has no sampled neighbors, so its sampled CDF is undefined."""


class OptimizationNotConverged(VCSampleError):
    """The cluster/void exchange loop hit its iteration cap.

    The sampler state attached as ``state`` is still consistent.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class ThresholdNotReached(VCSampleError):
    pass


class FormatError(VCSampleError, ValueError):
    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
