"""Exception hierarchy shared by all modules."""


class RadboundError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(RadboundError, ValueError):
    """Invalid geometric input: bad dimension, non-unit vector, and so on."""


class UnboundedModelRadius(GeometryError):
    """The model radius is infinite (flat space with zero curvature bound)."""


class InadmissibleError(RadboundError, ValueError):
    """Arguments fall outside the admissible domain of a formula."""


class EmptyBodyError(GeometryError):
    """A ball intersection has empty interior."""


class ConvergenceError(RadboundError, RuntimeError):
    """An iterative solver failed to converge.

    ``best`` carries the best iterate found, when there is one.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class HypothesisViolation(RadboundError, ValueError):
    """Input data does not satisfy the hypothesis of a check."""


class BodyFileError(RadboundError, ValueError):
    """A body file could not be parsed; message names the offending field."""
