"""Exception hierarchy shared by all isotensor modules."""


class IsotensorError(Exception):
    """Base class for every error raised by this package."""


class OddRankError(IsotensorError, ValueError):
    pass


class SizeCapError(IsotensorError, ValueError):
    """A request would enumerate more pairings than the configured cap allows."""


class RangeError(IsotensorError, ValueError):
    pass


class PoleError(IsotensorError, ZeroDivisionError):
    """A rational function was evaluated at a zero of its denominator."""

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class DivisionByZeroError(IsotensorError, ZeroDivisionError):
    pass


class DimensionError(IsotensorError, ValueError):
    pass


class SpaceMismatchError(IsotensorError, ValueError):
    pass


class ContractionError(IsotensorError, ValueError):
    """An index structure the contraction engine cannot resolve."""


class DegenerateSpanError(IsotensorError, ValueError):
    def __init__(self, p):
        super().__init__(f"vectors are linearly dependent: Gram determinant D({p}) = 0")
        self.p = p


class LightlikeError(IsotensorError, ValueError):
    pass


class QuadratureError(IsotensorError, RuntimeError):
    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
