"""Exception hierarchy shared by every dslab module."""


class DSLabError(Exception):
    """Base class for all library errors."""


class InvalidFieldError(DSLabError, ValueError):
    """Field data has the wrong shape or contains NaN/Inf."""


class GridMismatchError(DSLabError, ValueError):
    """Two fields that must share a grid do not."""


class UnsolvableConstraintError(DSLabError, ValueError):
    """A d or dbar constraint has a right side with nonzero mean."""


class InvalidParameterError(DSLabError, ValueError):
    pass


class GaugeNotHolomorphicError(DSLabError, ValueError):
    pass


class NonClosedFormError(DSLabError, ValueError):
    pass


class DegenerateImmersionError(DSLabError, ValueError):
    def __init__(self, message: str, index: tuple[int, int] | None = None):
        super().__init__(message)
        self.index = index


class InvalidReductionError(DSLabError, ValueError):
    pass


class SingularChartError(DSLabError, ValueError):
    pass


class DegeneratePointError(DSLabError, ValueError):
    def __init__(self, message: str, index: tuple[int, int] | None = None):
        super().__init__(message)
        self.index = index


class MissingAuxError(DSLabError, ValueError):
    pass


class DivergenceError(DSLabError, RuntimeError):
    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class ConfigError(DSLabError, ValueError):
    pass
