"""Exception types raised by warpflow."""


class WarpFlowError(Exception):
    """Base class for all package errors."""


class OutOfDomain(WarpFlowError, ValueError):
    pass


class DegeneratePotential(WarpFlowError, ValueError):
    pass


class OutOfRange(WarpFlowError, ValueError):
    pass


class NotSpaceform(WarpFlowError, ValueError):
    pass


class InconsistentCurvature(WarpFlowError, ValueError):
    pass


class BoundsViolation(WarpFlowError, ArithmeticError):
    """The maximum-principle envelope of the initial data was left."""


class OffGridAxis(WarpFlowError, ValueError):
    pass


class InvalidOffset(WarpFlowError, ValueError):
    pass


class PoleCrossing(WarpFlowError, ValueError):
    pass


class StalledTheta(WarpFlowError, ArithmeticError):
    pass


class ConfigError(WarpFlowError, ValueError):
    pass
