"""Exception hierarchy.

Every error derives from CarpetError and carries an ``exit_code`` that the
command-line front end maps onto its process status: 2 for bad input, 3 for
numerical failure.
"""


class CarpetError(Exception):
    exit_code = 3


class ConfigError(CarpetError):
    exit_code = 2


class BadParams(ConfigError):
    pass


class UnboundState(ConfigError):
    pass


class EmptyPacket(ConfigError):
    pass


class NotISW(ConfigError):
    pass


class OutOfDomain(ConfigError):
    pass


class NumericalError(CarpetError):
    exit_code = 3


class ComplexLeak(NumericalError):
    pass


class ForbiddenRegion(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NoBoundState(NumericalError):
    pass


class ProjectionFail(NumericalError):
    pass


class QuadratureFail(NumericalError):
    pass


class RecurrenceMismatch(NumericalError):
    pass


class BoundaryTooClose(NumericalError):
    pass


class ImaginaryRoot(NumericalError):
    pass


class RegimeError(NumericalError):
    pass


class TurningPointTooClose(NumericalError):
    pass


class VelocityZeroCrossing(NumericalError):
    pass


class NoZeroPoint(NumericalError):
    pass


class ErfOverflow(NumericalError):
    pass
