"""Exception hierarchy shared by every module."""


class QGTError(Exception):
    """Base class for all library errors."""


class HalfPowerUnavailable(QGTError):
    pass


class ExactModeUnsupported(QGTError):
    pass


class LengthMismatch(QGTError):
    pass


class CoincidentPoints(QGTError):
    pass


class ZeroPoint(QGTError):
    pass


class CoincidentOrbit(QGTError):
    pass


class BadShape(QGTError):
    pass


class NonConvergedQuadrature(QGTError):
    pass


class DomainViolation(QGTError):
    pass


class PoleNeighborhood(DomainViolation):
    pass


class ApparentSingularity(QGTError):
    pass


class NotConverged(QGTError):
    pass


class GridTooCoarse(QGTError):
    pass
