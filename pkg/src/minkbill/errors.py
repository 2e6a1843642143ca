"""Exception types shared by the geometry, capacity, flow and products modules."""


class BilliardError(Exception):
    """Base class for every error raised by minkbill."""


class InvalidArgument(BilliardError, ValueError):
    pass


class InvalidBody(BilliardError, ValueError):
    """The polygon does not satisfy a body requirement (e.g. origin in interior)."""


class NotOnBoundary(BilliardError, ValueError):
    pass


class PreconditionViolated(BilliardError, ValueError):
    pass


class NoCrossing(BilliardError, ValueError):
    """The systolic ratio does not cross 1 between the sweep endpoints."""


class UndefinedCone(BilliardError):
    """The driving normal cone of the flow is not a single ray."""


class CornerHit(BilliardError):
    """A flow ray landed on (or within tolerance of) a vertex."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class UnfoldUnsupported(BilliardError):
    pass


class InternalError(BilliardError, RuntimeError):
    pass
