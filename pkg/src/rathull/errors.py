"""Exception hierarchy shared by every module."""


class RatHullError(Exception):
    """Base class for all library errors."""


class ContourThroughZero(RatHullError):
    pass


class UnderResolved(RatHullError):
    pass


class LengthMismatch(RatHullError):
    pass


class NegativeCount(RatHullError):
    pass


class NoSignChange(RatHullError):
    pass


class RankDeficient(RatHullError):
    pass


class InvalidParams(RatHullError):
    pass


class DegeneratePoint(RatHullError):
    pass


class NotOnSphere(RatHullError):
    pass


class ValidationFailed(RatHullError):
    """A surface family violates one of its structural invariants."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}" if detail else clause)


class PoleOnSurface(RatHullError):
    pass


class NotOnGamma(RatHullError):
    pass


class RootFindFailure(RatHullError):
    pass


class SingularFiber(RatHullError):
    pass


class ChartMismatch(RatHullError):
    pass


class VanishesOnSurface(RatHullError):
    """The polynomial has a zero on the surface, so the certificate does not apply."""


class NonConstant(RatHullError):
    pass


class BoundaryMismatch(RatHullError):
    pass
