"""Exception hierarchy shared by all modules."""


class BottleneckError(Exception):
    """Base class; the CLI maps every subclass to exit code 1."""


class DomainError(BottleneckError, ValueError):
    pass


class AssumptionViolated(BottleneckError):
    """The width profile has no unique interior nondegenerate minimum."""

    def __init__(self, message, diagnostic=None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class NoRealRoot(DomainError):
    pass


class InadmissibleStart(DomainError):
    pass


class InadmissibleEnd(DomainError):
    pass


class UndefinedInsideCanardBand(DomainError):
    pass


class OutOfDomain(DomainError):
    pass


class DimensionMismatch(BottleneckError, ValueError):
    pass


class DegenerateParameters(BottleneckError):
    """Raised on curves where the singular solution is not unique."""

    def __init__(self, message, family=None):
        super().__init__(message)
        self.family = family


class OutOfScope(BottleneckError):
    pass


class NoConvergence(BottleneckError):
    def __init__(self, message, trace=None, solutions=None):
        super().__init__(message)
        self.trace = trace or []
        self.solutions = solutions or []
