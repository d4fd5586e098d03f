"""Exception hierarchy shared by all modules."""


class QfiLabError(Exception):
    pass


class ContractViolation(QfiLabError, ValueError):
    """An input broke a documented precondition (shape, Hermiticity, trace...)."""


class DomainError(QfiLabError, ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class DivergentQFIError(DomainError):
    """The derivative has weight outside the support of the state.

    The parameter is perfectly distinguishable at this point, so the QFI is
    infinite rather than merely large.
    """


class ConvergenceError(QfiLabError, RuntimeError):
    pass


class EigenvalueCrossingError(QfiLabError, RuntimeError):
    pass


class BracketError(QfiLabError, RuntimeError):
    pass


class EndpointError(DomainError):
    """QFI requested at an end of the parameter range (divergent or degenerate there)."""
