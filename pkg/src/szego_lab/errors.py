"""Exception hierarchy. Each class carries the CLI exit status it maps to."""


class SzegoLabError(Exception):
    exit_code = 3


class ArgumentError(SzegoLabError, ValueError):
    exit_code = 2


class DomainError(ArgumentError):
    """Point outside the open domain, or wrong dimension."""


class DomainMarginError(DomainError):
    """Point inside, but closer to the boundary than the evaluation margin."""


class CapabilityError(ArgumentError):
    """Requested quantity has no implementation for this domain/point."""


class NumericalError(SzegoLabError, ArithmeticError):
    exit_code = 3


class PrecisionError(NumericalError):
    """Series or quadrature could not reach the target accuracy."""


class BranchError(NumericalError):
    pass


class CheckFailed(SzegoLabError):
    exit_code = 4
