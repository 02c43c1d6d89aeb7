"""Exception hierarchy shared across the package."""


class LabError(Exception):
    """Base class for every error raised by hurwitzlab."""


class PoleError(LabError, ValueError):
    pass


class DomainError(LabError, ValueError):
    pass


class RangeError(LabError, ValueError):
    pass


class SignError(LabError, ValueError):
    pass


class ContourError(LabError, ValueError):
    pass


class ConvergenceError(LabError, RuntimeError):
    pass


class CostError(LabError, RuntimeError):
    pass


class BudgetError(LabError, RuntimeError):
    pass


class ArityError(LabError, ValueError):
    pass


class CompatibilityError(LabError, ValueError):
    pass


class UnimodularError(LabError, ValueError):
    pass
