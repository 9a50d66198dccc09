"""Exception hierarchy shared by every module."""


class HgZetaError(Exception):
    """Base class for all errors raised by the package."""


class KernelRankError(HgZetaError):
    pass


class InvalidFamilyError(HgZetaError):
    pass


class NotNormalizable(InvalidFamilyError):
    """No index permutation puts the exponent matrix in diagonal-dominant form (X_0 is singular)."""


class AssumptionViolation(HgZetaError):
    pass


class Asm1Violation(AssumptionViolation):
    def __init__(self, offenders, message=None):
        self.offenders = list(offenders)
        super().__init__(message or f"divisibility assumption fails at {self.offenders}")


class Asm2Violation(AssumptionViolation):
    pass


class CapExceeded(HgZetaError):
    pass


class NotPrime(HgZetaError):
    pass


class LevelMismatch(HgZetaError):
    pass


class ZeroInput(HgZetaError):
    pass


class BudgetExceeded(HgZetaError):
    pass


class RoundingGapError(HgZetaError):
    pass


class DegreeUndetermined(HgZetaError):
    pass


class IntegralityError(HgZetaError):
    pass


class UnclassifiableRoot(HgZetaError):
    pass


class PrecisionLoss(HgZetaError):
    pass


class StabilizationError(HgZetaError):
    pass


class ConfigError(HgZetaError):
    pass
