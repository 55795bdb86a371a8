"""Exception types raised across the toolkit."""


class QMKitError(Exception):
    """Base class for all toolkit errors."""


class NonHermitian(QMKitError):
    pass


class NonSquare(QMKitError):
    pass


class DimensionMismatch(QMKitError):
    pass


class InvalidJ(QMKitError):
    pass


class NonUnitAxis(QMKitError):
    pass


class NotSU2(QMKitError):
    pass


class TriangleViolation(QMKitError):
    pass


class WindowTooSmall(QMKitError):
    pass


class NoConvergence(QMKitError):
    pass


class NegativeInput(QMKitError):
    pass


class DegenerateSpectrum(QMKitError):
    pass


class InvalidG(QMKitError):
    pass


class SingularBlock(QMKitError):
    pass


class NoOpenChannel(QMKitError):
    pass


class ThresholdEnergy(QMKitError):
    """Energy sits exactly on a channel threshold (k = 0)."""


class DomainError(QMKitError):
    pass


class IntegralDiverged(QMKitError):
    pass


class NonHermitianInput(QMKitError):
    pass


class GridMismatch(QMKitError):
    pass


class SymmetryViolation(QMKitError):
    pass


class IncompleteProjectors(QMKitError):
    pass


class IndexOutOfRange(QMKitError):
    pass


class DuplicateIndex(QMKitError):
    pass


class NotCoprime(QMKitError):
    pass


class ExtractionFailed(QMKitError):
    def __init__(self, message, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class RetriesExhausted(QMKitError):
    def __init__(self, message, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class NoInverse(QMKitError):
    pass
