"""Exception types shared across the package."""


class FlowError(Exception):
    """Base class for all ellflow errors."""


class DimensionMismatch(FlowError):
    pass


class NotHermitian(FlowError):
    pass


class NotPSD(FlowError):
    pass


class StepSizeUnderflow(FlowError):
    pass


class ToleranceUnreachable(FlowError):
    pass


class OutOfRange(FlowError):
    pass


class ShiftNotInvertible(FlowError):
    pass


class NotConverged(FlowError):
    pass


class NotCommutingInitialData(FlowError):
    pass


class GammaInSpectrum(FlowError):
    pass


class InsufficientSamples(FlowError):
    pass


class NonDecaying(FlowError):
    pass


class NotAntisymmetric(FlowError):
    pass


class TooManyModes(FlowError):
    pass


class InconsistentRegime(FlowError):
    pass


class DegenerateDenominator(FlowError):
    pass


class InputError(FlowError):
    """Malformed configuration or data file."""
