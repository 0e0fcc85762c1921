"""Exception types raised across the package."""


class SFGError(Exception):
    """Base class for all errors raised by :mod:`sfg`."""


class InvalidParameterError(SFGError, ValueError):
    """A parameter record violates its invariants."""


class ConvergenceError(SFGError, ArithmeticError):
    """A series did not converge within its term cap.

    The partial result is kept on the exception so callers can inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NoPeakError(SFGError):
    """No interior efficiency maximum exists in the searched coupling range."""


class UndefinedFidelityError(SFGError):
    """Fidelity requested for a state with (numerically) no upconverted photon."""


class UndefinedPurityError(SFGError):
    """Purity requested for an upconverted subsystem that does not exist."""


class GridError(SFGError, ValueError):
    """A sampling grid is mismatched or too small for the waveform it holds."""


class AfocalError(SFGError):
    """Time-lens configuration has no finite image chirp.

    This happens when ``2B == 1/(2 A1)``; the same optics then act as a
    time-to-frequency converter instead of an imager.
    """
