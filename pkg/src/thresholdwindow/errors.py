"""Exception types shared across the package."""


class NoFlipError(RuntimeError):
    """The function never outputs 1, so it has no flip time."""


class ToleranceError(RuntimeError):
    """An iterative computation hit its depth cap before reaching tolerance.

    Carries the best value obtained so far in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class UnsupportedLimitError(ValueError):
    """The family has no closed-form limit law (or is missing required inputs)."""


class CalibrationError(RuntimeError):
    """Threshold-string calibration failed; diagnostics in ``details``."""

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}
