"""Semantic exceptions shared across the library.

Public functions raise these instead of bare ValueError so callers (and the
CLI exit-code mapping) can tell input mistakes apart from solver trouble.
"""

from __future__ import annotations


class CalibrationError(Exception):
    """Base class for all calibdist errors."""


class EmptyInput(CalibrationError, ValueError):
    """An empirical distribution needs at least one sample."""


class OutOfRange(CalibrationError, ValueError):
    """A prediction fell outside [0, 1]."""


class BadLabel(CalibrationError, ValueError):
    """A label was not 0 or 1."""


class BadStep(CalibrationError, ValueError):
    """Grid step must satisfy 0 < step <= 1."""


class BadBins(CalibrationError, ValueError):
    """Bin count must be a positive integer."""


class BadWidth(CalibrationError, ValueError):
    """Interval width must satisfy 0 < width <= 1."""


class BadEps(CalibrationError, ValueError):
    """An accuracy / construction parameter is outside its allowed range."""


class BadAlpha(CalibrationError, ValueError):
    """A gap-construction parameter is outside its allowed range."""


class BadConfig(CalibrationError, ValueError):
    """An estimator configuration is inconsistent."""


class ModeKindMismatch(CalibrationError, ValueError):
    """Requested estimator mode does not support the requested kernel."""


class TooLarge(CalibrationError, ValueError):
    """Input exceeds a size guard for a quadratic or enumerative routine."""


class SolverFailure(CalibrationError, RuntimeError):
    """The LP solver did not return an optimal solution.

    Carries the solver status string so reports can surface it.
    """

    def __init__(self, status: str, message: str = ""):
        self.status = status
        super().__init__(message or f"LP solver failed with status: {status}")
