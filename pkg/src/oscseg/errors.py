"""Exception types shared across the library and the command line tool."""


class OscsegError(Exception):
    """Base class for all library errors."""


class InputError(OscsegError):
    """Malformed or unusable input data (bad CSV, non-finite values, short series)."""


class ConfigError(OscsegError):
    """Invalid configuration value or combination."""


class NumericalError(OscsegError):
    """Internal numerical failure (non-finite intermediates, failed optimization)."""


class DegenerateFrequencyError(OscsegError):
    """A closed-form trigonometric sum was requested at a vanishing denominator."""


class SegmentTooShortError(OscsegError):
    """A window is too short to fit or score."""


class SplitInfeasibleError(OscsegError):
    """An interval cannot be split under the minimum segment length."""
