"""Exception types shared across the package.

The command line tool maps ConfigError to exit code 2 and NumericalError
to exit code 3, so library code should raise these (or subclasses) rather
than bare ValueError for user-facing failure modes.
"""


class ConfigError(ValueError):
    """Invalid configuration: unknown names, bad counts, missing fields."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: no convergence, singular system."""


class CalibrationError(NumericalError):
    """Activity calibration could not bracket or reach the target."""
