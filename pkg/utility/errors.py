"""
Exception hierarchy shared by the simulation packages
"""
from typing import Optional


class PhSimError(Exception):
    """Base class for every error raised by the toolkit"""


class NoRoot(PhSimError):
    """The hydrogen-ion quartic has no sign change on the search bracket"""


class StateDiverged(PhSimError):
    """A plant state field became non-finite or negative"""

    def __init__(self, message: str, step: Optional[int] = None, t: Optional[float] = None):
        super().__init__(message)
        self.step = step
        self.t = t

    def at(self, step: int, t: float) -> "StateDiverged":
        """Same error tagged with the offending timestep"""
        return StateDiverged(f"{self} (step {step}, t={t:g} s)", step=step, t=t)


class NoOscillation(PhSimError):
    """Gain sweep exhausted without sustained oscillation"""


class EmptyAggregate(PhSimError):
    """Aggregated fuzzy membership is identically zero"""


class FuzzyTableError(PhSimError):
    """Custom fuzzy tables violate coverage or rule bijectivity"""


class SegmentTooShort(PhSimError):
    """A setpoint segment has fewer samples than metrics need"""


class TraceFormatError(PhSimError):
    """A trace CSV file could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class ConfigError(PhSimError):
    """A configuration file is missing, malformed or inconsistent"""
