"""Exception types shared across the toolkit."""


class PehError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(PehError):
    """Invalid device, scenario, or sweep configuration."""


class AssemblyError(PehError):
    """Plate assembly produced a singular or ill-conditioned system."""


class EigenSolverError(PehError):
    """Generalized eigensolver failed to converge."""

    def __init__(self, message: str, info: int | None = None):
        super().__init__(message)
        self.info = info


class SimulationError(PehError):
    """Time integration failed (step-size underflow, singular FRF, ...)."""


class TimeSeriesError(PehError):
    """Malformed time series data or file."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class SpeedEstimateError(PehError):
    """Cross-correlation speed estimate is unreliable or inconsistent."""


class SpeedDirectionError(SpeedEstimateError):
    """Estimated inter-sensor delay is zero or negative."""
