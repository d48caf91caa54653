"""Exception types raised by spinsep."""


class SpinsepError(Exception):
    """Base class for all library errors."""


class ConfigError(SpinsepError, ValueError):
    """Invalid run or jump configuration."""


class NumericalError(SpinsepError, ArithmeticError):
    """Non-finite amplitudes or a failed eigensolve."""


class IntegrationDiverged(NumericalError):
    """Norm drift exceeded the abort threshold during an RK4 run."""

    def __init__(self, time, drift, threshold):
        self.time = time
        self.drift = drift
        self.threshold = threshold
        super().__init__(
            f"integration diverged at t = {time:.6g}: "
            f"norm drift {drift:.3e} exceeds {threshold:.3e}"
        )


class EmptyWindowError(SpinsepError, ValueError):
    """No recorded samples fall inside the averaging window."""


class ResourceLimitError(SpinsepError):
    """Problem size exceeds what a dense routine is allowed to handle."""
