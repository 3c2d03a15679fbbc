"""Exception types shared across the package."""


class QnepError(Exception):
    """Base class for all errors raised by qnep."""


class ConfigurationError(QnepError, ValueError):
    """Invalid grid, scheme or experiment parameters."""


class UnknownTableauError(QnepError, KeyError):
    def __init__(self, name):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"unknown tableau {self.name!r}"


class VacuumError(QnepError, ArithmeticError):
    """Density fell below the vacuum threshold where a velocity is needed."""

    def __init__(self, index, value):
        self.index = int(index)
        self.value = float(value)
        super().__init__(f"vacuum: density {self.value:.3e} at cell {self.index}")


class SingularSystemError(QnepError, ArithmeticError):
    """A linear system could not be solved (zero pivot or singular matrix)."""


class StepError(QnepError, RuntimeError):
    """Wraps an error raised inside a time step with its step index and time."""

    def __init__(self, step, time, cause):
        self.step = step
        self.time = time
        self.cause = cause
        super().__init__(f"step {step} (t={time:.6g}): {cause}")
