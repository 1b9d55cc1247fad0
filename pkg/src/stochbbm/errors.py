"""Exception types."""


class StochBBMError(Exception):
    pass


class ConfigError(StochBBMError, ValueError):
    """Invalid configuration or mismatched inputs (CLI exit code 2)."""


class NumericError(StochBBMError, ArithmeticError):
    """A symbol or operator produced non-finite values."""


class DivergenceError(NumericError):
    """The state became non-finite (CLI exit code 3).

    ``last_state`` is the last finite state and ``step`` the index of the
    step that failed.
    """

    def __init__(self, message, last_state=None, step=None, time=None):
        super().__init__(message)
        self.last_state = last_state
        self.step = step
        self.time = time


class StepRejected(NumericError):
    """Implicit inner iteration did not converge; retry with a smaller step."""


class NonContractionError(NumericError):
    """Picard iteration did not converge within the iteration budget."""

    def __init__(self, message, distances=()):
        super().__init__(message)
        self.distances = list(distances)


class UsageError(StochBBMError, ValueError):
    pass
