"""Exception types raised across the package."""


class HypergreedyError(Exception):
    """Base class for all package errors."""


class InvalidParameters(HypergreedyError, ValueError):
    pass


class AttemptsExhausted(HypergreedyError):
    pass


class ParseError(HypergreedyError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConsistencyError(HypergreedyError, ValueError):
    pass


class ProcessTerminated(HypergreedyError):
    """A step was requested after the process had no selectable vertex left."""


class InvariantViolation(HypergreedyError, AssertionError):
    pass


class DegenerateState(HypergreedyError, ArithmeticError):
    pass


class DegenerateBlend(DegenerateState):
    pass


class StepFailure(HypergreedyError, ArithmeticError):
    pass


class BudgetExhausted(HypergreedyError):
    pass
