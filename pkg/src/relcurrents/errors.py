class PreconditionError(ValueError):
    """Input does not satisfy an operation's preconditions (CLI exit code 2)."""


class ConvergenceError(RuntimeError):
    """An iteration did not settle within its budget (CLI exit code 3)."""
