"""Exception types shared across the package.

The command line front end maps these onto stable exit codes:
usage errors exit 1, mathematical counterexamples exit 2, and
resource-budget refusals exit 3.
"""


class UsageError(ValueError):
    """Arguments violate a documented precondition."""


class ResourceLimitError(RuntimeError):
    """A computation was refused because it exceeds a configured budget."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class CounterexampleError(RuntimeError):
    """An exhaustive search contradicted a claim that should always hold.

    Carries the structured report describing the failed claim so callers
    can serialize it instead of parsing the message.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
