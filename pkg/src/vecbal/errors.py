"""Exception hierarchy shared by all vecbal modules.

Precondition/contract failures indicate a caller bug or invalid input and map
to CLI exit code 1.  Budget failures (restart or rejection budgets exhausted)
indicate statistically implausible behaviour on valid inputs and map to exit
code 2.
"""


class VecbalError(Exception):
    """Base class for all package errors."""


class PreconditionError(VecbalError):
    """An operation was called with inputs violating its stated preconditions."""


class ContractViolation(VecbalError):
    """An internal post-condition or data invariant failed to hold."""


class SingularSystemError(PreconditionError):
    """A matrix expected to have full column rank is numerically rank deficient."""


class DegenerateFaceError(PreconditionError):
    """A face operation was attempted on an empty active set."""


class NotPSDError(PreconditionError):
    """A matrix expected to be positive semidefinite has a clearly negative eigenvalue."""


class NumericalError(VecbalError):
    """Construction finished but failed its numerical post-invariants."""


class BudgetError(VecbalError):
    """Base class for exhausted statistical retry budgets (CLI exit code 2)."""


class RestartBudgetError(BudgetError):
    """A restart loop exceeded its configured maximum number of attempts."""


class RejectionExhaustedError(BudgetError):
    """Rejection sampling failed every allowed attempt for some sample.

    On valid inputs (body of Gaussian measure >= 1/2) this has probability at
    most the caller's epsilon; repeated failures signal an invalid body or a
    broken membership oracle.
    """
