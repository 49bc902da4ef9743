"""Exception hierarchy shared across the package."""


class CorrpolyError(Exception):
    """Base class for all errors raised by this package."""


class SpaceMismatchError(CorrpolyError):
    """Two objects that must live on the same product space do not."""


class MarginalMismatchError(CorrpolyError):
    """Distributions or prior sets that must share marginals do not."""


class NotInCorrelationSetError(CorrpolyError):
    """A distribution does not have the marginals of the correlation set."""


class GuardExceededError(CorrpolyError):
    """A desk-scale enumeration guard was exceeded."""


class InfeasibleError(CorrpolyError):
    """The linear program has an empty feasible region."""


class UnboundedError(CorrpolyError):
    """The linear program is unbounded below."""


class NonlinearCollectionError(CorrpolyError):
    """Dimension was requested for a collection whose independence
    constraints are not linear (two or more non-singleton members)."""


class ConsistencyError(CorrpolyError):
    """An internal cross-check that must hold mathematically failed.

    Raised when two independent computations of the same quantity
    disagree; always indicates a bug, never bad user input."""


class ScenarioError(CorrpolyError):
    """A scenario file is malformed or inconsistent."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
