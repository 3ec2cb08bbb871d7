"""Exception hierarchy shared by the solvers and the CLI."""


class RosetteError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RosetteError, ValueError):
    """An argument lies outside the domain of the function."""


class PoleError(DomainError):
    """Evaluation requested too close to the pole at x = 1."""


class EvaluationError(RosetteError, ArithmeticError):
    """A function returned a non-finite value at a probe point."""

    def __init__(self, message: str, location: float):
        super().__init__(f"{message} (at x={location!r})")
        self.location = location


class ConvergenceError(RosetteError, RuntimeError):
    """Iterative refinement did not meet its tolerance.

    ``best`` carries the best estimate available when the solver gave up.
    """

    def __init__(self, message: str, best: float):
        super().__init__(f"{message} (best estimate {best!r})")
        self.best = best


class FoldSuspectedError(ConvergenceError):
    """Residual stalled while the bracket collapsed; likely a tangency."""


class FoldNotFoundError(RosetteError, LookupError):
    """No sign change of the derivative in the search interval."""


class CollisionError(DomainError):
    """Two bodies occupy the same position."""
