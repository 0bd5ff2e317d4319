class InstanceError(ValueError):
    """An instance violates a structural requirement (targets, reachability...)."""


class BudgetInfeasible(RuntimeError):
    """No tree within the budget could be produced."""


class GuardError(ValueError):
    """An exhaustive routine was asked to work on an input beyond its size guard."""


class TreeError(ValueError):
    """A rooted tree is malformed or incompatible with its base graph."""


class InvariantViolation(AssertionError):
    """A solver step produced a tree that breaks a design invariant."""
