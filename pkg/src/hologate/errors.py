"""Exception types shared across the package."""


class SpaceMismatchError(ValueError):
    """Operands live on Fock spaces with different cutoffs."""


class ParameterDomainError(ValueError):
    """A control parameter lies outside the domain of the requested formula."""


class BudgetError(ValueError):
    """A path or point leaves the configured |xi|/|zeta| budget box."""


class CutoffError(RuntimeError):
    """The Fock cutoff is too small for the requested accuracy."""


class LoopClosureError(ValueError):
    """Segments do not join into a closed loop at the base point."""


class ReachabilityError(ValueError):
    """Target gate lies outside the reachable holonomy subgroup."""


class BranchPointWarning(UserWarning):
    """A unitary logarithm has an eigenvalue near -1 (branch ambiguity)."""
