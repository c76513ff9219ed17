"""Exception types shared across the package."""


class TruncationError(ValueError):
    """The Fock-space cutoff is too small for the requested state or operator."""


class DegenerateConditionError(ValueError):
    """A post-selection or conditioning event has (numerically) zero probability."""


class ConvergenceError(RuntimeError):
    """A result did not converge under dim-doubling or step-halving."""


class SingularityError(ValueError):
    """A closed-form expression was evaluated at one of its poles."""
