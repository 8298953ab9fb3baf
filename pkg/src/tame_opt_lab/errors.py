"""Exception hierarchy shared by every module."""


class TameOptError(Exception):
    """Base class for all library errors."""


class InputError(TameOptError, ValueError):
    """Malformed input: bad dimensions, unknown names, unparseable documents."""


class ConvexityError(InputError):
    """A constraint failed the sampled-Hessian convexity probe."""

    def __init__(self, message, constraint=None, point=None, eigenvalue=None):
        super().__init__(message)
        self.constraint = constraint
        self.point = point
        self.eigenvalue = eigenvalue


class SingularMatrixError(TameOptError, ArithmeticError):
    """A symmetric factorization met a pivot below the singularity threshold."""

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class NoInteriorError(TameOptError):
    """No point strictly inside every constraint could be verified."""


class ConvergenceError(TameOptError):
    """An iterative method stalled; ``trace`` holds the per-iteration record."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


class DegenerateGradientError(TameOptError):
    """An active constraint has a (numerically) zero gradient."""


class WalkError(TameOptError):
    """Gauss-Newton projection onto an active manifold diverged."""


class SamplingError(TameOptError):
    """Too few usable samples for a decay estimate."""


class SecondOrderDegeneracyError(TameOptError):
    """The bordered KKT system of the sensitivity analysis is singular."""
