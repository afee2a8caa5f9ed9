"""Exception hierarchy for the solver."""


class HillspecError(Exception):
    """Base class for all solver errors."""


class UnknownPotentialError(HillspecError, KeyError):
    """Requested builtin potential name does not exist."""


class InvalidMeshError(HillspecError, ValueError):
    """Mesh construction parameters are invalid."""


class ConvergenceError(HillspecError):
    """Mesh-refinement ladder did not settle within the refinement budget.

    Carries the last iterate so callers can still report a best estimate.
    """

    def __init__(self, message, best=None, mesh=None, defect=None):
        super().__init__(message)
        self.best = best
        self.mesh = mesh
        self.defect = defect


class DegenerateBasisError(HillspecError):
    """Backward solution basis collapsed (|Delta| underflow); signals a
    pathological mesh or lambda."""


class IndeterminatePointError(HillspecError):
    """Numerator and denominator of the density formula vanish together;
    the point needs the derivative-based edge formulas."""

    def __init__(self, message, lam=None):
        super().__init__(message)
        self.lam = lam


class OutOfBandError(HillspecError, ValueError):
    """Operation requires lambda strictly inside a stability interval."""


class BracketError(HillspecError, ValueError):
    """Bisection bracket does not contain a sign change."""


class UnsupportedBoundaryError(HillspecError, ValueError):
    """Edge-asymptotic formulas exist only for Dirichlet and Neumann."""


class ScalingFaultError(HillspecError):
    """Derivative sweep overflowed despite scaling."""


class IntegrationFailure(HillspecError):
    """Reference integrator could not meet its tolerance."""
