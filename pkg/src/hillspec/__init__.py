"""Spectral density functions for Hill's equation on the half line.

The solver approximates the periodic coefficient by a step function
(exact trig/hyperbolic propagation on each subinterval), assembles the
monodromy coefficients by stabilized double shooting, and evaluates the
spectral density f(lambda) of the half-line problem from the closed-form
quotient, with mesh-refinement ladders plus Richardson extrapolation
driving everything to tolerance.
"""

from .errors import (BracketError, ConvergenceError, DegenerateBasisError,
                     HillspecError, IndeterminatePointError,
                     IntegrationFailure, InvalidMeshError, OutOfBandError,
                     ScalingFaultError, UnknownPotentialError,
                     UnsupportedBoundaryError)
from .oracle import OracleSolution, finite_difference_lambda, \
    integrate_reference
from .potentials import (BUILTIN_NAMES, EVEN_SYMMETRIC, PeriodicPotential,
                         StepMesh, builtin, constant, discretize,
                         initial_mesh, refine, step_potential)
from .shooting import (LadderOutcome, MonodromyCoefficients, monodromy_at,
                       refine_ladder, shoot)
from .spectral import (DIRICHLET, NEUMANN, BandChart, BoundaryCondition,
                       DensityPoint, appell_coefficients, density,
                       density_via_f1, discriminant_defect, find_bands,
                       phi_form_check)
from .variational import (EdgeDerivatives, density_near_edge, growth_rate,
                          locate_edge, variational_monodromy)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES", "EVEN_SYMMETRIC", "PeriodicPotential", "StepMesh",
    "builtin", "constant", "step_potential", "discretize", "initial_mesh",
    "refine",
    "MonodromyCoefficients", "LadderOutcome", "shoot", "monodromy_at",
    "refine_ladder",
    "BoundaryCondition", "DIRICHLET", "NEUMANN", "DensityPoint", "BandChart",
    "density", "find_bands", "discriminant_defect", "appell_coefficients",
    "density_via_f1", "phi_form_check",
    "EdgeDerivatives", "variational_monodromy", "locate_edge",
    "density_near_edge", "growth_rate",
    "OracleSolution", "integrate_reference", "finite_difference_lambda",
    "HillspecError", "UnknownPotentialError", "InvalidMeshError",
    "ConvergenceError", "DegenerateBasisError", "IndeterminatePointError",
    "OutOfBandError", "BracketError", "UnsupportedBoundaryError",
    "ScalingFaultError", "IntegrationFailure",
    "__version__",
]
