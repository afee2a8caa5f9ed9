"""Reference computations used to validate the production solver.

The reference path integrates the smooth equation -y'' + q(x) y = lambda y
directly with an adaptive high-order Runge-Kutta scheme, so it shares no
code (and no discretization) with the step-approximation solver it checks.
Deliberately slow and simple.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import IntegrationFailure
from .potentials import PeriodicPotential


@dataclass(frozen=True)
class OracleSolution:
    """Basis solutions u (u(0)=1, u'(0)=0) and v (v(0)=0, v'(0)=1) at x_end.

    `error_estimate` is the Wronskian defect |u v_x - u_x v - 1|, which is
    zero for the exact flow.
    """

    u: float
    u_x: float
    v: float
    v_x: float
    error_estimate: float

    @property
    def trace(self) -> float:
        return self.u + self.v_x


def integrate_reference(potential: PeriodicPotential, lam: float,
                        rel_tol: float = 1e-12,
                        x_end: float | None = None) -> OracleSolution:
    """Integrate the smooth equation from 0 to x_end (default: one period).

    Uses an 8th-order embedded Runge-Kutta pair on the first-order system
    for (u, u', v, v').  The Wronskian defect at the endpoint must come out
    below 10 * rel_tol or an IntegrationFailure is raised.
    """
    if not 1e-13 <= rel_tol <= 1e-6:
        raise ValueError(f"rel_tol {rel_tol} outside [1e-13, 1e-6]")
    if x_end is None:
        x_end = potential.period
    if x_end == 0.0:
        return OracleSolution(u=1.0, u_x=0.0, v=0.0, v_x=1.0,
                              error_estimate=0.0)

    def rhs(x, y):
        w = potential(x) - lam
        return (y[1], w * y[0], y[3], w * y[2])

    sol = solve_ivp(rhs, (0.0, x_end), (1.0, 0.0, 0.0, 1.0),
                    method="DOP853", rtol=rel_tol, atol=rel_tol * 1e-2,
                    dense_output=False)
    if not sol.success:
        raise IntegrationFailure(
            f"reference integration failed at lambda = {lam}: {sol.message}")
    u, u_x, v, v_x = (float(c) for c in sol.y[:, -1])
    defect = abs(u * v_x - u_x * v - 1.0)
    if defect > 10.0 * rel_tol:
        raise IntegrationFailure(
            f"Wronskian defect {defect:.3e} exceeds 10 * rel_tol at "
            f"lambda = {lam}")
    return OracleSolution(u=u, u_x=u_x, v=v, v_x=v_x, error_estimate=defect)


def finite_difference_lambda(quantity, lam: float, step: float = 1e-4) -> float:
    """Central finite difference in lambda of a scalar-valued quantity."""
    if not step > 0:
        raise ValueError("step must be positive")
    return (quantity(lam + step) - quantity(lam - step)) / (2.0 * step)
