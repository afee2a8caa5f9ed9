"""Lambda-derivatives of the monodromy coefficients and edge asymptotics.

The derivative sweeps recur d/d-lambda of the scaled frames alongside the
frames themselves.  Because the scale factors sigma_n = exp(w_n h_n) also
depend on lambda, each scaled derivative picks up a correction
h_n/(2 w_n) times the freshly updated base frame on every scaled interval,
and the recovered dc_ij/d-lambda pick up a c_ij * d(log zeta)/d-lambda
term from the matched-frame quotient.

These derivatives feed the closed-form density asymptotics at band edges
where the plain density formula is 0/0 (even-symmetric potentials): there
f behaves like a constant over sqrt(|lambda - lambda*|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import _sweeps
from .errors import (BracketError, OutOfBandError, ScalingFaultError,
                     UnsupportedBoundaryError)
from .potentials import PeriodicPotential, StepMesh
from .shooting import (DEFAULT_MAX_REFINEMENTS, DEFAULT_N0,
                       MonodromyCoefficients, StateFrame, monodromy_at,
                       plan_sweep, refine_ladder)


@dataclass(frozen=True)
class VariationalFrame:
    """A sweep frame together with its lambda-derivative.

    `d_lambda` is d/d-lambda of the *scaled* frame components (it shares
    the base frame's log_scale); `correction_sum` is the accumulated
    sum of h_j/(2 w_j) over the scaled intervals seen so far.
    """

    base: StateFrame
    d_lambda: tuple[float, float]
    correction_sum: float


@dataclass(frozen=True)
class EdgeDerivatives:
    """d/d-lambda of the four monodromy coefficients at one lambda."""

    u_l: float    # d c11 = u_lambda(l)
    u_xl: float   # d c12 = u_x,lambda(l)
    v_l: float    # d c21 = v_lambda(l)
    v_xl: float   # d c22 = v_x,lambda(l)

    def determinant_derivative(self, c: MonodromyCoefficients) -> float:
        """d/d-lambda of det = c11 c22 - c12 c21; zero for the exact flow."""
        return (self.u_l * c.c22 + c.c11 * self.v_xl
                - self.u_xl * c.c21 - c.c12 * self.v_l)


def variational_shoot(mesh: StepMesh, lam: float) -> np.ndarray:
    """One base+derivative double shoot; returns the 8-vector

    (c11, c12, c21, c22, dc11, dc12, dc21, dc22) on the given mesh.
    """
    plan = plan_sweep(mesh, lam, scaled=True)
    k = plan.kernels
    corr = -k.dlog_sigma  # h/(2w) on scaled intervals, 0 elsewhere
    (uf, ufx, vf, vfx, ub, ubx, vb, vbx,
     duf, dufx, dvf, dvfx, dub, dubx, dvb, dvbx) = \
        _sweeps.sweep_match_variational(
            k.phi_s, k.phi_x_s, k.phi_lam_s, k.tau, k.h, corr,
            plan.match_index - 1)

    delta = ub * vbx - ubx * vb
    d_delta = dub * vbx + ub * dvbx - dubx * vb - ubx * dvb
    n11 = vbx * uf - vb * ufx
    n12 = ub * ufx - ubx * uf
    n21 = vbx * vf - vb * vfx
    n22 = ub * vfx - ubx * vf
    dn11 = dvbx * uf + vbx * duf - dvb * ufx - vb * dufx
    dn12 = dub * ufx + ub * dufx - dubx * uf - ubx * duf
    dn21 = dvbx * vf + vbx * dvf - dvb * vfx - vb * dvfx
    dn22 = dub * vfx + ub * dvfx - dubx * vf - ubx * dvf

    zeta = math.exp(plan.log_p_front - plan.log_p_back)
    # The matched quotient is c = zeta * N / delta with zeta = zeta(lambda),
    # so dc needs the extra c * d(log zeta) term.
    m = plan.match_index - 1
    dlog_zeta = float(np.sum(k.dlog_sigma[:m]) - np.sum(k.dlog_sigma[m:]))
    out = np.empty(8)
    for i, (n, dn) in enumerate(((n11, dn11), (n12, dn12),
                                 (n21, dn21), (n22, dn22))):
        c = zeta * n / delta
        out[i] = c
        out[4 + i] = zeta * (dn / delta - n * d_delta / delta ** 2) \
            + c * dlog_zeta
    if not np.all(np.isfinite(out)):
        raise ScalingFaultError(
            f"derivative sweep produced non-finite values at lambda = {lam}")
    return out


def variational_monodromy(potential: PeriodicPotential, lam: float,
                          tol: float, n0: int = DEFAULT_N0,
                          max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                          ) -> tuple[MonodromyCoefficients, EdgeDerivatives]:
    """Converged monodromy coefficients and their lambda-derivatives.

    The derivative components can be large (they grow with the band
    index), so the ladder tolerance is applied in the mixed sense
    |change| <= tol * max(1, |value|) componentwise.
    """
    outcome = refine_ladder(
        potential, lam, tol,
        shoot_fn=variational_shoot, value_of=lambda v: v,
        n0=n0, max_refinements=max_refinements, scaled_tolerance=True)
    c11, c12, c21, c22, d11, d12, d21, d22 = outcome.values
    coeffs = MonodromyCoefficients(c11=c11, c12=c12, c21=c21, c22=c22)
    derivs = EdgeDerivatives(u_l=d11, u_xl=d12, v_l=d21, v_xl=d22)
    return coeffs, derivs


def _g(potential: PeriodicPotential, lam: float, tol: float) -> float:
    coeffs, _ = monodromy_at(potential, lam, tol)
    return 2.0 - abs(coeffs.trace)


def locate_edge(potential: PeriodicPotential, bracket: tuple[float, float],
                tol: float = 1e-10) -> float:
    """Band-edge location: bisection on 2 - |c11 + c22| over the bracket.

    If the bracket shows no sign change, a bounded scalar minimization
    looks for a near-zero minimum (a touching edge); failing that, a
    BracketError is raised.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise BracketError(f"empty bracket ({lo}, {hi})")
    eval_tol = max(tol, 1e-10)
    g_lo = _g(potential, lo, eval_tol)
    g_hi = _g(potential, hi, eval_tol)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if g_lo * g_hi > 0.0:
        res = minimize_scalar(lambda x: abs(_g(potential, x, eval_tol)),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": max(tol, 1e-12)})
        if res.fun <= 1e-6:
            return float(res.x)
        raise BracketError(
            f"no discriminant sign change on ({lo}, {hi}); "
            f"closest approach to zero is {res.fun:.3e}")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = _g(potential, mid, eval_tol)
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0.0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)


def density_near_edge(potential: PeriodicPotential, bc, lam: float,
                      lambda_star: float, tol: float = 1e-8) -> float:
    """Density near an indeterminate band edge from derivative quantities.

    Dirichlet (alpha = 0), lambda below the edge:

        f = sqrt((2 + |T|) |u_l + v_xl|(l*))
            / (2 pi |v_l(l*)| sqrt(l* - lam))

    with every factor except the square-root singularity evaluated in the
    edge limit, where 2 + |T| = 4.  Neumann (alpha = pi/2) is the mirror
    case with u_xl in the denominator and lambda above the edge.  The edge
    location is re-bisected to tol/10 first, since the result is sensitive
    to the error in |lambda - lambda*|.
    """
    alpha = float(getattr(bc, "alpha", bc))
    dirichlet = abs(alpha) <= 1e-12
    neumann = abs(alpha - 0.5 * math.pi) <= 1e-12
    if not (dirichlet or neumann):
        raise UnsupportedBoundaryError(
            f"edge asymptotics exist only for alpha = 0 or pi/2, "
            f"got {alpha}")
    width = max(1e-5, 100.0 * tol)
    try:
        lambda_star = locate_edge(
            potential, (lambda_star - width, lambda_star + width),
            tol=tol / 10.0)
    except BracketError:
        pass  # keep the caller's value
    if dirichlet and not lam < lambda_star:
        raise OutOfBandError(
            f"Dirichlet edge formula needs lambda < lambda* "
            f"({lam} >= {lambda_star})")
    if neumann and not lam > lambda_star:
        raise OutOfBandError(
            f"Neumann edge formula needs lambda > lambda* "
            f"({lam} <= {lambda_star})")
    _, derivs = variational_monodromy(potential, lambda_star, tol)
    numerator = math.sqrt(4.0 * abs(derivs.u_l + derivs.v_xl))
    if dirichlet:
        denom = 2.0 * math.pi * abs(derivs.v_l) * math.sqrt(lambda_star - lam)
    else:
        denom = 2.0 * math.pi * abs(derivs.u_xl) * math.sqrt(lam - lambda_star)
    return numerator / denom


def growth_rate(point1: tuple[float, float], point2: tuple[float, float],
                lambda_star: float) -> float:
    """Power-law exponent of f near lambda*, from two sample points.

    rate = log[f(l2)/f(l1)] / log[|l1 - l*| / |l2 - l*|]; an exact
    C/sqrt(|lambda - lambda*|) law gives 0.5.
    """
    lam1, f1 = point1
    lam2, f2 = point2
    if not (f1 > 0.0 and f2 > 0.0):
        raise ValueError("growth_rate needs positive density values")
    if lam1 == lam2 or lam1 == lambda_star or lam2 == lambda_star:
        raise ValueError("sample points must be distinct and off the edge")
    return math.log(f2 / f1) / math.log(abs(lam1 - lambda_star)
                                        / abs(lam2 - lambda_star))
