"""Spectral density evaluation and band-structure charting.

For lambda inside a stability band the density of the half-line problem
with boundary condition y(0) cos(a) + y'(0) sin(a) = 0 is

    f = sqrt(max(0, 4 - (c11 + c22)^2))
        / (2 pi |c12 sin^2 a + (c11 - c22) sin a cos a - c21 cos^2 a|),

with c11 = u(l), c12 = u'(l), c21 = v(l), c22 = v'(l) the monodromy
coefficients.  The clamp makes f identically zero on the spectral gaps,
where |c11 + c22| >= 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import BracketError, IndeterminatePointError, OutOfBandError
from .oracle import integrate_reference
from .potentials import PeriodicPotential
from .shooting import (DEFAULT_MAX_REFINEMENTS, DEFAULT_N0,
                       MonodromyCoefficients, monodromy_at, refine_ladder,
                       shoot, _coefficient_vector)

REGULAR = "regular"
DIRICHLET_INDETERMINATE = "dirichlet_indeterminate"
NEUMANN_INDETERMINATE = "neumann_indeterminate"

# Edge classification threshold on |c21| (Dirichlet) or |c12| (Neumann)
# at the converged edge.
EDGE_CLASSIFY_TOL = 1e-6

# Indeterminacy trigger for the density quotient: both the (clamped)
# squared numerator and the scaled denominator must be this small.
INDETERMINATE_NUM2 = 1e-10
INDETERMINATE_DEN = 1e-6


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary condition y(0) cos(alpha) + y'(0) sin(alpha) = 0."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < math.pi:
            raise ValueError(f"alpha must lie in [0, pi), got {self.alpha}")

    @property
    def is_dirichlet(self) -> bool:
        return self.alpha == 0.0

    @property
    def is_neumann(self) -> bool:
        return abs(self.alpha - 0.5 * math.pi) <= 1e-12


DIRICHLET = BoundaryCondition(0.0)
NEUMANN = BoundaryCondition(0.5 * math.pi)


@dataclass(frozen=True)
class DensityPoint:
    lam: float
    f: float
    in_gap: bool
    mesh_n: int
    converged: bool


@dataclass(frozen=True)
class BandChart:
    """Ordered stability intervals with a classification tag per edge."""

    intervals: tuple[tuple[float, float], ...]
    edge_tags: tuple[tuple[str, str], ...] = field(default=())

    def __post_init__(self):
        last = -math.inf
        for left, right in self.intervals:
            if not left < right:
                raise ValueError(f"degenerate interval ({left}, {right})")
            if left < last:
                raise ValueError("intervals must be disjoint and increasing")
            last = right

    @property
    def gaps(self) -> tuple[tuple[float, float], ...]:
        # Touching intervals (degenerate splits) contribute no gap.
        return tuple((a[1], b[0])
                     for a, b in zip(self.intervals, self.intervals[1:])
                     if b[0] > a[1])


def _density_parts(vec, alpha: float) -> tuple[float, float]:
    """(clamped squared numerator, denominator without the 2 pi)."""
    c11, c12, c21, c22 = vec
    num2 = 4.0 - (c11 + c22) ** 2
    s, c = math.sin(alpha), math.cos(alpha)
    den = abs(c12 * s * s + (c11 - c22) * s * c - c21 * c * c)
    return num2, den


def _density_value(vec, alpha: float) -> float:
    num2, den = _density_parts(vec, alpha)
    if num2 <= 0.0:
        return 0.0
    return math.sqrt(num2) / (2.0 * math.pi * den)


def density(potential: PeriodicPotential, bc: BoundaryCondition, lam: float,
            tol: float = 1e-8, n0: int = DEFAULT_N0,
            max_refinements: int = DEFAULT_MAX_REFINEMENTS,
            strict: bool = True) -> DensityPoint:
    """Spectral density estimate at one lambda.

    Convergence is monitored jointly on f and on the discriminant (the
    discriminant keeps gap/band classification honest where f is clamped
    to zero), in the mixed sense |change| <= tol * max(1, |value|): f
    blows up like 1/sqrt(|lambda - lambda*|) near band edges, where a
    purely absolute criterion on it would be unattainable.  With
    strict=False a ladder that runs out of refinements returns its best
    extrapolated value flagged converged=False instead of raising.
    """
    alpha = bc.alpha

    def monitor(vec):
        return (_density_value(vec, alpha), vec[0] + vec[3])

    outcome = refine_ladder(
        potential, lam, tol, shoot_fn=shoot, value_of=_coefficient_vector,
        monitor=monitor, n0=n0, max_refinements=max_refinements,
        raise_on_failure=strict, scaled_tolerance=True)
    vec = outcome.values
    num2, den = _density_parts(vec, alpha)
    if max(num2, 0.0) <= INDETERMINATE_NUM2 \
            and den <= INDETERMINATE_DEN * (1.0 + abs(vec[0]) + abs(vec[3])):
        raise IndeterminatePointError(
            f"density is 0/0 at lambda = {lam}; use the derivative-based "
            f"edge formulas", lam=lam)
    return DensityPoint(lam=lam, f=_density_value(vec, alpha),
                        in_gap=num2 <= 0.0, mesh_n=outcome.mesh.n,
                        converged=outcome.converged)


def discriminant_defect(potential: PeriodicPotential, lam: float,
                        tol: float = 1e-8) -> float:
    """g(lambda) = 2 - |c11 + c22|: positive in bands, negative in gaps."""
    coeffs, _ = monodromy_at(potential, lam, tol)
    return 2.0 - abs(coeffs.trace)


def _bisect_edge(g, lo: float, g_lo: float, hi: float, g_hi: float,
                 edge_tol: float) -> float:
    if g_lo * g_hi > 0.0:
        raise BracketError(f"no sign change on ({lo}, {hi})")
    while hi - lo > edge_tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if g_mid == 0.0:
            return mid
        if g_lo * g_mid < 0.0:
            hi, g_hi = mid, g_mid
        else:
            lo, g_lo = mid, g_mid
    return 0.5 * (lo + hi)


def _classify_edge(potential: PeriodicPotential, lam: float,
                   tol: float) -> str:
    coeffs, _ = monodromy_at(potential, lam, tol)
    if abs(coeffs.c21) <= EDGE_CLASSIFY_TOL:
        return DIRICHLET_INDETERMINATE
    if abs(coeffs.c12) <= EDGE_CLASSIFY_TOL:
        return NEUMANN_INDETERMINATE
    return REGULAR


def find_bands(potential: PeriodicPotential, lam_range: tuple[float, float],
               scan_points: int = 2000, edge_tol: float = 1e-9,
               tol: float = 1e-8) -> BandChart:
    """Chart the stability intervals inside [lo, hi].

    The discriminant defect g is sampled on a uniform grid; every sign
    change is bisected to width <= edge_tol.  Gaps narrower than the grid
    spacing leave no sign change behind, so each interior local minimum of
    the sampled g is additionally driven to its true minimum — if that
    dips below zero, the two hidden edges around it are bisected as well.
    High-index gaps can be shallower than the working tolerance itself
    (the Mathieu gap near 6.2709 dips only ~6e-9 below zero), so ambiguous
    minima are re-examined with a much tighter evaluation tolerance.

    A minimum that stays within the fine evaluation noise of zero marks a
    gap too shallow to resolve in double precision (or an exactly closed
    gap, as for a constant potential).  The chart splits the band at the
    minimizer in that case: two intervals sharing the endpoint, which is
    within the unresolvable gap's width of either true edge.
    """
    lo, hi = float(lam_range[0]), float(lam_range[1])
    if not lo < hi:
        raise ValueError(f"empty range ({lo}, {hi})")
    if scan_points < 2:
        raise ValueError("need at least two scan points")
    fine_tol = max(tol * 1e-3, 1e-11)

    def g(lam):
        coeffs, _ = monodromy_at(potential, lam, tol)
        return 2.0 - abs(coeffs.trace)

    def g_fine(lam):
        # Best-effort tight evaluation: near the ladder's floor the best
        # extrapolated value is still far more accurate than `tol`.
        coeffs, _ = monodromy_at(potential, lam, fine_tol,
                                 raise_on_failure=False)
        return 2.0 - abs(coeffs.trace)

    grid = np.linspace(lo, hi, scan_points)
    gv = np.array([g(x) for x in grid])

    edges = []
    for i in range(scan_points - 1):
        if gv[i] == 0.0:
            continue
        if gv[i] * gv[i + 1] < 0.0:
            edges.append(_bisect_edge(g, grid[i], gv[i],
                                      grid[i + 1], gv[i + 1], edge_tol))
    # Sub-grid gaps: refine interior local minima of the sampled g.
    for i in range(1, scan_points - 1):
        if not (gv[i] > 0.0 and gv[i] <= gv[i - 1] and gv[i] <= gv[i + 1]):
            continue
        opts = {"xatol": edge_tol / 4.0}
        res = minimize_scalar(g, bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options=opts)
        x_min, g_min = float(res.x), float(res.fun)
        probe, threshold = g, -10.0 * tol
        if -10.0 * tol <= g_min <= 10.0 * tol:
            res = minimize_scalar(g_fine, bounds=(grid[i - 1], grid[i + 1]),
                                  method="bounded", options=opts)
            x_min, g_min = float(res.x), float(res.fun)
            probe, threshold = g_fine, -10.0 * fine_tol
        if g_min < threshold:
            edges.append(_bisect_edge(probe, grid[i - 1], probe(grid[i - 1]),
                                      x_min, g_min, edge_tol))
            edges.append(_bisect_edge(probe, x_min, g_min,
                                      grid[i + 1], probe(grid[i + 1]),
                                      edge_tol))
        elif probe is g_fine and abs(g_min) <= -threshold:
            # Touching or unresolvably shallow gap: split at the minimizer.
            edges.append(x_min)
    edges.sort()

    def region_is_band(mid):
        val = g(mid)
        if abs(val) <= 10.0 * tol:
            val = g_fine(mid)
        return val > 0.0

    # Decide band/gap status of each region between consecutive boundaries.
    bounds = [lo, *edges, hi]
    intervals = []
    tags = []
    for left, right in zip(bounds[:-1], bounds[1:]):
        if right - left <= edge_tol:
            continue
        if region_is_band(0.5 * (left + right)):
            left_tag = _classify_edge(potential, left, tol) \
                if left in edges else REGULAR
            right_tag = _classify_edge(potential, right, tol) \
                if right in edges else REGULAR
            intervals.append((left, right))
            tags.append((left_tag, right_tag))
    return BandChart(intervals=tuple(intervals), edge_tags=tuple(tags))


def appell_coefficients(c: MonodromyCoefficients) -> tuple[float, float, float]:
    """Normalized quadratic-form coefficients (a, b, c3) at x = 0.

    (a, b, c3) = (-2 c21, 2 (c11 - c22), 2 c12) / sqrt(4 - (c11 + c22)^2);
    the unit monodromy determinant forces 4 a c3 - b^2 = 4.
    """
    disc = 4.0 - c.trace ** 2
    if disc <= 0.0:
        raise OutOfBandError(
            f"Appell normalization needs |c11 + c22| < 2, "
            f"got trace {c.trace}")
    root = math.sqrt(disc)
    return (-2.0 * c.c21 / root, 2.0 * (c.c11 - c.c22) / root,
            2.0 * c.c12 / root)


def density_via_f1(a: float, b: float, c3: float,
                   bc: BoundaryCondition) -> float:
    """Density from the normalized form: 1/(pi |c3 sin^2 a + b sin a cos a
    + a cos^2 a|); agrees with the clamped quotient inside bands."""
    s, c = math.sin(bc.alpha), math.cos(bc.alpha)
    den = abs(c3 * s * s + b * s * c + a * c * c)
    if den == 0.0:
        raise IndeterminatePointError(
            "normalized density denominator vanished")
    return 1.0 / (math.pi * den)


def phi_form_check(potential: PeriodicPotential, lam: float,
                   x_samples, rel_tol: float = 1e-12) -> float:
    """Max periodicity defect of the quadratic form

        Phi(x) = v(l) u(x)^2 - [u(l) - v'(l)] u(x) v(x) - u'(l) v(x)^2,

    which is periodic with the potential's period whenever lambda is
    inside a band.  All solution values come from the reference
    integrator, making this an end-to-end consistency check.
    """
    ell = potential.period
    at_ell = integrate_reference(potential, lam, rel_tol)

    def phi(x):
        s = integrate_reference(potential, lam, rel_tol, x_end=x)
        return (at_ell.v * s.u ** 2
                - (at_ell.u - at_ell.v_x) * s.u * s.v
                - at_ell.u_x * s.v ** 2)

    return max(abs(phi(x + ell) - phi(x)) for x in x_samples)
