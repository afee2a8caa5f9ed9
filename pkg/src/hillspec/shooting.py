"""Stabilized double shooting over one period.

The monodromy coefficients c11 = u(l), c12 = u'(l), c21 = v(l),
c22 = v'(l) are assembled from a forward sweep from x = 0 and a backward
sweep from x = l that meet at an interior match point.  Scale factors
exp(w_n h_n) are stripped from intervals where lambda < q to keep every
recurrence matrix at spectral radius one; the stripped factors are carried
in log space and recombined only in the final quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _sweeps
from .errors import ConvergenceError, DegenerateBasisError
from .potentials import PeriodicPotential, StepMesh, initial_mesh, refine
from .propagator import KernelTable, scaling_epsilon

DEFAULT_N0 = 16
DEFAULT_MAX_REFINEMENTS = 8


@dataclass(frozen=True)
class StateFrame:
    y: float
    y_x: float
    log_scale: float = 0.0


@dataclass(frozen=True)
class MatchFrames:
    u_front: StateFrame
    v_front: StateFrame
    u_back: StateFrame
    v_back: StateFrame
    log_p_front: float
    log_p_back: float


@dataclass(frozen=True)
class MonodromyCoefficients:
    c11: float
    c12: float
    c21: float
    c22: float
    log_zeta: float = 0.0

    @property
    def trace(self) -> float:
        return self.c11 + self.c22

    @property
    def determinant(self) -> float:
        return self.c11 * self.c22 - self.c12 * self.c21


@dataclass
class SweepPlan:
    mesh: StepMesh
    lam: float
    kernels: KernelTable
    match_index: int        # 1-based point index M in [1, N+1]
    log_p_front: float      # sum of stripped logs over intervals n < M
    log_p_back: float       # ... over intervals n >= M


def plan_sweep(mesh: StepMesh, lam: float, scaled: bool = True,
               match_index: int | None = None) -> SweepPlan:
    """Build kernels and pick the match point balancing the scale mass."""
    tau = lam - mesh.values
    kernels = KernelTable(tau, mesh.widths, scaling_epsilon(lam),
                          scaled=scaled)
    n = mesh.n
    # front[m] = sum of log sigma over intervals before point index m (0-based)
    front = np.concatenate(([0.0], np.cumsum(kernels.log_sigma)))
    total = front[-1]
    if match_index is not None:
        m1 = int(match_index)
        if not 1 <= m1 <= n + 1:
            raise ValueError(f"match index {m1} outside [1, {n + 1}]")
    elif total == 0.0:
        m1 = (n + 2) // 2  # ceil((N+1)/2): no scale mass, balance the count
    else:
        defect = np.abs(front - 0.5 * total)
        dmin = defect.min()
        ties = np.flatnonzero(defect <= dmin * (1.0 + 1e-12))
        past_half = ties[front[ties] >= 0.5 * total]
        m0 = int(past_half[0]) if len(past_half) else int(ties[-1])
        m1 = m0 + 1
    return SweepPlan(mesh=mesh, lam=lam, kernels=kernels, match_index=m1,
                     log_p_front=float(front[m1 - 1]),
                     log_p_back=float(total - front[m1 - 1]))


def match_frames(plan: SweepPlan) -> MatchFrames:
    """Run both sweeps to the match point."""
    k = plan.kernels
    (uf, ufx, vf, vfx, ub, ubx, vb, vbx, extra_f, extra_b) = \
        _sweeps.sweep_match(k.phi_s, k.phi_x_s, k.tau, plan.match_index - 1)
    lf = plan.log_p_front + extra_f
    lb = plan.log_p_back + extra_b
    return MatchFrames(
        u_front=StateFrame(uf, ufx, lf), v_front=StateFrame(vf, vfx, lf),
        u_back=StateFrame(ub, ubx, lb), v_back=StateFrame(vb, vbx, lb),
        log_p_front=lf, log_p_back=lb)


def assemble_coefficients(frames: MatchFrames) -> MonodromyCoefficients:
    """Combine matched frames into monodromy coefficients."""
    uf, ufx = frames.u_front.y, frames.u_front.y_x
    vf, vfx = frames.v_front.y, frames.v_front.y_x
    ub, ubx = frames.u_back.y, frames.u_back.y_x
    vb, vbx = frames.v_back.y, frames.v_back.y_x
    delta = ub * vbx - ubx * vb
    if abs(delta) < 1e-290:
        raise DegenerateBasisError(
            f"backward basis collapsed (|Delta| = {abs(delta):.3e})")
    log_zeta = frames.log_p_front - frames.log_p_back
    zeta = math.exp(log_zeta)
    return MonodromyCoefficients(
        c11=zeta * (vbx * uf - vb * ufx) / delta,
        c12=zeta * (ub * ufx - ubx * uf) / delta,
        c21=zeta * (vbx * vf - vb * vfx) / delta,
        c22=zeta * (ub * vfx - ubx * vf) / delta,
        log_zeta=log_zeta)


def double_shoot(plan: SweepPlan) -> MonodromyCoefficients:
    return assemble_coefficients(match_frames(plan))


def shoot(mesh: StepMesh, lam: float, method: str = "double",
          scaled: bool = True) -> MonodromyCoefficients:
    """One monodromy evaluation on a fixed mesh.

    method="simple" is the diagnostic forward-only variant: it recurs
    unscaled from x = 0 all the way to x = l, which is exponentially
    unstable wherever lambda < q.
    """
    if method == "double":
        return double_shoot(plan_sweep(mesh, lam, scaled=scaled))
    if method == "simple":
        plan = plan_sweep(mesh, lam, scaled=False, match_index=mesh.n + 1)
        return double_shoot(plan)
    raise ValueError(f"unknown shooting method {method!r}")


@dataclass
class LadderOutcome:
    """Result of one mesh-refinement ladder.

    `values` is the extrapolated estimate of the `value_of` vector at the
    finest mesh reached; `raw` is the unextrapolated result object from the
    last shoot on that mesh.
    """

    values: np.ndarray
    raw: object
    mesh: StepMesh
    refinements: int
    converged: bool
    defect: float


def refine_ladder(potential: PeriodicPotential, lam: float, tol: float,
                  shoot_fn, value_of, monitor=None, n0: int = DEFAULT_N0,
                  max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                  raise_on_failure: bool = True,
                  scaled_tolerance: bool = False) -> LadderOutcome:
    """Repeat `shoot_fn` on bisected meshes until `value_of` settles.

    The per-interval coefficient approximation has a second-order error
    expansion in the mesh width, so each bisection level is combined with
    the previous one by one Richardson step,

        v_ext = v(h/2) + [v(h/2) - v(h)] / 3,

    which removes the leading error term.  Convergence is declared when the
    monitored quantity of either the raw or the extrapolated sequence moves
    by at most `tol` (componentwise, absolute) between successive levels;
    the extrapolated vector at the finest level is returned.  On failure a
    ConvergenceError carrying the last outcome is raised (or, with
    raise_on_failure=False, the unconverged outcome is returned).

    With scaled_tolerance=True the test becomes the mixed criterion
    |change| <= tol * max(1, |value|), appropriate for monitored
    quantities whose magnitude varies over orders of magnitude.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if monitor is None:
        def monitor(v):
            return v
    mesh = initial_mesh(potential, n0)
    raw_prev = None
    mon_raw_prev = None
    mon_ext_prev = None
    result = None
    ext = None
    defect = math.inf
    for step in range(max_refinements + 1):
        result = shoot_fn(mesh, lam)
        val = np.atleast_1d(np.asarray(value_of(result), dtype=float))
        converged = False
        if raw_prev is not None:
            ext = val + (val - raw_prev) / 3.0
            mon_raw = np.atleast_1d(np.asarray(monitor(val), dtype=float))
            mon_ext = np.atleast_1d(np.asarray(monitor(ext), dtype=float))

            def settled(now, before):
                gap = np.abs(now - before)
                allow = tol * np.maximum(1.0, np.abs(now)) \
                    if scaled_tolerance else tol
                return float(np.max(gap)), bool(np.all(gap <= allow))

            if np.all(np.isfinite(mon_raw)):
                d, converged = settled(mon_raw, mon_raw_prev)
                defect = min(defect, d)
            if not converged and mon_ext_prev is not None \
                    and np.all(np.isfinite(mon_ext)):
                d, converged = settled(mon_ext, mon_ext_prev)
                defect = min(defect, d)
            mon_raw_prev = mon_raw
            mon_ext_prev = mon_ext
        else:
            ext = val
            mon_raw_prev = np.atleast_1d(np.asarray(monitor(val), dtype=float))
        if converged:
            return LadderOutcome(values=ext, raw=result, mesh=mesh,
                                 refinements=step, converged=True,
                                 defect=defect)
        raw_prev = val
        if step < max_refinements:
            mesh = refine(mesh, potential)
    outcome = LadderOutcome(values=ext, raw=result, mesh=mesh,
                            refinements=max_refinements, converged=False,
                            defect=defect)
    if raise_on_failure:
        raise ConvergenceError(
            f"no convergence at lambda = {lam} after {max_refinements} "
            f"refinements (defect {defect:.3e})", best=outcome, mesh=mesh,
            defect=defect)
    return outcome


def _coefficient_vector(c: MonodromyCoefficients) -> np.ndarray:
    return np.array([c.c11, c.c12, c.c21, c.c22])


def monodromy_at(potential: PeriodicPotential, lam: float, tol: float,
                 method: str = "double", monitor=None, n0: int = DEFAULT_N0,
                 max_refinements: int = DEFAULT_MAX_REFINEMENTS,
                 raise_on_failure: bool = True,
                 ) -> tuple[MonodromyCoefficients, LadderOutcome]:
    """Converged monodromy coefficients via the refinement ladder.

    By default convergence is monitored on the discriminant c11 + c22;
    pass `monitor` (a function of the 4-vector (c11, c12, c21, c22)) to
    monitor a derived quantity instead.
    """
    if monitor is None:
        def monitor(v):
            return v[0] + v[3]
    outcome = refine_ladder(
        potential, lam, tol,
        shoot_fn=lambda m, la: shoot(m, la, method=method),
        value_of=_coefficient_vector, monitor=monitor,
        n0=n0, max_refinements=max_refinements,
        raise_on_failure=raise_on_failure)
    c11, c12, c21, c22 = outcome.values
    coeffs = MonodromyCoefficients(c11=c11, c12=c12, c21=c21, c22=c22,
                                   log_zeta=outcome.raw.log_zeta)
    return coeffs, outcome
