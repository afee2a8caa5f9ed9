"""Tight recurrence loops for the forward/backward sweeps.

These are the only hot loops in the solver; everything is scalar float
arithmetic over precomputed per-interval arrays, so they jit cleanly.  If
numba is unavailable the plain-Python versions still run (slowly).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f

# Frames are renormalized into the running log once a component passes this.
_RESCALE_LIMIT = 1e150


@njit(cache=True)
def sweep_match(phi, phi_x, tau, m):
    """Scaled double sweep meeting at point index m (0-based, 0..N).

    `phi`, `phi_x` are the already-scaled entries phi/sigma, phi_x/sigma.
    Forward runs intervals 0..m-1 from unit initial frames; backward runs
    N-1..m from unit terminal frames.  Returns the eight matched frame
    components plus any extra log factors removed by overflow guards.
    """
    n_total = len(tau)
    uf, ufx, vf, vfx = 1.0, 0.0, 0.0, 1.0
    extra_f = 0.0
    for n in range(m):
        a = phi_x[n]
        b = phi[n]
        c = -tau[n] * phi[n]
        uf, ufx = a * uf + b * ufx, c * uf + a * ufx
        vf, vfx = a * vf + b * vfx, c * vf + a * vfx
        big = max(max(abs(uf), abs(ufx)), max(abs(vf), abs(vfx)))
        if big > _RESCALE_LIMIT:
            uf /= big
            ufx /= big
            vf /= big
            vfx /= big
            extra_f += np.log(big)

    ub, ubx, vb, vbx = 1.0, 0.0, 0.0, 1.0
    extra_b = 0.0
    for n in range(n_total - 1, m - 1, -1):
        a = phi_x[n]
        b = -phi[n]
        c = tau[n] * phi[n]
        ub, ubx = a * ub + b * ubx, c * ub + a * ubx
        vb, vbx = a * vb + b * vbx, c * vb + a * vbx
        big = max(max(abs(ub), abs(ubx)), max(abs(vb), abs(vbx)))
        if big > _RESCALE_LIMIT:
            ub /= big
            ubx /= big
            vb /= big
            vbx /= big
            extra_b += np.log(big)

    return uf, ufx, vf, vfx, ub, ubx, vb, vbx, extra_f, extra_b


@njit(cache=True)
def sweep_match_variational(phi, phi_x, phi_lam, tau, h, corr, m):
    """Double sweep carrying the lambda-derivative frames alongside.

    `corr[n]` is h_n/(2 w_n) on scaled intervals (0 elsewhere); it accounts
    for the lambda-dependence of the scale factors.  Returns the 8 base and
    8 derivative components at the match point.
    """
    n_total = len(tau)
    uf, ufx, vf, vfx = 1.0, 0.0, 0.0, 1.0
    duf, dufx, dvf, dvfx = 0.0, 0.0, 0.0, 0.0
    for n in range(m):
        a = phi_x[n]
        b = phi[n]
        c = -tau[n] * phi[n]
        # A_lambda / sigma entries
        ba = -0.5 * h[n] * phi[n]
        bb = phi_lam[n]
        bc = -0.5 * (phi[n] + h[n] * phi_x[n])
        uf1 = a * uf + b * ufx
        ufx1 = c * uf + a * ufx
        vf1 = a * vf + b * vfx
        vfx1 = c * vf + a * vfx
        duf1 = ba * uf + bb * ufx + a * duf + b * dufx + corr[n] * uf1
        dufx1 = bc * uf + ba * ufx + c * duf + a * dufx + corr[n] * ufx1
        dvf1 = ba * vf + bb * vfx + a * dvf + b * dvfx + corr[n] * vf1
        dvfx1 = bc * vf + ba * vfx + c * dvf + a * dvfx + corr[n] * vfx1
        uf, ufx, vf, vfx = uf1, ufx1, vf1, vfx1
        duf, dufx, dvf, dvfx = duf1, dufx1, dvf1, dvfx1

    ub, ubx, vb, vbx = 1.0, 0.0, 0.0, 1.0
    dub, dubx, dvb, dvbx = 0.0, 0.0, 0.0, 0.0
    for n in range(n_total - 1, m - 1, -1):
        a = phi_x[n]
        b = -phi[n]
        c = tau[n] * phi[n]
        # (A^{-1})_lambda / sigma entries
        ba = -0.5 * h[n] * phi[n]
        bb = -phi_lam[n]
        bc = 0.5 * (phi[n] + h[n] * phi_x[n])
        ub1 = a * ub + b * ubx
        ubx1 = c * ub + a * ubx
        vb1 = a * vb + b * vbx
        vbx1 = c * vb + a * vbx
        dub1 = ba * ub + bb * ubx + a * dub + b * dubx + corr[n] * ub1
        dubx1 = bc * ub + ba * ubx + c * dub + a * dubx + corr[n] * ubx1
        dvb1 = ba * vb + bb * vbx + a * dvb + b * dvbx + corr[n] * vb1
        dvbx1 = bc * vb + ba * vbx + c * dvb + a * dvbx + corr[n] * vbx1
        ub, ubx, vb, vbx = ub1, ubx1, vb1, vbx1
        dub, dubx, dvb, dvbx = dub1, dubx1, dvb1, dvbx1

    return (uf, ufx, vf, vfx, ub, ubx, vb, vbx,
            duf, dufx, dvf, dvfx, dub, dubx, dvb, dvbx)
