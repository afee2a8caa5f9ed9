"""Closed-form propagation across one constant-potential subinterval.

With tau = lambda - q constant on an interval, the solution basis is
phi(t) = sin(w t)/w (tau > 0) or sinh(w t)/w (tau < 0) with w = sqrt(|tau|),
and its derivative phi_x.  A single step of width h is the 2x2 matrix

    A = [[phi_x, phi], [-tau*phi, phi_x]],   det A = 1.

For |tau| t^2 below a cutoff both branches are replaced by one series, so
phi, phi_x, and the lambda-derivative entries are smooth through tau = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Series branch cutoff on |tau| t^2.  With the five-term series below the
# truncation error at the cutoff is ~(1e-2)^5/11! ~ 2.5e-18 relative, so the
# two branches agree to roundoff where they meet.
SERIES_THRESHOLD = 1e-2


def scaling_epsilon(lam: float) -> float:
    """Intervals with tau < -eps get an exp(w h) scale factor."""
    return 1e-12 * max(1.0, abs(lam))


def phi_pair(tau: float, t: float) -> tuple[float, float]:
    """(phi(t), phi_x(t)) for the given tau, valid for all real tau."""
    theta = tau * t * t
    if abs(theta) < SERIES_THRESHOLD:
        phi = t * (1.0 + theta * (-1.0 / 6 + theta * (1.0 / 120 + theta * (
            -1.0 / 5040 + theta / 362880))))
        phi_x = 1.0 + theta * (-0.5 + theta * (1.0 / 24 + theta * (
            -1.0 / 720 + theta / 40320)))
        return phi, phi_x
    w = math.sqrt(abs(tau))
    if tau > 0:
        return math.sin(w * t) / w, math.cos(w * t)
    return math.sinh(w * t) / w, math.cosh(w * t)


def phi_lambda(tau: float, t: float) -> float:
    """d phi / d lambda at fixed t; equals (t*phi_x - phi)/(2 tau).

    The quotient is a 0/0 at tau = 0, so the small-|tau|t^2 regime uses the
    series obtained by differentiating phi's series term by term.
    """
    theta = tau * t * t
    if abs(theta) < SERIES_THRESHOLD:
        t3 = t * t * t
        return t3 * (-1.0 / 6 + theta * (1.0 / 60 + theta * (
            -1.0 / 1680 + theta / 90720)))
    phi, phi_x = phi_pair(tau, t)
    return (t * phi_x - phi) / (2.0 * tau)


def step_matrix(tau: float, h: float) -> np.ndarray:
    """Forward transfer matrix for (y, y') across one interval of width h."""
    phi, phi_x = phi_pair(tau, h)
    return np.array([[phi_x, phi], [-tau * phi, phi_x]])


def step_matrix_inverse(tau: float, h: float) -> np.ndarray:
    """Inverse of `step_matrix` in closed form (backward recurrence)."""
    phi, phi_x = phi_pair(tau, h)
    return np.array([[phi_x, -phi], [tau * phi, phi_x]])


def step_matrix_lambda(tau: float, h: float) -> np.ndarray:
    """Entrywise d/d lambda of `step_matrix` at fixed h."""
    phi, phi_x = phi_pair(tau, h)
    p_lam = phi_lambda(tau, h)
    return np.array([
        [-0.5 * h * phi, p_lam],
        [-0.5 * (phi + h * phi_x), -0.5 * h * phi],
    ])


@dataclass(frozen=True)
class IntervalKernel:
    """Everything one subinterval contributes to a sweep."""

    tau: float
    omega: float
    h: float
    phi: float
    phi_x: float
    sigma: float


class KernelTable:
    """Per-interval sweep quantities for a whole mesh at one lambda.

    Arrays `phi_s`, `phi_x_s`, `phi_lam_s` hold phi/sigma etc., i.e. the
    entries of the scaled matrices A_n / sigma_n; for tau deep below zero
    these are computed directly in the stable form (1 - exp(-2wh))/(2w),
    which never overflows.  `log_sigma` holds w_n h_n for scaled intervals
    and 0 elsewhere.
    """

    def __init__(self, tau: np.ndarray, h: np.ndarray, eps: float,
                 scaled: bool = True):
        tau = np.asarray(tau, dtype=float)
        h = np.asarray(h, dtype=float)
        n = len(tau)
        theta = tau * h * h
        w = np.sqrt(np.abs(tau))

        phi = np.empty(n)
        phi_x = np.empty(n)
        phi_lam = np.empty(n)
        log_sigma = np.zeros(n)

        series = np.abs(theta) < SERIES_THRESHOLD
        if np.any(series):
            th = theta[series]
            hs = h[series]
            phi[series] = hs * (1.0 + th * (-1.0 / 6 + th * (1.0 / 120 + th * (
                -1.0 / 5040 + th / 362880))))
            phi_x[series] = 1.0 + th * (-0.5 + th * (1.0 / 24 + th * (
                -1.0 / 720 + th / 40320)))
            phi_lam[series] = hs ** 3 * (-1.0 / 6 + th * (1.0 / 60 + th * (
                -1.0 / 1680 + th / 90720)))

        pos = ~series & (tau > 0)
        if np.any(pos):
            wt = w[pos] * h[pos]
            phi[pos] = np.sin(wt) / w[pos]
            phi_x[pos] = np.cos(wt)
            phi_lam[pos] = (h[pos] * phi_x[pos] - phi[pos]) / (2 * tau[pos])

        neg = ~series & (tau <= 0)
        if np.any(neg):
            do_scale = neg & (tau < -eps) if scaled else np.zeros(n, bool)
            plain = neg & ~do_scale
            if np.any(plain):
                wt = w[plain] * h[plain]
                phi[plain] = np.sinh(wt) / w[plain]
                phi_x[plain] = np.cosh(wt)
                phi_lam[plain] = (h[plain] * phi_x[plain] - phi[plain]) / (
                    2 * tau[plain])
            if np.any(do_scale):
                wt = w[do_scale] * h[do_scale]
                decay = np.exp(-2.0 * wt)
                # sinh(wt)/w / e^{wt} and cosh(wt)/e^{wt}
                phi[do_scale] = (1.0 - decay) / (2.0 * w[do_scale])
                phi_x[do_scale] = (1.0 + decay) / 2.0
                phi_lam[do_scale] = (h[do_scale] * phi_x[do_scale]
                                     - phi[do_scale]) / (2 * tau[do_scale])
                log_sigma[do_scale] = wt

        # Scale the series-branch entries too when they fall below -eps
        # (sigma is then 1 + O(wh), harmless but kept for consistency).
        if scaled and np.any(series):
            ss = series & (tau < -eps)
            if np.any(ss):
                wt = w[ss] * h[ss]
                log_sigma[ss] = wt
                sig = np.exp(wt)
                phi[ss] /= sig
                phi_x[ss] /= sig
                phi_lam[ss] /= sig

        self.tau = tau
        self.h = h
        self.omega = w
        self.phi_s = phi
        self.phi_x_s = phi_x
        self.phi_lam_s = phi_lam
        self.log_sigma = log_sigma
        # d(log sigma)/d lambda = -h/(2w) on scaled intervals.
        self.dlog_sigma = np.where(log_sigma > 0.0, -h / np.where(
            w > 0, 2.0 * w, 1.0), 0.0)

    def __len__(self):
        return len(self.tau)

    def __getitem__(self, n: int) -> IntervalKernel:
        sigma = math.exp(self.log_sigma[n])
        return IntervalKernel(
            tau=float(self.tau[n]), omega=float(self.omega[n]),
            h=float(self.h[n]), phi=float(self.phi_s[n] * sigma),
            phi_x=float(self.phi_x_s[n] * sigma), sigma=sigma)
