"""Static figure rendering for the command-line front end.

All figures are written straight to files (Agg backend); nothing is shown
interactively.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_band_chart(chart, path: str, title: str = "") -> None:
    """Horizontal bars for the stability intervals, gaps left blank."""
    fig, ax = plt.subplots(figsize=(8.0, 2.2))
    for left, right in chart.intervals:
        ax.axvspan(left, right, color="tab:blue", alpha=0.6)
    ax.set_yticks([])
    ax.set_xlabel(r"$\lambda$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_density_curve(lams, fs, path: str, title: str = "") -> None:
    """f against lambda; gap points (f = 0) plot on the axis."""
    fig, ax = plt.subplots(figsize=(8.0, 4.0))
    ax.plot(lams, fs, "-", lw=1.0, color="tab:blue")
    ax.plot(lams, fs, ".", ms=3.0, color="tab:blue")
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$f(\lambda)$")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_edge_approach(distances, f_clamped, f_edge, path: str,
                         title: str = "") -> None:
    """Log-log comparison of the two density evaluations approaching an
    edge; a 1/sqrt law is a straight line of slope -1/2."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(distances, f_clamped, "o-", label="clamped quotient")
    ax.loglog(distances, f_edge, "s--", label="edge asymptotics")
    ax.set_xlabel(r"$|\lambda - \lambda^*|$")
    ax.set_ylabel(r"$f(\lambda)$")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
