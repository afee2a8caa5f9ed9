"""Command-line front end.

Subcommands::

    hillspec bands   --potential mathieu --range -1:10
    hillspec density --potential mathieu --alpha 0 --range -0.4:10 --grid 66
    hillspec edge    --potential mathieu --alpha 0 --bracket 0.91:0.92
    hillspec vcheck  --potential mathieu --lam -0.35 --lam 1.0 --lam 2.0

Each command writes one tabular artifact (CSV or JSON, `--format`) to
`--output` (default stdout) and optionally a figure to `--plot`.

Exit codes: 0 success; 1 numerical failure (partial output is still
written); 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import plots
from .errors import HillspecError
from .fileio import Artifact, load_potential, write_csv, write_json
from .oracle import finite_difference_lambda
from .potentials import BUILTIN_NAMES, PeriodicPotential, builtin
from .shooting import monodromy_at
from .spectral import (BoundaryCondition, _classify_edge, density, find_bands)
from .variational import density_near_edge, growth_rate, locate_edge, \
    variational_monodromy

# Tolerance used for lambda-derivative and finite-difference cross checks;
# the FD quotient with step 1e-4 cannot see anything tighter.
FD_EVAL_TOL = 1e-9


def _parse_alpha(text: str) -> float:
    """Boundary angle: a float, or 'pi', 'pi/6', 'dirichlet', 'neumann'."""
    s = text.strip().lower()
    if s == "dirichlet":
        return 0.0
    if s == "neumann":
        return 0.5 * math.pi
    if s == "pi":
        return math.pi
    if s.startswith("pi/"):
        return math.pi / float(s[3:])
    return float(s)


def _parse_pair(text: str, what: str,
                allow_point: bool = False) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"{what} must look like lo:hi, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"{what} endpoints must be numbers, got {text!r}") from None
    if (lo > hi) if allow_point else (not lo < hi):
        op = "lo <= hi" if allow_point else "lo < hi"
        raise argparse.ArgumentTypeError(f"{what} needs {op}, got {text!r}")
    return lo, hi


def _resolve_potential(spec: str) -> PeriodicPotential:
    if spec in BUILTIN_NAMES:
        return builtin(spec)
    return load_potential(spec)


def _read_lambda_file(path: str) -> list[float]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                out.append(float(line))
    if not out:
        raise ValueError(f"no lambda values found in {path}")
    return out


def _emit(artifact: Artifact, args) -> None:
    write = write_csv if args.format == "csv" else write_json
    if args.output in (None, "-"):
        write(sys.stdout, artifact)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            write(fh, artifact)


def cmd_bands(args) -> int:
    potential = _resolve_potential(args.potential)
    meta = {"potential": potential.name, "tol": args.tol,
            "range_lo": args.range[0], "range_hi": args.range[1]}
    artifact = Artifact(command="bands",
                        columns=("left", "right", "left_tag", "right_tag"),
                        rows=[], meta=meta)
    status = 0
    try:
        chart = find_bands(potential, args.range,
                           scan_points=args.scan_points, tol=args.tol)
        artifact.rows = [(left, right, tags[0], tags[1])
                         for (left, right), tags
                         in zip(chart.intervals, chart.edge_tags)]
    except HillspecError as exc:
        meta["error"] = str(exc)
        print(f"hillspec bands: {exc}", file=sys.stderr)
        status = 1
    _emit(artifact, args)
    if args.plot and artifact.rows:
        plots.render_band_chart(chart, args.plot,
                                title=f"stability intervals: {potential.name}")
    return status


def _density_row(potential, bc, lam, tol):
    """(lam, f, in_gap, mesh_n, converged, indeterminate)."""
    from .errors import IndeterminatePointError
    try:
        pt = density(potential, bc, lam, tol=tol, strict=False)
        return (pt.lam, pt.f, pt.in_gap, pt.mesh_n, pt.converged, False)
    except IndeterminatePointError:
        return (lam, math.nan, False, 0, True, True)


def cmd_density(args) -> int:
    potential = _resolve_potential(args.potential)
    bc = BoundaryCondition(args.alpha)
    lams = np.linspace(args.range[0], args.range[1], args.grid)
    meta = {"potential": potential.name, "alpha": args.alpha,
            "tol": args.tol, "grid": args.grid}

    def compute_rows():
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                rows = list(pool.map(
                    lambda lam: _density_row(potential, bc, lam, args.tol),
                    lams))
        else:
            rows = [_density_row(potential, bc, lam, args.tol)
                    for lam in lams]
        return rows  # already in lambda order: map preserves input order

    if args.bench is not None:
        repeats = args.bench
        start = time.perf_counter()
        for _ in range(repeats):
            rows = compute_rows()
        meta["bench_repeats"] = repeats
        meta["bench_mean_seconds"] = (time.perf_counter() - start) / repeats
    else:
        rows = compute_rows()

    columns = ["lam", "f", "in_gap", "mesh_n", "converged", "indeterminate"]
    if args.rho:
        # Labeled cumulative trapezoid of the sampled f over this grid --
        # an estimate of rho(lambda) - rho(lambda_0), not the exact measure.
        f = np.nan_to_num(np.array([r[1] for r in rows]), nan=0.0)
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(lams))))
        rows = [row + (float(c),) for row, c in zip(rows, cum)]
        columns.append("cumtrapz_f")
        meta["cumtrapz_note"] = ("grid trapezoid of f; indeterminate "
                                 "points contribute zero")
    artifact = Artifact(command="density", columns=tuple(columns),
                        rows=rows, meta=meta)
    status = 1 if any(not r[4] for r in rows) else 0
    if status:
        print("hillspec density: some points did not converge "
              "(converged=false rows carry the best available estimate)",
              file=sys.stderr)
    _emit(artifact, args)
    if args.plot:
        fs = [0.0 if math.isnan(r[1]) else r[1] for r in rows]
        plots.render_density_curve(
            lams, fs, args.plot,
            title=f"f: {potential.name}, alpha = {args.alpha:g}")
    return status


def cmd_edge(args) -> int:
    potential = _resolve_potential(args.potential)
    bc = BoundaryCondition(args.alpha)
    lam_star = locate_edge(potential, args.bracket, tol=1e-10)
    tag = _classify_edge(potential, lam_star, args.tol)
    meta = {"potential": potential.name, "alpha": args.alpha,
            "tol": args.tol, "lambda_star": lam_star, "edge_tag": tag}
    if args.lambdas:
        lam_list = _read_lambda_file(args.lambdas)
    else:
        # Default approach sequence: halving distances on the band side.
        side = -1.0 if bc.is_dirichlet else 1.0
        lam_list = [lam_star + side * 1e-3 * 0.5 ** k for k in range(8)]

    rows = []
    prev = None
    status = 0
    for lam in lam_list:
        try:
            f_clamped = density(potential, bc, lam, tol=args.tol,
                                strict=False).f
        except HillspecError:
            f_clamped = math.nan
        try:
            f_edge = density_near_edge(potential, bc, lam, lam_star,
                                       tol=args.tol)
        except HillspecError as exc:
            print(f"hillspec edge: {exc}", file=sys.stderr)
            f_edge, status = math.nan, 1
        rate = math.nan
        if prev is not None and f_clamped > 0.0 and prev[1] > 0.0:
            with contextlib.suppress(ValueError):
                rate = growth_rate(prev, (lam, f_clamped), lam_star)
        rows.append((lam, abs(lam - lam_star), f_clamped, f_edge, rate))
        prev = (lam, f_clamped)
    artifact = Artifact(command="edge",
                        columns=("lam", "distance", "f_clamped",
                                 "f_edge_asymptotic", "rate"),
                        rows=rows, meta=meta)
    _emit(artifact, args)
    if args.plot:
        ok = [r for r in rows if r[2] > 0.0 and not math.isnan(r[3])]
        if ok:
            plots.render_edge_approach(
                [r[1] for r in ok], [r[2] for r in ok], [r[3] for r in ok],
                args.plot, title=f"edge at {lam_star:.9f}")
    return status


def cmd_vcheck(args) -> int:
    potential = _resolve_potential(args.potential)
    lam_list = list(args.lam or [])
    if args.lambdas:
        lam_list += _read_lambda_file(args.lambdas)
    if not lam_list:
        raise argparse.ArgumentTypeError(
            "vcheck needs at least one --lam or a --lambdas file")
    rows = []
    status = 0
    for lam in lam_list:
        try:
            _, derivs = variational_monodromy(potential, lam, args.tol)
            fd_u_xl = finite_difference_lambda(
                lambda la: monodromy_at(potential, la, FD_EVAL_TOL)[0].c12,
                lam, step=args.fd_step)
            fd_v_l = finite_difference_lambda(
                lambda la: monodromy_at(potential, la, FD_EVAL_TOL)[0].c21,
                lam, step=args.fd_step)
        except HillspecError as exc:
            print(f"hillspec vcheck: {exc}", file=sys.stderr)
            status = 1
            continue
        rel = max(abs(fd_u_xl - derivs.u_xl) / max(1.0, abs(derivs.u_xl)),
                  abs(fd_v_l - derivs.v_l) / max(1.0, abs(derivs.v_l)))
        rows.append((lam, fd_u_xl, derivs.u_xl, fd_v_l, derivs.v_l, rel))
    artifact = Artifact(command="vcheck",
                        columns=("lam", "fd_u_xlam", "analytic_u_xlam",
                                 "fd_v_lam", "analytic_v_lam", "rel_diff"),
                        rows=rows,
                        meta={"potential": potential.name, "tol": args.tol,
                              "fd_step": args.fd_step})
    _emit(artifact, args)
    return status


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", default="mathieu",
                        help="builtin name (%s) or JSON step-potential file"
                        % ", ".join(BUILTIN_NAMES))
    common.add_argument("--tol", type=float, default=1e-8,
                        help="working tolerance (default 1e-8)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", default="-",
                        help="output file ('-' = stdout)")
    common.add_argument("--plot", default=None, metavar="FILE",
                        help="also render a figure to FILE")
    common.add_argument("--threads", type=int, default=1)

    parser = argparse.ArgumentParser(
        prog="hillspec",
        description="Spectral density and band structure of Hill's equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bands", parents=[common],
                       help="chart the stability intervals")
    p.add_argument("--range", required=True,
                   type=lambda s: _parse_pair(s, "--range"))
    p.add_argument("--scan-points", type=int, default=2000)
    p.set_defaults(fn=cmd_bands)

    p = sub.add_parser("density", parents=[common],
                       help="evaluate f on a lambda grid")
    p.add_argument("--alpha", type=_parse_alpha, default=0.0)
    p.add_argument("--range", required=True,
                   type=lambda s: _parse_pair(s, "--range", allow_point=True))
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--rho", action="store_true",
                   help="append a cumulative-trapezoid column")
    p.add_argument("--bench", type=int, nargs="?", const=100, default=None,
                   metavar="N", help="repeat the grid N times (default 100) "
                   "and report the mean wall time")
    p.set_defaults(fn=cmd_density)

    p = sub.add_parser("edge", parents=[common],
                       help="diagnose the density near a band edge")
    p.add_argument("--alpha", type=_parse_alpha, default=0.0)
    p.add_argument("--bracket", required=True,
                   type=lambda s: _parse_pair(s, "--bracket"))
    p.add_argument("--lambdas", default=None,
                   help="file with one approach lambda per line")
    p.set_defaults(fn=cmd_edge)

    p = sub.add_parser("vcheck", parents=[common],
                       help="analytic vs finite-difference lambda-derivatives")
    p.add_argument("--lam", type=float, action="append")
    p.add_argument("--lambdas", default=None,
                   help="file with one lambda per line")
    p.add_argument("--fd-step", type=float, default=1e-4)
    p.set_defaults(fn=cmd_vcheck)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not 1e-12 <= args.tol <= 1e-2:
        parser.error(f"--tol must lie in [1e-12, 1e-2], got {args.tol}")
    if getattr(args, "grid", 1) < 1:
        parser.error("--grid must be at least 1")
    if args.threads < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.fn(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (OSError, ValueError) as exc:
        parser.error(str(exc))
    except HillspecError as exc:
        print(f"hillspec {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
