"""Periodic potentials and their step-function discretizations.

A potential is a period plus an evaluable sample rule q(x) on [0, period).
The builtin catalog holds the five standard example potentials; arbitrary
step potentials can be loaded from JSON files (see `fileio`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidMeshError, UnknownPotentialError


@dataclass(frozen=True)
class PeriodicPotential:
    name: str
    period: float
    evaluate: Callable[[float], float] = field(compare=False)
    # For user-supplied step potentials: the exact step structure, used as
    # the starting mesh instead of a uniform subdivision.
    native_mesh: "StepMesh | None" = field(default=None, compare=False)

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")

    def __call__(self, x: float) -> float:
        """Sample q at any real x, wrapping into [0, period)."""
        return self.evaluate(math.fmod(math.fmod(x, self.period) + self.period,
                                       self.period))

    def __hash__(self):
        return hash((self.name, self.period, id(self.evaluate)))


@dataclass(frozen=True)
class StepMesh:
    """Partition of [0, period] with one constant q value per subinterval."""

    breakpoints: np.ndarray  # x_1 = 0 < ... < x_{N+1} = period
    values: np.ndarray       # q_n, length N
    uniform: bool = False    # built by `discretize` (enables exact re-refinement)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidMeshError("mesh needs at least one subinterval")
        if np.any(np.diff(self.breakpoints) <= 0):
            raise InvalidMeshError("breakpoints must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    @property
    def period(self) -> float:
        return float(self.breakpoints[-1])


_TWO_PI = 2.0 * math.pi


def _mathieu(x):
    return math.cos(x)


def _ex2(x):
    return 3.0 / (2.0 + math.sin(x))


def _ex3(x):
    return 1.0 / math.sqrt(1.0 - 0.75 * math.sin(x) ** 2)


def _ex4(x):
    return (0.5 + math.cos(x) + math.cos(2 * x) + math.cos(3 * x)) / math.pi


def _ex5(x):
    return math.sin(x) + 0.5 * math.sin(2 * x) + 0.1 * math.sin(3 * x)


_BUILTINS = {
    "mathieu": (_TWO_PI, _mathieu),
    "ex2": (_TWO_PI, _ex2),
    "ex3": (math.pi, _ex3),
    "ex4": (_TWO_PI, _ex4),
    "ex5": (_TWO_PI, _ex5),
}

# Potentials satisfying q(period - x) = q(x); their monodromy has c11 = c22.
EVEN_SYMMETRIC = frozenset({"mathieu", "ex3", "ex4"})

BUILTIN_NAMES = tuple(sorted(_BUILTINS))


def builtin(name: str) -> PeriodicPotential:
    """Look up one of the builtin example potentials by name."""
    try:
        period, fn = _BUILTINS[name]
    except KeyError:
        raise UnknownPotentialError(
            f"unknown potential {name!r}; choices: {', '.join(BUILTIN_NAMES)}"
        ) from None
    return PeriodicPotential(name=name, period=period, evaluate=fn)


def constant(value: float, period: float = _TWO_PI) -> PeriodicPotential:
    """Constant potential q(x) = value (handy for exact-solution checks)."""
    return PeriodicPotential(name=f"const({value})", period=period,
                             evaluate=lambda x, _v=value: _v)


def step_potential(period: float, breakpoints, values,
                   name: str = "step") -> PeriodicPotential:
    """Potential that is itself a step function on [0, period)."""
    bp = np.asarray(breakpoints, dtype=float)
    vals = np.asarray(values, dtype=float)
    if len(bp) != len(vals) + 1:
        raise ValueError("need len(breakpoints) == len(values) + 1")
    if not math.isclose(bp[0], 0.0) or not math.isclose(bp[-1], period):
        raise ValueError("breakpoints must span [0, period]")

    def evaluate(x, _bp=bp, _vals=vals):
        i = int(np.searchsorted(_bp, x, side="right")) - 1
        return float(_vals[min(max(i, 0), len(_vals) - 1)])

    mesh = StepMesh(breakpoints=bp, values=vals, uniform=False)
    return PeriodicPotential(name=name, period=period, evaluate=evaluate,
                             native_mesh=mesh)


@functools.lru_cache(maxsize=None)
def _uniform_mesh(potential: PeriodicPotential, n: int) -> StepMesh:
    breakpoints = np.linspace(0.0, potential.period, n + 1)
    mids = 0.5 * (breakpoints[:-1] + breakpoints[1:])
    values = np.array([potential.evaluate(m) for m in mids])
    return StepMesh(breakpoints=breakpoints, values=values, uniform=True)


def discretize(potential: PeriodicPotential, n: int) -> StepMesh:
    """Uniform N-interval mesh with midpoint-sampled q values."""
    if n < 1:
        raise InvalidMeshError(f"need at least one subinterval, got {n}")
    return _uniform_mesh(potential, int(n))


def initial_mesh(potential: PeriodicPotential, n0: int) -> StepMesh:
    """Starting mesh for the refinement ladder.

    Step potentials start from their own (possibly nonuniform) structure,
    which represents them exactly; everything else gets a uniform mesh.
    """
    if potential.native_mesh is not None:
        return potential.native_mesh
    return discretize(potential, n0)


def refine(mesh: StepMesh, potential: PeriodicPotential) -> StepMesh:
    """Bisect every subinterval, re-sampling q at the new midpoints."""
    if mesh.uniform:
        # Reconstructing from scratch keeps breakpoints (and hence midpoint
        # samples) bitwise identical to discretize(potential, 2N).
        return _uniform_mesh(potential, 2 * mesh.n)
    old = mesh.breakpoints
    breakpoints = np.empty(2 * mesh.n + 1)
    breakpoints[0::2] = old
    breakpoints[1::2] = 0.5 * (old[:-1] + old[1:])
    mids = 0.5 * (breakpoints[:-1] + breakpoints[1:])
    values = np.array([potential.evaluate(m) for m in mids])
    return StepMesh(breakpoints=breakpoints, values=values, uniform=False)
