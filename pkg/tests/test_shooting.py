import math

import numpy as np
import pytest

from hillspec.errors import ConvergenceError
from hillspec.potentials import (PeriodicPotential, builtin, constant,
                                 discretize)
from hillspec.shooting import (double_shoot, monodromy_at, plan_sweep,
                               refine_ladder, shoot, _coefficient_vector)


def free_monodromy(lam, ell):
    # Returned in coefficient order (u, u', v, v') at x = ell.
    w = math.sqrt(lam)
    return (math.cos(w * ell), -w * math.sin(w * ell),
            math.sin(w * ell) / w, math.cos(w * ell))


@pytest.mark.parametrize("lam", [0.3, 1.0, 7.5])
def test_free_potential_exact(lam):
    # The step model represents q = 0 exactly on any mesh.
    p = constant(0.0)
    c = shoot(discretize(p, 4), lam)
    c11, c12, c21, c22 = free_monodromy(lam, p.period)
    assert c.c11 == pytest.approx(c11, abs=1e-13)
    assert c.c12 == pytest.approx(c12, abs=1e-13)
    assert c.c21 == pytest.approx(c21, abs=1e-13)
    assert c.c22 == pytest.approx(c22, abs=1e-13)


def test_constant_shift_property():
    # q = const shifts lambda: coefficients at (q0, lam) = (0, lam - q0).
    lam, q0 = 3.7, 1.2
    a = shoot(discretize(constant(q0), 8), lam)
    b = shoot(discretize(constant(0.0), 8), lam - q0)
    for k in ("c11", "c12", "c21", "c22"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), abs=1e-13)


@pytest.mark.parametrize("name,lam", [("mathieu", -0.36), ("mathieu", 2.0),
                                      ("ex2", 3.0), ("ex3", 4.0),
                                      ("ex5", 1.5)])
def test_unit_determinant(name, lam):
    c = shoot(discretize(builtin(name), 512), lam)
    assert abs(c.determinant - 1.0) < 1e-11


def test_match_point_independence():
    mesh = discretize(builtin("mathieu"), 256)
    lam = -0.36
    ref = double_shoot(plan_sweep(mesh, lam))
    for m in (1, 64, 180, 257):
        c = double_shoot(plan_sweep(mesh, lam, match_index=m))
        assert c.trace == pytest.approx(ref.trace, abs=1e-12)
        assert c.c12 == pytest.approx(ref.c12, abs=1e-12)


def test_match_index_selection():
    # No scale mass (lambda above the potential): split the count.
    mesh = discretize(builtin("mathieu"), 64)
    plan = plan_sweep(mesh, 10.0)
    assert plan.match_index == (64 + 2) // 2
    # With scale mass the split balances the accumulated log sigma.
    plan = plan_sweep(mesh, -0.36)
    assert abs(plan.log_p_front - plan.log_p_back) <= \
        np.max(plan.kernels.log_sigma) + 1e-12
    assert plan.log_p_front >= plan.log_p_back - 1e-12


def test_scaled_equals_unscaled_where_mild():
    mesh = discretize(builtin("mathieu"), 256)
    a = shoot(mesh, -0.36, scaled=True)
    b = shoot(mesh, -0.36, scaled=False)
    for k in ("c11", "c12", "c21", "c22"):
        assert getattr(a, k) == pytest.approx(getattr(b, k), rel=1e-12)


@pytest.mark.parametrize("name", ["mathieu", "ex3", "ex4"])
def test_even_symmetric_potentials_have_c11_equal_c22(name):
    c, _ = monodromy_at(builtin(name), 1.37, 1e-9)
    assert abs(c.c11 - c.c22) < 1e-9


def test_ladder_outcome_fields():
    c, out = monodromy_at(builtin("mathieu"), 1.0, 1e-8)
    assert out.converged
    assert out.mesh.n == 16 * 2 ** out.refinements
    assert out.defect <= 1e-8
    assert np.allclose(out.values, _coefficient_vector(c))


def test_ladder_failure_carries_best_estimate():
    p = builtin("mathieu")
    with pytest.raises(ConvergenceError) as exc_info:
        monodromy_at(p, 1.0, 1e-8, max_refinements=1)
    best = exc_info.value.best
    assert best is not None and not best.converged
    # ... and the non-raising path returns the same unconverged outcome.
    _, out = monodromy_at(p, 1.0, 1e-8, max_refinements=1,
                          raise_on_failure=False)
    assert not out.converged
    assert np.allclose(out.values, best.values)


def test_refine_ladder_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        refine_ladder(builtin("mathieu"), 1.0, 0.0, shoot_fn=shoot,
                      value_of=_coefficient_vector)


def test_simple_mode_matches_double_at_mathieu_amplitude():
    # At |q| <= 1 the unscaled forward recurrence loses nothing visible
    # in double precision: both modes agree far below any tolerance in use.
    mesh = discretize(builtin("mathieu"), 2048)
    for lam in (-0.378, -0.36, -0.348):
        a = shoot(mesh, lam, method="double")
        b = shoot(mesh, lam, method="simple")
        assert abs(a.trace - b.trace) < 1e-12


def test_simple_mode_roundoff_grows_with_amplitude():
    # The forward-only instability is real: on one fixed mesh the
    # simple/double discrepancy tracks the squared growth factor, from
    # ~1e-14 at amplitude 1 to ~1e-6 at amplitude 100.
    diffs = []
    for amp in (1.0, 30.0, 100.0):
        p = PeriodicPotential(name=f"cos-{amp}", period=2 * math.pi,
                              evaluate=lambda x, a=amp: a * math.cos(x))
        mesh = discretize(p, 4096)
        a = shoot(mesh, 0.0, method="double")
        b = shoot(mesh, 0.0, method="simple")
        diffs.append(max(abs(getattr(a, k) - getattr(b, k))
                         / max(1.0, abs(getattr(a, k)))
                         for k in ("c11", "c12", "c21", "c22")))
    assert diffs[0] < 1e-12
    assert diffs[0] < diffs[1] < diffs[2]
    assert diffs[2] > 1e-8
