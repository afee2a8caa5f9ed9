import math

import numpy as np
import pytest

from hillspec.errors import (BracketError, OutOfBandError,
                             UnsupportedBoundaryError)
from hillspec.oracle import finite_difference_lambda
from hillspec.potentials import builtin, constant, discretize
from hillspec.shooting import monodromy_at
from hillspec.spectral import DIRICHLET, NEUMANN, BoundaryCondition, density
from hillspec.variational import (density_near_edge, growth_rate,
                                  locate_edge, variational_monodromy,
                                  variational_shoot)

FREE = constant(0.0)


def test_free_potential_derivatives_closed_form():
    # d/d lam of cos(w l), sin(w l)/w etc. with w = sqrt(lam).
    lam, ell = 0.7, FREE.period
    _, d = variational_monodromy(FREE, lam, 1e-10)
    w = math.sqrt(lam)
    s, c = math.sin(w * ell), math.cos(w * ell)
    assert d.u_l == pytest.approx(-ell * s / (2 * w), abs=1e-9)
    assert d.u_xl == pytest.approx(-(s / w + ell * c) / 2, abs=1e-9)
    assert d.v_l == pytest.approx((ell * c - s / w) / (2 * lam), abs=1e-9)
    assert d.v_xl == pytest.approx(-ell * s / (2 * w), abs=1e-9)


@pytest.mark.parametrize("name,lam", [("mathieu", 1.0), ("ex3", 2.0),
                                      ("ex5", 2.0)])
def test_derivatives_match_finite_differences(name, lam):
    p = builtin(name)
    _, d = variational_monodromy(p, lam, 1e-9)
    for attr, pick in (("u_xl", lambda c: c.c12), ("v_l", lambda c: c.c21)):
        fd = finite_difference_lambda(
            lambda la: pick(monodromy_at(p, la, 1e-9)[0]), lam, step=1e-4)
        assert getattr(d, attr) == pytest.approx(fd, rel=5e-5, abs=1e-6)


def test_determinant_derivative_identity():
    # det of the monodromy is 1 for every lambda, so its derivative is 0.
    p = builtin("mathieu")
    for lam in (-0.36, 1.0, 2.0):
        c, d = variational_monodromy(p, lam, 1e-9)
        assert abs(d.determinant_derivative(c)) < 1e-8


def test_variational_shoot_base_matches_plain_shoot():
    from hillspec.shooting import shoot
    mesh = discretize(builtin("mathieu"), 256)
    vec = variational_shoot(mesh, -0.36)
    c = shoot(mesh, -0.36)
    assert np.allclose(vec[:4], [c.c11, c.c12, c.c21, c.c22],
                       rtol=1e-12, atol=1e-12)


def test_locate_edge_free_potential():
    # Band edges of q = 0 sit at lam = (k/2)^2; the one in (0.2, 0.3)
    # is a touching edge (no sign change), found via the minimum.
    assert locate_edge(FREE, (0.2, 0.3)) == pytest.approx(0.25, abs=1e-5)


def test_locate_edge_bisection():
    star = locate_edge(builtin("mathieu"), (0.91, 0.92), tol=1e-10)
    assert star == pytest.approx(0.918058176625, abs=2e-9)


def test_locate_edge_errors():
    with pytest.raises(BracketError):
        locate_edge(builtin("mathieu"), (1.5, 1.6))   # interior of a band
    with pytest.raises(BracketError):
        locate_edge(builtin("mathieu"), (0.3, 0.2))   # empty bracket


def test_density_near_edge_matches_clamped_quotient():
    p = builtin("mathieu")
    star = 0.918058176625
    for lam in (0.9169, 0.9177):
        fix = density_near_edge(p, DIRICHLET, lam, star, tol=1e-8)
        f4 = density(p, DIRICHLET, lam, tol=1e-8).f
        assert fix == pytest.approx(f4, rel=2e-3)


def test_density_near_edge_side_validation():
    p = builtin("mathieu")
    with pytest.raises(OutOfBandError):
        density_near_edge(p, DIRICHLET, 0.93, 0.918058176625)
    with pytest.raises(OutOfBandError):
        density_near_edge(p, NEUMANN, 0.59, 0.594799970122)
    with pytest.raises(UnsupportedBoundaryError):
        density_near_edge(p, BoundaryCondition(math.pi / 6), 0.917,
                          0.918058176625)


def test_growth_rate_exact_square_root_law():
    star = 2.0
    pts = [(star - d, 3.0 / math.sqrt(d)) for d in (1e-3, 1e-4)]
    assert growth_rate(pts[0], pts[1], star) == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        growth_rate((1.0, 1.0), (1.0, 2.0), star)
    with pytest.raises(ValueError):
        growth_rate((1.0, -1.0), (1.5, 2.0), star)
