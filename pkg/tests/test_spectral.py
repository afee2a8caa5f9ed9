import math

import numpy as np
import pytest

from hillspec.errors import (IndeterminatePointError, OutOfBandError)
from hillspec.potentials import builtin, constant
from hillspec.shooting import monodromy_at
from hillspec.spectral import (BandChart, BoundaryCondition, DIRICHLET,
                               DIRICHLET_INDETERMINATE, NEUMANN,
                               NEUMANN_INDETERMINATE, REGULAR,
                               appell_coefficients, density, density_via_f1,
                               discriminant_defect, find_bands,
                               phi_form_check)

FREE = constant(0.0)  # q = 0, period 2 pi: f is known in closed form


def test_boundary_condition_validation():
    assert DIRICHLET.is_dirichlet and not DIRICHLET.is_neumann
    assert NEUMANN.is_neumann and not NEUMANN.is_dirichlet
    with pytest.raises(ValueError):
        BoundaryCondition(-0.1)
    with pytest.raises(ValueError):
        BoundaryCondition(math.pi)


@pytest.mark.parametrize("lam", [0.3, 1.3, 6.7])
def test_free_density_closed_form(lam):
    # Dirichlet: f = sqrt(lam)/pi; Neumann: f = 1/(pi sqrt(lam)).
    d = density(FREE, DIRICHLET, lam, tol=1e-10)
    assert d.f == pytest.approx(math.sqrt(lam) / math.pi, abs=1e-12)
    n = density(FREE, NEUMANN, lam, tol=1e-10)
    assert n.f == pytest.approx(1.0 / (math.pi * math.sqrt(lam)), abs=1e-12)
    assert not d.in_gap and d.converged


def test_free_density_indeterminate_at_integer_quarter():
    # At lam = 4 (period 2 pi) both numerator and denominator of the
    # quotient vanish identically; the point must be flagged, not guessed.
    with pytest.raises(IndeterminatePointError) as exc_info:
        density(FREE, DIRICHLET, 4.0, tol=1e-8)
    assert exc_info.value.lam == 4.0


def test_gap_density_is_exactly_zero():
    d = density(builtin("mathieu"), DIRICHLET, 0.0, tol=1e-8)
    assert d.f == 0.0
    assert d.in_gap


def test_density_strict_flag():
    d = density(builtin("mathieu"), DIRICHLET, 1.75, tol=1e-8,
                max_refinements=1, strict=False)
    assert not d.converged
    assert d.f > 0.0


def test_discriminant_defect_signs():
    p = builtin("mathieu")
    assert discriminant_defect(p, 1.75) > 0.0     # inside band 3
    assert discriminant_defect(p, 1.0) < 0.0      # inside gap 2
    assert discriminant_defect(p, 0.0) < 0.0      # inside gap 1
    assert discriminant_defect(p, -1.0) < 0.0     # below the spectrum


def test_band_chart_validation():
    chart = BandChart(intervals=((0.0, 1.0), (2.0, 3.0)),
                      edge_tags=((REGULAR, REGULAR), (REGULAR, REGULAR)))
    assert chart.gaps == ((1.0, 2.0),)
    with pytest.raises(ValueError):
        BandChart(intervals=((1.0, 1.0),))
    with pytest.raises(ValueError):
        BandChart(intervals=((0.0, 2.0), (1.0, 3.0)))


def test_find_bands_free_potential_single_interval():
    chart = find_bands(FREE, (0.0, 3.0), scan_points=200)
    # q = 0 has no gaps, but it does have touching band edges at
    # lam = (k/2)^2, where the chart splits at the degenerate points.
    assert chart.gaps == ()
    assert chart.intervals[0][0] == pytest.approx(0.0)
    assert chart.intervals[-1][1] == pytest.approx(3.0)
    joints = [iv[1] for iv in chart.intervals[:-1]]
    assert joints == pytest.approx([0.25, 1.0, 2.25], abs=1e-5)


def test_find_bands_validation():
    with pytest.raises(ValueError):
        find_bands(FREE, (1.0, 1.0))
    with pytest.raises(ValueError):
        find_bands(FREE, (0.0, 1.0), scan_points=1)


def test_find_bands_mathieu_first_intervals_and_tags():
    chart = find_bands(builtin("mathieu"), (-0.5, 1.0), scan_points=300)
    assert len(chart.intervals) == 2
    (a1, b1), (a2, b2) = chart.intervals
    assert a1 == pytest.approx(-0.37848922, abs=1e-6)
    assert b1 == pytest.approx(-0.34766913, abs=1e-6)
    assert a2 == pytest.approx(0.59479997, abs=1e-6)
    # Even-symmetric potential: gap edges alternate Neumann/Dirichlet
    # indeterminate types.
    assert chart.edge_tags[0] == (NEUMANN_INDETERMINATE,
                                  DIRICHLET_INDETERMINATE)
    assert chart.edge_tags[1][0] == NEUMANN_INDETERMINATE


def test_appell_normalization_and_f1():
    p = builtin("mathieu")
    for lam in (1.5, 1.75, 3.0):  # interior of the 3rd and 4th bands
        c, _ = monodromy_at(p, lam, 1e-10)
        a, b, c3 = appell_coefficients(c)
        assert 4 * a * c3 - b * b == pytest.approx(4.0, abs=1e-9)
        for bc in (DIRICHLET, NEUMANN, BoundaryCondition(math.pi / 6)):
            f1 = density_via_f1(a, b, c3, bc)
            f4 = density(p, bc, lam, tol=1e-10).f
            assert f1 == pytest.approx(f4, abs=1e-10)


def test_appell_rejects_gap_points():
    c, _ = monodromy_at(builtin("mathieu"), 0.0, 1e-8)
    with pytest.raises(OutOfBandError):
        appell_coefficients(c)


def test_phi_form_periodicity():
    # 1.75 is inside the third stability interval, where the quadratic
    # form is periodic.
    defect = phi_form_check(builtin("mathieu"), 1.75,
                            x_samples=np.linspace(0.0, 2 * math.pi, 5),
                            rel_tol=1e-12)
    assert defect < 1e-9
