import math

import numpy as np
import pytest

from hillspec.propagator import (KernelTable, SERIES_THRESHOLD, phi_lambda,
                                 phi_pair, scaling_epsilon, step_matrix,
                                 step_matrix_inverse, step_matrix_lambda)


def test_phi_pair_positive_tau():
    phi, phi_x = phi_pair(4.0, 0.7)
    assert phi == pytest.approx(math.sin(2 * 0.7) / 2.0, rel=1e-15)
    assert phi_x == pytest.approx(math.cos(2 * 0.7), rel=1e-15)


def test_phi_pair_negative_tau():
    phi, phi_x = phi_pair(-9.0, 0.5)
    assert phi == pytest.approx(math.sinh(3 * 0.5) / 3.0, rel=1e-15)
    assert phi_x == pytest.approx(math.cosh(3 * 0.5), rel=1e-15)


def test_phi_pair_zero_tau():
    phi, phi_x = phi_pair(0.0, 0.3)
    assert phi == pytest.approx(0.3, abs=1e-16)
    assert phi_x == pytest.approx(1.0, abs=1e-16)


@pytest.mark.parametrize("sign", [1.0, -1.0])
def test_series_branch_consistency(sign):
    # Just inside vs just outside the series window must agree to roundoff.
    t = 0.1
    for margin in (0.999, 1.001):
        tau = sign * margin * SERIES_THRESHOLD / t ** 2
        phi, phi_x = phi_pair(tau, t)
        w = math.sqrt(abs(tau))
        if tau > 0:
            ref = (math.sin(w * t) / w, math.cos(w * t))
        else:
            ref = (math.sinh(w * t) / w, math.cosh(w * t))
        assert phi == pytest.approx(ref[0], rel=1e-14)
        assert phi_x == pytest.approx(ref[1], rel=1e-14)
        assert phi_lambda(tau, t) == pytest.approx(
            (t * ref[1] - ref[0]) / (2 * tau), rel=1e-12)


@pytest.mark.parametrize("tau", [-25.0, -1.0, -1e-9, 0.0, 1e-9, 2.0, 50.0])
def test_step_matrix_unit_determinant(tau):
    a = step_matrix(tau, 0.37)
    assert abs(np.linalg.det(a) - 1.0) < 1e-14
    assert np.allclose(a @ step_matrix_inverse(tau, 0.37), np.eye(2),
                       atol=1e-13)


@pytest.mark.parametrize("tau", [-4.0, -0.01, 0.02, 9.0])
def test_step_matrix_lambda_vs_finite_difference(tau):
    h, eps = 0.3, 1e-6
    fd = (step_matrix(tau + eps, h) - step_matrix(tau - eps, h)) / (2 * eps)
    assert np.allclose(step_matrix_lambda(tau, h), fd, atol=1e-9)


def test_kernel_table_matches_scalar_path():
    tau = np.array([3.0, -2.0, 1e-15, -30.0])
    h = np.array([0.4, 0.4, 0.4, 0.4])
    table = KernelTable(tau, h, scaling_epsilon(1.0), scaled=True)
    for n in range(4):
        k = table[n]
        phi, phi_x = phi_pair(tau[n], h[n])
        # IntervalKernel re-applies sigma, recovering the unscaled entries.
        assert k.phi == pytest.approx(phi, rel=1e-13)
        assert k.phi_x == pytest.approx(phi_x, rel=1e-13)


def test_kernel_table_scaled_entries_bounded():
    # Deep tau < 0 would overflow unscaled; the scaled entries stay <= 1.
    tau = np.full(8, -400.0)
    h = np.full(8, 1.0)
    table = KernelTable(tau, h, scaling_epsilon(1.0), scaled=True)
    assert np.all(np.isfinite(table.phi_s))
    assert np.all(table.phi_s <= 1.0)
    assert np.all(table.phi_x_s <= 1.0)
    assert np.all(table.log_sigma == 20.0)  # w h = 20
    assert table.dlog_sigma == pytest.approx(-h / 40.0)


def test_scaling_epsilon_scales_with_lambda():
    assert scaling_epsilon(0.5) == pytest.approx(1e-12)
    assert scaling_epsilon(-1e4) == pytest.approx(1e-8)
