"""Radial profiles: characteristic roots, pendulum orbits, exponent fits."""

import numpy as np
import pytest

from hmhf_lab import radial


def _root_formula(m):
    return ((m - 2) - np.sqrt(m * m - 8.0 * m + 8.0)) / 2.0


def test_roots_m7_are_two_and_three():
    rd = radial.characteristic_roots(7)
    assert rd.real
    assert rd.discriminant == 1.0
    assert rd.N1 == 2.0
    assert rd.N2 == 3.0


def test_roots_m10_slow_exponent():
    rd = radial.characteristic_roots(10)
    assert rd.N1 == pytest.approx(4.0 - np.sqrt(7.0), abs=1e-14)


def test_roots_complex_below_threshold():
    for m in (3, 4, 5, 6):
        rd = radial.characteristic_roots(m)
        assert not rd.real
        assert rd.discriminant < 0.0
        assert rd.N1 is None and rd.N2 is None
        assert rd.lambda1.real == pytest.approx(-(m - 2) / 2.0, abs=1e-14)


def test_vieta_identities():
    for m in range(7, 13):
        rd = radial.characteristic_roots(m)
        assert rd.N1 + rd.N2 == pytest.approx(m - 2.0, abs=1e-14)
        assert rd.N1 * rd.N2 == pytest.approx(m - 1.0, abs=1e-14)


def test_slow_exponent_decreases_toward_one():
    values = [radial.characteristic_roots(m).N1 for m in range(7, 13)]
    for m, value in zip(range(7, 13), values):
        assert value == pytest.approx(_root_formula(m), abs=1e-10)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert all(v > 1.0 for v in values)


def test_su_orbit_m7_converges_with_slow_exponent():
    traj = radial.su_solve(7, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
    assert traj.classification == "NodeConvergent"
    assert traj.crossing_t is None
    fit = radial.asymptotic_exponent(traj)
    assert fit.matched_root == "N1"
    assert fit.N1_predicted == 2.0
    assert abs(fit.growth_order_of_v - 2.0) < 0.05
    assert fit.stderr < 1e-3
    assert fit.points > 100


def test_su_orbit_m10_slow_exponent():
    traj = radial.su_solve(10, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
    fit = radial.asymptotic_exponent(traj)
    assert abs(fit.growth_order_of_v - 1.35425) < 0.05


def test_low_dimensions_spiral_and_cross():
    for m in (3, 4, 5, 6):
        traj = radial.su_solve(m, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
        assert traj.classification == "SpiralCrossing"
        assert traj.crossing_t is not None
        assert np.isfinite(traj.crossing_t)


def test_orbit_translation_covariance_in_epsilon():
    base = radial.su_solve(7, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
    other = radial.su_solve(7, epsilon=1e-4, t_span=(-20.0, 12.0))
    shift = np.log(1e-4 / 1e-6)
    probe = np.linspace(2.0, 8.0, 50)
    a = np.interp(probe, other.t, other.alpha)
    b = np.interp(probe + shift, base.t, base.alpha)
    assert np.max(np.abs(a - b)) < 1e-3


def test_pole_is_an_equilibrium():
    traj = radial.integrate_pendulum(5, 0.0, 0.0, (0.0, 5.0))
    assert np.max(np.abs(traj.alpha)) == 0.0


def test_profile_interpolant_is_smooth_and_small_at_origin():
    traj = radial.su_solve(7, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
    rho = radial.profile_interpolant(traj)
    r = np.array([1e-3, 1e-2, 0.1, 1.0, 10.0])
    vals = rho(r)
    assert np.all(np.diff(vals) > 0.0)
    assert vals[0] < 1e-2
    assert vals[-1] < np.pi / 2


def test_launch_window_must_reach_far_enough_back():
    with pytest.raises(ValueError):
        radial.su_solve(7, epsilon=1e-4, t_span=(np.log(1e-4), 12.0))
