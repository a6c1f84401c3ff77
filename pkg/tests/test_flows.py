"""Coefficient formulas, curvature quantities, and the hypothesis gate."""

import numpy as np
import pytest

from hmhf_lab import errors, flows


def _static_flat(m=3, tau_max=1.0):
    return flows.ModelFlow(m, 0, flows.StaticScale(1.0), tau_max=tau_max)


def _static_sphere(m=3, tau_max=1.0):
    return flows.ModelFlow(m, 1, flows.StaticScale(1.0), tau_max=tau_max)


def _static_hyperbolic(m=2, tau_max=1.0):
    return flows.ModelFlow(m, -1, flows.StaticScale(1.0), tau_max=tau_max)


def test_static_flat_coefficients_vanish():
    fc = flows.flow_coefficients(_static_flat(), 0.7)
    assert fc.c == 1.0
    assert fc.c_prime == 0.0
    assert fc.lam == 0.0
    assert fc.H == 0.0
    assert fc.dH_dtau == 0.0
    assert fc.h_norm_sq == 0.0
    assert fc.ric_coeff == 0.0


def test_shrinking_sphere_coefficients_at_origin():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    fc = flows.flow_coefficients(sph, 0.0)
    assert fc.c == 1.0
    assert fc.c_prime == 4.0
    assert fc.lam == 2.0
    assert fc.H == 6.0
    assert fc.dH_dtau == -24.0
    assert fc.h_norm_sq == 12.0
    assert fc.ric_coeff == 2.0


def test_shrinking_sphere_coefficients_later():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    fc = flows.flow_coefficients(sph, 1.0)
    assert fc.c == 5.0
    assert fc.lam == pytest.approx(0.4, rel=1e-15)
    assert fc.H == pytest.approx(1.2, rel=1e-15)
    assert fc.ric_coeff == pytest.approx(0.4, rel=1e-15)
    assert fc.h_norm_sq == pytest.approx(0.48, rel=1e-15)


def test_mean_curvature_and_norm_identities():
    rng = np.random.default_rng(20240801)
    for _ in range(20):
        m = int(rng.integers(2, 8))
        c0 = float(rng.uniform(0.5, 3.0))
        slope = float(rng.uniform(-0.3, 3.0))
        flow = flows.ModelFlow(m, 0, flows.AffineScale(c0, slope), tau_max=1.0)
        tau = float(rng.uniform(0.05, 1.0))
        fc = flows.flow_coefficients(flow, tau)
        assert fc.H == pytest.approx(m * fc.lam, rel=1e-14, abs=1e-14)
        assert fc.h_norm_sq == pytest.approx(m * fc.lam ** 2, rel=1e-14, abs=1e-14)
        assert fc.lam == pytest.approx(fc.c_prime / (2.0 * fc.c), rel=1e-14)


def test_static_hyperbolic_ricci_coefficient():
    fc = flows.flow_coefficients(_static_hyperbolic(), 0.5)
    assert fc.ric_coeff == -1.0
    assert fc.H == 0.0


def test_sampled_scale_matches_knots():
    taus = np.linspace(0.0, 1.0, 9)
    values = 1.0 + 0.5 * taus ** 2
    flow = flows.ModelFlow(3, 0, flows.SampledScale(tuple(zip(taus, values))), tau_max=1.0)
    for tau, val in zip(taus, values):
        assert flows.flow_coefficients(flow, float(tau)).c == pytest.approx(val, rel=1e-12)


def test_muller_quantity_vanishes_on_static_flat():
    flow = _static_flat()
    for v in (0.0, 1.0, 7.0):
        assert flows.muller_quantity(flow, 0.5, v) == 0.0


def test_muller_quantity_vanishes_on_shrinking_sphere():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    worst = max(
        abs(flows.muller_quantity(sph, tau, v))
        for tau in (0.0, 0.01, 0.3, 0.9)
        for v in (0.0, 1.0, 4.0)
    )
    assert worst <= 1e-12


def test_muller_quantity_static_hyperbolic_value():
    assert flows.muller_quantity(_static_hyperbolic(), 0.5, 1.0) == -2.0
    assert flows.muller_quantity(_static_hyperbolic(), 0.5, 0.0) == 0.0


def test_trace_harnack_static_flat_vanishes():
    assert flows.trace_harnack(_static_flat(), 1.0, 0.0) == 0.0
    assert flows.trace_harnack(_static_flat(), 0.3, 2.0) == 0.0


def test_trace_harnack_shrinking_sphere_value():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    assert flows.trace_harnack(sph, 1.0, 0.0) == pytest.approx(-0.24, rel=1e-12)


def test_trace_harnack_affine_in_v_norm_sq():
    rng = np.random.default_rng(7)
    for _ in range(10):
        flow = flows.ModelFlow(
            int(rng.integers(2, 6)), 0,
            flows.AffineScale(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.0, 2.0))),
            tau_max=1.0,
        )
        tau = float(rng.uniform(0.1, 1.0))
        f0 = flows.trace_harnack(flow, tau, 0.0)
        f1 = flows.trace_harnack(flow, tau, 1.0)
        v = 7.3
        expected = f0 + (f1 - f0) * v
        assert flows.trace_harnack(flow, tau, v) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_gate_passes_on_nonnegative_curvature_presets():
    for flow in (_static_flat(), _static_sphere()):
        rep = flows.assumption_gate(flow, flows.default_tau_grid(flow))
        assert rep.passes_D and rep.passes_Harnack and rep.passes_H
        assert rep.worst_margin == 0.0


def test_gate_passes_on_shrinking_sphere_with_tight_margin():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    rep = flows.assumption_gate(sph, flows.default_tau_grid(sph))
    assert rep.passes_D and rep.passes_Harnack and rep.passes_H
    assert abs(rep.worst_margin) <= 1e-12


def test_gate_fails_on_static_hyperbolic():
    flow = _static_hyperbolic()
    rep = flows.assumption_gate(flow, flows.default_tau_grid(flow))
    assert not rep.passes_D
    assert rep.worst_margin == -2.0
    assert rep.worst_location[1] == 1.0


def test_gate_passing_is_monotone_in_relaxation():
    flow = _static_hyperbolic()
    rep1 = flows.assumption_gate(flow, flows.default_tau_grid(flow), K=1.0)
    rep2 = flows.assumption_gate(flow, flows.default_tau_grid(flow), K=2.0)
    assert rep1.passes_D and rep1.passes_Harnack and rep1.passes_H
    assert rep2.passes_D and rep2.passes_Harnack and rep2.passes_H


def test_gate_report_dict_round_trip():
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    rep = flows.assumption_gate(sph, flows.default_tau_grid(sph))
    d = rep.to_dict()
    assert sorted(d.keys()) == [
        "K", "passes_D", "passes_H", "passes_Harnack", "worst_location", "worst_margin",
    ]
    assert d["passes_D"] is True


def test_admissibility_constant_values():
    assert flows.admissibility_constant(_static_flat(), 1.0) == 0.0
    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    assert flows.admissibility_constant(sph, 1.0) == 0.0
    waning = flows.ModelFlow(3, 0, flows.AffineScale(1.0, -0.25), tau_max=2.0)
    assert flows.admissibility_constant(waning, 2.0) == pytest.approx(0.25, rel=1e-12)


def test_default_tau_grid_shape_and_span():
    flow = _static_flat(tau_max=2.0)
    grid = flows.default_tau_grid(flow)
    assert grid.size == 65
    assert grid[0] > 0.0
    assert grid[-1] == pytest.approx(2.0, rel=1e-15)
    assert np.all(np.diff(grid) > 0.0)


def test_out_of_horizon_rejected():
    with pytest.raises(errors.OutOfHorizon):
        flows.flow_coefficients(_static_flat(tau_max=1.0), 3.0)


def test_trace_harnack_rejects_tau_zero():
    with pytest.raises(errors.TauZero):
        flows.trace_harnack(_static_flat(), 0.0, 1.0)


def test_gate_rejects_empty_grid():
    with pytest.raises(errors.EmptyGrid):
        flows.assumption_gate(_static_flat(), np.array([]))


def test_non_positive_scale_rejected_at_construction():
    with pytest.raises(errors.NonPositiveScale):
        flows.ModelFlow(3, 0, flows.AffineScale(1.0, -1.0), tau_max=2.0)
