"""End-to-end acceptance checks, one per numbered criterion.

Each test prints a single pass line once its assertions have held, so a
verbose run reads as a ten-line scorecard.  Tolerances and runtime budgets
are stated inline next to the asserts they guard.
"""

import functools
import time

import numpy as np
import pytest

from hmhf_lab import estimates, flows, kato, maps, radial, reduced


def _static_flat(m=3, tau_max=2.0):
    return flows.ModelFlow(m, 0, flows.StaticScale(1.0), tau_max=tau_max)


@functools.lru_cache(maxsize=None)
def _su_trajectory(m):
    return radial.su_solve(m, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))


@functools.lru_cache(maxsize=None)
def _su_map(r_max, dr, tau_max):
    rho = radial.profile_interpolant(_su_trajectory(7))
    flow = flows.ModelFlow(7, 0, flows.StaticScale(1.0), tau_max=tau_max)
    return maps.profile_map(flow, maps.TargetSpaceForm(7, 1.0), rho, r_max, dr), flow


def test_criterion_01_reduced_distance_oracle():
    start = time.monotonic()
    flow = _static_flat()
    radii = np.linspace(0.1, 5.0, 20)
    taus = np.linspace(0.1, 2.0, 20)
    expected = radii[:, None] ** 2 / (4.0 * taus[None, :])
    worst = 0.0
    for backend in ("closed_form", "variational"):
        field = reduced.build_reduced_field(flow, radii, taus, backend=backend)
        rel = np.max(np.abs(field.ell - expected) / np.abs(expected))
        worst = max(worst, float(rel))
        assert rel <= 1e-6, backend
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    print("criterion 1: PASS - both backends match d^2/4tau, rel %.2e, %.2fs" % (worst, elapsed))


def test_criterion_02_reduced_gradient_and_heat_estimates():
    flat = reduced.reduced_estimate_check(
        _static_flat(), np.linspace(0.2, 3.0, 12), np.linspace(0.4, 1.5, 8), levels=3
    )
    assert flat.grad_max_violation <= 1e-6
    assert abs(flat.grad_value_range[0] - 1.0) <= 1e-6
    assert abs(flat.grad_value_range[1] - 1.0) <= 1e-6
    assert flat.heat_equality_gap <= 1e-6

    sphere = reduced.reduced_estimate_check(
        flows.ModelFlow(3, 1, flows.StaticScale(1.0), tau_max=2.0),
        np.linspace(0.2, 2.8, 10), np.linspace(0.4, 1.5, 8), levels=2,
    )
    assert sphere.grad_max_violation <= 1e-6
    assert sphere.grad_value_range[1] <= 3.0 + 1e-6

    shrinking = reduced.reduced_estimate_check(
        flows.shrinking_sphere(3, 1.0, 1.0),
        np.linspace(0.2, 2.5, 10), np.linspace(0.3, 0.8, 6), levels=3,
    )
    assert shrinking.grad_max_violation <= 1e-6
    assert shrinking.grad_value_range[1] <= 3.0 + 1e-6
    assert shrinking.heat_max_violation <= 1e-6
    assert 1.8 <= shrinking.richardson_order <= 2.2
    print(
        "criterion 2: PASS - |grad d|^2 <= 3 on all windows, flat equality gap %.1e, "
        "Richardson order %.3f" % (flat.heat_equality_gap, shrinking.richardson_order)
    )


def test_criterion_03_assumption_gate():
    for flow in (
        flows.ModelFlow(3, 0, flows.StaticScale(1.0)),
        flows.ModelFlow(3, 1, flows.StaticScale(1.0)),
        flows.shrinking_sphere(3, 1.0, 1.0),
    ):
        rep = flows.assumption_gate(flow, flows.default_tau_grid(flow))
        assert rep.passes_D and rep.passes_Harnack and rep.passes_H
        assert rep.worst_margin >= -1e-12

    sph = flows.shrinking_sphere(3, 1.0, 1.0)
    worst_muller = max(
        abs(flows.muller_quantity(sph, tau, v))
        for tau in (0.01, 0.3, 0.9)
        for v in (0.0, 1.0, 4.0)
    )
    assert worst_muller <= 1e-12

    hyp = flows.ModelFlow(2, -1, flows.StaticScale(1.0))
    bad = flows.assumption_gate(hyp, flows.default_tau_grid(hyp))
    assert not (bad.passes_D and bad.passes_Harnack and bad.passes_H)
    assert bad.worst_margin == -2.0
    assert bad.worst_location[1] == 1.0
    print(
        "criterion 3: PASS - presets pass at K=0 (shrinking-sphere D slack %.1e), "
        "hyperbolic fails with margin -2 at |V|^2 = 1" % worst_muller
    )


def test_criterion_04_bochner_residual_orders():
    flow = flows.ModelFlow(3, 0, flows.StaticScale(1.0), tau_max=1.0)
    target = maps.TargetSpaceForm(3, 1.0)
    cap = maps.profile_map(
        flow, target, lambda r: 0.9 * np.sin(np.pi * r / 2.0) ** 2, 1.0, 1 / 32
    )
    ev = maps.hmhf_evolve(cap, flow, t1=0.01, dr=1 / 32, dt=2e-5, frame_stride=50)
    rep = maps.bochner_residual(ev, flow, 0.5, ev.t[ev.t.size // 2], refinement_levels=3)
    assert len(rep.residuals) == 3
    for order in rep.orders:
        assert 1.8 <= order <= 2.2

    dil = maps.dilation_map(flow, maps.TargetSpaceForm(3, 0.0), 0.5, 4.0, 1 / 4)
    evd = maps.hmhf_evolve(dil, flow, t1=0.02, dr=1 / 4, dt=2e-3, frame_stride=2)
    repd = maps.bochner_residual(evd, flow, 2.0, evd.t[evd.t.size // 2], refinement_levels=2)
    assert max(repd.residuals) < 1e-12
    print(
        "criterion 4: PASS - sphere-target orders %s, dilation residual %.1e"
        % (tuple(round(o, 3) for o in rep.orders), max(repd.residuals))
    )


def test_criterion_05_refined_kato_sweep():
    rep = kato.kato_sweep(samples=100000, seed=20240801)
    assert rep.samples == 100000
    assert rep.violations == 0
    assert rep.worst_slack >= -1e-12

    rng = np.random.default_rng(20240801)
    worst_gap = 0.0
    for _ in range(200):
        grad = rng.normal(size=(1, 2))
        a, b = rng.normal(), rng.normal()
        out = kato.kato_check(kato.HarmonicJet(grad, np.array([[[a, b], [b, -a]]])))
        worst_gap = max(worst_gap, abs(out["slack"]) / max(out["rhs"], 1.0))
    assert worst_gap <= 1e-12
    print(
        "criterion 5: PASS - 1e5 jets, 0 violations (worst slack %.1e), "
        "m=2 equality gap %.1e" % (rep.worst_slack, worst_gap)
    )


def test_criterion_06_asymptotic_exponents():
    start = time.monotonic()
    fit7 = radial.asymptotic_exponent(_su_trajectory(7))
    assert abs(fit7.growth_order_of_v - 2.0) < 0.05
    fit10 = radial.asymptotic_exponent(_su_trajectory(10))
    assert abs(fit10.growth_order_of_v - 1.35425) < 0.05

    crossings = {}
    for m in (3, 4, 5, 6):
        traj = _su_trajectory(m)
        assert traj.classification == "SpiralCrossing"
        assert traj.crossing_t is not None and np.isfinite(traj.crossing_t)
        crossings[m] = round(float(traj.crossing_t), 3)

    for m in range(7, 13):
        rd = radial.characteristic_roots(m)
        assert abs(rd.N1 + rd.N2 - (m - 2.0)) <= 1e-14
        assert abs(rd.N1 * rd.N2 - (m - 1.0)) <= 1e-14
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    print(
        "criterion 6: PASS - exponents %.4f / %.4f, crossings %s, Vieta to 1e-14, %.1fs"
        % (fit7.growth_order_of_v, fit10.growth_order_of_v, crossings, elapsed)
    )


def test_criterion_07_pointwise_suite_on_su_profile():
    su_map, _ = _su_map(4.0, 1 / 64, 1.0)
    rep = kato.eh_pointwise_check(su_map, 12.0, levels=3)
    assert rep.min_subharmonicity >= -1e-5
    assert rep.bochner_kato_min_slack >= -1e-5
    assert rep.lap_v_min_slack >= -1e-5
    shrinking = [o for o in rep.shrink_orders if not np.isnan(o)]
    assert shrinking
    for order in shrinking:
        assert 1.5 <= order <= 2.5
    print(
        "criterion 7: PASS - q=12 minima (%.3g, %.3g, %.3g), shrink orders %s"
        % (
            rep.min_subharmonicity,
            rep.bochner_kato_min_slack,
            rep.lap_v_min_slack,
            tuple(round(o, 2) for o in shrinking),
        )
    )


def test_criterion_08_npc_gradient_estimate_verdicts():
    flow = flows.ModelFlow(3, 0, flows.StaticScale(1.0), tau_max=1700.0)
    dil = maps.dilation_map(flow, maps.TargetSpaceForm(3, 0.0), 0.01, 48.0, 0.25)
    margins = []
    for R in (10.0, 20.0, 40.0):
        rep = estimates.gradient_estimate_verify_npc(dil, flow, R, R * R, 0.0)
        assert rep.verdict == "Holds", R
        margins.append(round(rep.margin, 3))

    cs = estimates.constants_from_values(2, 1.0, 1.0)
    assert cs.Cbar_m == 106.6875
    assert cs.Ctilde1 == 1.5
    assert cs.Ctilde2 == 7.5
    print("criterion 8: PASS - windows R=10/20/40 Hold (margins %s), unit constants exact" % (margins,))


def test_criterion_09_pos_gradient_estimate_verdicts():
    flow = flows.ModelFlow(3, 0, flows.StaticScale(1.0), tau_max=1700.0)
    cmap = maps.constant_map(flow, maps.TargetSpaceForm(3, 1.0), 48.0, 0.25)
    rep_const = estimates.gradient_estimate_verify_pos(cmap, flow, 10.0, 100.0, 0.0)
    assert rep_const.verdict == "Holds"
    assert rep_const.margin > 0.0

    su_map, su_flow = _su_map(48.0, 0.25, 1700.0)
    su_at_10 = None
    for R in (10.0, 20.0, 40.0):
        rep = estimates.gradient_estimate_verify_pos(su_map, su_flow, R, R * R, 0.0)
        assert rep.verdict == "Holds", R
        assert rep.margin > 0.0
        if R == 10.0:
            su_at_10 = rep

    start = maps.profile_map(
        flow, maps.TargetSpaceForm(3, 1.0), lambda r: 0.9 * np.exp(-r * r), 48.0, 0.25
    )
    cap, _ = maps.relax_to_harmonic(start, flow, dt=0.01)
    rep_cap = estimates.gradient_estimate_verify_pos(cap, flow, 10.0, 100.0, 0.0)
    assert rep_cap.verdict == "Holds"
    assert rep_cap.margin > 0.0
    ratio = rep_cap.margin / su_at_10.margin
    print(
        "criterion 9: PASS - constant/SU/cap all Hold; cap-to-SU margin ratio at R=10 "
        "recorded as %.3e (both margins positive)" % ratio
    )


def test_criterion_10_sharpness_scans_and_root_trend():
    flow = flows.ModelFlow(3, 0, flows.StaticScale(1.0), tau_max=1700.0)
    dil = maps.dilation_map(flow, maps.TargetSpaceForm(3, 0.0), 0.01, 48.0, 0.25)
    scan_d = estimates.liouville_scan(dil, flow, [3.0, 6.0, 12.0, 24.0, 48.0], "NPC_growth")
    assert scan_d.classification == "HypothesisViolated"
    assert 0.95 <= scan_d.exponent <= 1.05

    su_map, su_flow = _su_map(180.0, 0.25, 1700.0)
    scan_s = estimates.liouville_scan(
        su_map, su_flow, [10.0, 20.0, 40.0, 80.0, 160.0], "Static_linear"
    )
    assert 1.9 <= scan_s.exponent <= 2.1

    values = []
    for m in range(7, 13):
        rd = radial.characteristic_roots(m)
        formula = ((m - 2) - np.sqrt(m * m - 8.0 * m + 8.0)) / 2.0
        assert abs(rd.N1 - formula) <= 1e-10
        values.append(rd.N1)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert all(v > 1.0 for v in values)
    print(
        "criterion 10: PASS - dilation scan exponent %.6f (violated), secant growth "
        "exponent %.4f, N1(m) decreases toward 1 per the root formula"
        % (scan_d.exponent, scan_s.exponent)
    )
