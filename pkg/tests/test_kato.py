"""Refined Kato inequality sweeps and pointwise subharmonicity checks."""

import numpy as np
import pytest

from hmhf_lab import errors, flows, kato, maps, radial


def _su_map(dr=1 / 64, r_max=4.0):
    traj = radial.su_solve(7, epsilon=1e-6, t_span=(np.log(1e-6), 16.0))
    rho = radial.profile_interpolant(traj)
    flow = flows.ModelFlow(7, 0, flows.StaticScale(1.0), tau_max=1.0)
    target = maps.TargetSpaceForm(7, 1.0)
    return maps.profile_map(flow, target, rho, r_max, dr)


def test_random_jets_have_trace_free_hessians():
    rng = np.random.default_rng(20240801)
    jet = kato.random_jet(5, 3, rng)
    assert jet.grad.shape == (3, 5)
    assert jet.hess.shape == (3, 5, 5)
    for sheet in jet.hess:
        assert abs(np.trace(sheet)) <= 1e-12
        assert np.max(np.abs(sheet - sheet.T)) <= 1e-12


def test_single_jet_inequality_holds():
    rng = np.random.default_rng(3)
    out = kato.kato_check(kato.random_jet(3, 2, rng))
    assert out["holds"]
    assert out["slack"] >= 0.0
    assert not out["degenerate"]


def test_zero_gradient_jets_are_flagged_degenerate():
    jet = kato.HarmonicJet(np.zeros((2, 3)), np.zeros((2, 3, 3)))
    out = kato.kato_check(jet)
    assert out["holds"]
    assert out["degenerate"]


def test_two_dimensional_scalar_jets_attain_equality():
    rng = np.random.default_rng(20240801)
    for _ in range(50):
        grad = rng.normal(size=(1, 2))
        a, b = rng.normal(), rng.normal()
        hess = np.array([[[a, b], [b, -a]]])
        out = kato.kato_check(kato.HarmonicJet(grad, hess))
        scale = max(out["rhs"], 1e-12)
        assert abs(out["slack"]) <= 1e-12 * max(scale, 1.0)


def test_two_dimensional_vector_jets_can_have_positive_slack():
    grad = np.array([[1.0, 0.0], [0.0, 1.0]])
    hess = np.zeros((2, 2, 2))
    hess[0] = np.diag([1.0, -1.0])
    out = kato.kato_check(kato.HarmonicJet(grad, hess))
    assert out["lhs"] == 0.5
    assert out["rhs"] == 1.0
    assert out["slack"] == 0.5


def test_slack_is_invariant_under_domain_rotations():
    rng = np.random.default_rng(11)
    jet = kato.random_jet(4, 2, rng)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    conj = np.einsum("ja,njk,kb->nab", q, jet.hess, q)
    conj = 0.5 * (conj + np.swapaxes(conj, 1, 2))
    drift = np.trace(conj, axis1=1, axis2=2) / 4.0
    conj -= drift[:, None, None] * np.eye(4)[None, :, :]
    turned = kato.kato_check(kato.HarmonicJet(jet.grad @ q, conj))
    base = kato.kato_check(jet)
    assert turned["lhs"] == pytest.approx(base["lhs"], rel=1e-10)
    assert turned["rhs"] == pytest.approx(base["rhs"], rel=1e-10)


def test_asymmetric_hessians_are_rejected():
    hess = np.zeros((1, 3, 3))
    hess[0, 0, 1] = 1.0
    with pytest.raises(errors.ConstraintViolated):
        kato.kato_check(kato.HarmonicJet(np.ones((1, 3)), hess))


def test_sweep_finds_no_violations():
    rep = kato.kato_sweep(samples=20000, seed=20240801)
    assert rep.samples == 20000
    assert rep.violations == 0
    assert rep.worst_slack >= -1e-12
    assert rep.seed == 20240801


def test_sweep_is_reproducible_and_histogrammed():
    rep1 = kato.kato_sweep(samples=5000, seed=123)
    rep2 = kato.kato_sweep(samples=5000, seed=123)
    assert rep1.worst_slack == rep2.worst_slack
    assert rep1.slack_histogram_counts == rep2.slack_histogram_counts
    assert len(rep1.slack_histogram_edges) == 33
    assert sum(rep1.slack_histogram_counts) == rep1.samples - rep1.degenerate


def test_pointwise_suite_on_the_harmonic_profile():
    rep = kato.eh_pointwise_check(_su_map(), 12.0, levels=3)
    assert rep.q == 12.0
    assert rep.min_subharmonicity >= -1e-5
    assert rep.bochner_kato_min_slack >= -1e-5
    assert rep.lap_v_min_slack >= -1e-5
    assert len(rep.level_minima) == 3
    for order in rep.shrink_orders:
        assert np.isnan(order) or 1.5 <= order <= 2.5
    assert not all(np.isnan(order) for order in rep.shrink_orders)


def test_pointwise_suite_requires_large_q():
    with pytest.raises(errors.QTooSmall):
        kato.eh_pointwise_check(_su_map(), 10.0)


def test_pointwise_suite_rejects_non_harmonic_profiles():
    flow = flows.ModelFlow(7, 0, flows.StaticScale(1.0), tau_max=1.0)
    target = maps.TargetSpaceForm(7, 1.0)
    bad = maps.profile_map(flow, target, lambda r: 0.9 * np.tanh(r), 4.0, 1 / 64)
    with pytest.raises(errors.NotHarmonic):
        kato.eh_pointwise_check(bad, 12.0)
