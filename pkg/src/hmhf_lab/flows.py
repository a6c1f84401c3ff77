"""Model backward conformal flows and their pointwise hypothesis checks.

A model flow is g(tau) = c(tau) g0 on an m-dimensional space form
(M0, g0) of constant curvature k0 in {-1, 0, +1}, with tau in
[0, tau_max] and c smooth and positive.  Because the conformal factor is
spatially constant, every flow quantity reduces to scalar functions of
tau measured against g(tau):

    h        = (1/2) d_tau g      eigenvalue  lam = c'/(2c)
    H        = tr h               = m lam
    |h|^2                         = m lam^2
    Ric                           eigenvalue  ric_coeff = (m-1) k0 / c

The two pointwise quantities whose sign hypotheses the rest of the
laboratory consumes are, for a vector V with |V|^2_{g(tau)} = v_norm_sq,

    D(V) = -d_tau H - 2|h|^2 + 2 (ric_coeff - lam) v_norm_sq
    Harnack(V) = -d_tau H - H/tau + 2 lam v_norm_sq

(spatial-gradient and divergence terms vanish identically here).  The
gate checks, on a tau grid and for every V,

    D(V) >= -2K (H + |V|^2),   Harnack(V) >= -H/tau,   H >= 0.

Both quantities are affine in v_norm_sq, so each condition reduces to a
constant-term check and a slope check; the gate evaluates slacks at
|V|^2 = 0 and |V|^2 = 1 and the slope condition is exactly the
(-K)-lower Ricci bound Ric >= h - K g on these flows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyGrid, NonPositiveScale, OutOfHorizon, TauZero

_POSITIVITY_SAMPLES = 4097


@dataclass(frozen=True)
class StaticScale:
    """c(tau) = c0."""

    c0: float = 1.0

    def value(self, tau):
        return self.c0 + 0.0 * np.asarray(tau, dtype=float)

    def derivative(self, tau):
        return 0.0 * np.asarray(tau, dtype=float)

    def second_derivative(self, tau):
        return 0.0 * np.asarray(tau, dtype=float)


@dataclass(frozen=True)
class AffineScale:
    """c(tau) = c0 + slope * tau."""

    c0: float = 1.0
    slope: float = 0.0

    def value(self, tau):
        return self.c0 + self.slope * np.asarray(tau, dtype=float)

    def derivative(self, tau):
        return self.slope + 0.0 * np.asarray(tau, dtype=float)

    def second_derivative(self, tau):
        return 0.0 * np.asarray(tau, dtype=float)


@lru_cache(maxsize=64)
def _knot_spline(knots):
    from scipy.interpolate import CubicSpline

    taus = np.array([k[0] for k in knots], dtype=float)
    cs = np.array([k[1] for k in knots], dtype=float)
    return CubicSpline(taus, cs, bc_type="natural")


@dataclass(frozen=True)
class SampledScale:
    """c(tau) interpolated through (tau, c) knots by a natural cubic spline."""

    knots: tuple

    def __post_init__(self):
        if len(self.knots) < 2:
            raise ValueError("sampled scale needs at least two knots")
        object.__setattr__(
            self, "knots", tuple((float(t), float(c)) for t, c in self.knots)
        )
        taus = [k[0] for k in self.knots]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("sampled scale knots must have increasing tau")

    def value(self, tau):
        return _knot_spline(self.knots)(np.asarray(tau, dtype=float))

    def derivative(self, tau):
        return _knot_spline(self.knots)(np.asarray(tau, dtype=float), 1)

    def second_derivative(self, tau):
        return _knot_spline(self.knots)(np.asarray(tau, dtype=float), 2)


@dataclass(frozen=True)
class ModelFlow:
    """Conformal family g(tau) = c(tau) g0 on a space form.

    dimension: m >= 2; base_curvature: k0 in {-1, 0, +1}; scale: one of
    the scale families above; tau_max: horizon, tau in [0, tau_max].
    """

    dimension: int
    base_curvature: int
    scale: object
    tau_max: float = 1.0

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ValueError("dimension must be an integer >= 2")
        if self.base_curvature not in (-1, 0, 1):
            raise ValueError("base_curvature must be -1, 0, or +1")
        if not self.tau_max > 0.0:
            raise ValueError("tau_max must be positive")
        probe = np.linspace(0.0, self.tau_max, _POSITIVITY_SAMPLES)
        c = np.asarray(self.scale.value(probe), dtype=float)
        if not np.all(c > 0.0):
            bad = float(probe[np.argmin(c)])
            raise NonPositiveScale(
                f"scale is non-positive near tau={bad:.6g} (min c={c.min():.6g})"
            )

    def check_tau(self, tau, allow_zero=True):
        tau = np.asarray(tau, dtype=float)
        lo = np.min(tau)
        if lo < 0.0 or np.max(tau) > self.tau_max:
            raise OutOfHorizon(
                f"tau outside [0, {self.tau_max}]: range [{lo}, {np.max(tau)}]"
            )
        if not allow_zero and lo == 0.0:
            raise TauZero("tau = 0 not allowed here")


def shrinking_sphere(dimension, c0=1.0, tau_max=1.0):
    """Round-sphere preset c(tau) = c0 + 2(m-1) tau, k0 = +1.

    The only member of the affine family with h = Ric identically.
    """
    return ModelFlow(
        dimension=dimension,
        base_curvature=1,
        scale=AffineScale(c0=c0, slope=2.0 * (dimension - 1)),
        tau_max=tau_max,
    )


@dataclass(frozen=True)
class FlowCoefficients:
    """Scalar flow data at one tau, measured against g(tau)."""

    tau: float
    c: float
    c_prime: float
    lam: float
    H: float
    dH_dtau: float
    h_norm_sq: float
    ric_coeff: float


def flow_coefficients(flow, tau):
    """Evaluate c, c', lam, H, dH/dtau, |h|^2, ric_coeff at one tau."""
    flow.check_tau(tau)
    m = flow.dimension
    c = float(flow.scale.value(tau))
    cp = float(flow.scale.derivative(tau))
    cpp = float(flow.scale.second_derivative(tau))
    lam = cp / (2.0 * c)
    H = m * lam
    # H = m c'/(2c)  =>  dH/dtau = m (c''/(2c) - 2 lam^2)
    dH = m * (cpp / (2.0 * c) - 2.0 * lam * lam)
    return FlowCoefficients(
        tau=float(tau),
        c=c,
        c_prime=cp,
        lam=lam,
        H=H,
        dH_dtau=dH,
        h_norm_sq=m * lam * lam,
        ric_coeff=(m - 1) * flow.base_curvature / c,
    )


def muller_quantity(flow, tau, v_norm_sq):
    """D(V) = -d_tau H - 2|h|^2 + 2 (ric_coeff - lam) v_norm_sq.

    Affine in v_norm_sq.  Well defined down to tau = 0 (no 1/tau term).
    """
    if v_norm_sq < 0.0:
        raise ValueError("v_norm_sq must be non-negative")
    co = flow_coefficients(flow, tau)
    return -co.dH_dtau - 2.0 * co.h_norm_sq + 2.0 * (co.ric_coeff - co.lam) * v_norm_sq


def trace_harnack(flow, tau, v_norm_sq):
    """Harnack(V) = -d_tau H - H/tau + 2 lam v_norm_sq.  Needs tau > 0."""
    if v_norm_sq < 0.0:
        raise ValueError("v_norm_sq must be non-negative")
    if tau == 0.0:
        raise TauZero("trace Harnack quantity has a 1/tau term")
    flow.check_tau(tau, allow_zero=False)
    co = flow_coefficients(flow, tau)
    return -co.dH_dtau - co.H / tau + 2.0 * co.lam * v_norm_sq


def admissibility_constant(flow, tau, samples=2049):
    """Smallest c_tau >= 0 with h >= -c_tau g on [0, tau]: sup max(0, -lam)."""
    flow.check_tau(tau)
    grid = np.linspace(0.0, float(tau), samples)
    c = np.asarray(flow.scale.value(grid), dtype=float)
    cp = np.asarray(flow.scale.derivative(grid), dtype=float)
    lam = cp / (2.0 * c)
    return float(max(0.0, np.max(-lam)))


def default_tau_grid(flow, n=65):
    """Log-spaced gate grid on [1e-4 tau_max, tau_max].

    The gate conditions are scale-invariant in tau near 0 for the model
    family, so the grid floor only sets how far toward the initial slice
    the hypotheses are probed.
    """
    return np.geomspace(1e-4 * flow.tau_max, flow.tau_max, n)


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of the hypothesis gate on a tau grid.

    worst_margin is the most negative slack found over all three
    conditions, all grid times and |V|^2 in {0, 1} (the affine structure
    makes those two evaluations decisive for all V);  worst_location is
    the (tau, |V|) pair attaining it, first hit wins.
    """

    passes_D: bool
    passes_Harnack: bool
    passes_H: bool
    K: float
    worst_margin: float
    worst_location: tuple

    @property
    def passes(self):
        return self.passes_D and self.passes_Harnack and self.passes_H

    def to_dict(self):
        return {
            "passes_D": self.passes_D,
            "passes_Harnack": self.passes_Harnack,
            "passes_H": self.passes_H,
            "K": self.K,
            "worst_margin": self.worst_margin,
            "worst_location": list(self.worst_location),
        }


#: Sign decisions in the gate allow this much rounding noise; the model
#: coefficients are closed forms, so exact-zero slacks (soliton identity
#: on the shrinking sphere) evaluate to a few ulp rather than to 0.0.
GATE_TOL = 1e-12


def assumption_gate(flow, tau_grid, K=0.0):
    """Check D(V) >= -2K(H + |V|^2), Harnack(V) >= -H/tau, H >= 0 on a grid.

    The Harnack slack is evaluated in the cancelled form
    Harnack(V) + H/tau = -d_tau H + 2 lam |V|^2, which is exact and
    finite for every tau in the grid.  Passing is monotone in K because
    only the D condition carries the relaxation.
    """
    if K < 0.0:
        raise ValueError("K must be non-negative")
    tau_grid = np.atleast_1d(np.asarray(tau_grid, dtype=float))
    if tau_grid.size == 0:
        raise EmptyGrid("assumption gate needs a non-empty tau grid")
    if np.any(tau_grid == 0.0):
        raise TauZero("gate grid must stay in (0, tau_max]")
    flow.check_tau(tau_grid, allow_zero=False)

    worst = math.inf
    worst_loc = (float(tau_grid[0]), 0.0)
    mins = {"D": math.inf, "Harnack": math.inf, "H": math.inf}
    for tau in tau_grid:
        co = flow_coefficients(flow, float(tau))
        a_d = -co.dH_dtau - 2.0 * co.h_norm_sq
        b_d = 2.0 * (co.ric_coeff - co.lam)
        slacks = [
            ("D", 0.0, a_d + 2.0 * K * co.H),
            ("D", 1.0, a_d + 2.0 * K * co.H + b_d + 2.0 * K),
            ("Harnack", 0.0, -co.dH_dtau),
            ("Harnack", 1.0, -co.dH_dtau + 2.0 * co.lam),
            ("H", 0.0, co.H),
        ]
        for name, v_norm, slack in slacks:
            if slack < mins[name]:
                mins[name] = slack
            if slack < worst:
                worst = slack
                worst_loc = (float(tau), v_norm)

    return AssumptionReport(
        passes_D=mins["D"] >= -GATE_TOL,
        passes_Harnack=mins["Harnack"] >= -GATE_TOL,
        passes_H=mins["H"] >= -GATE_TOL,
        K=float(K),
        worst_margin=float(worst),
        worst_location=worst_loc,
    )
