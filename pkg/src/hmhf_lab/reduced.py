"""Reduced length, reduced distance, and the two reduced-geometry bounds.

For a radial space-time curve gamma(sigma) = (r(sigma)) over sigma in
[0, tau] the reduced length functional on a model flow is

    L_len(gamma) = int_0^tau sqrt(sigma) (H(sigma) + c(sigma) r'(sigma)^2) dsigma.

The substitution s = sqrt(sigma) regularizes the sqrt weight:

    L_len = int_0^sqrt(tau) [ 2 s^2 H(s^2) + (1/2) c(s^2) rdot(s)^2 ] ds,

a classical action with Lagrangian quadratic in rdot.  Two backends
compute L(radius, tau) = inf over curves from (0, 0) to (radius, tau):

* closed_form: minimizers are radial with speed proportional to
  1/(sqrt(sigma) c(sigma)), giving

      L = int_0^tau sqrt(sigma) H dsigma + radius^2 / I(tau),
      I(tau) = int_0^tau dsigma / (sqrt(sigma) c(sigma)),

  both integrals smooth after the s-substitution.

* variational: projected nonlinear conjugate gradient over piecewise
  linear curves on a uniform s-grid, minimizing the same functional via
  a composite Gauss rule per segment.  This route shares no formulas
  with the closed form beyond the functional itself, so agreement of
  the two is a real cross-check.

Derived fields:  ell = L / (2 sqrt(tau)),  Lbar = 4 tau ell,
frak_d = sqrt(Lbar).  The estimate checker evaluates, by central
differences on a uniform window grid,

    (Lap + d_tau) Lbar <= 2m + 2K Lbar      (heat bound)
    |grad frak_d|^2 <= 3                    (gradient bound)

with the radial Laplacian (1/c)(d_rr + (m-1) sn'/sn d_r) and one or two
Richardson refinements to size the discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ._io import write_csv
from .errors import (
    AssumptionFailed,
    CurveOutOfHorizon,
    DegenerateCurve,
    NoConvergence,
    SingularRadius,
    TauZero,
)
from .flows import assumption_gate, flow_coefficients
from .geometry import sn_ratio

# 3-point Gauss-Legendre nodes/weights on [0, 1]
_GAUSS_X = (np.array([-np.sqrt(0.6), 0.0, np.sqrt(0.6)]) + 1.0) / 2.0
_GAUSS_W = np.array([5.0, 8.0, 5.0]) / 18.0


def _scale_on_s(flow, s):
    """c and H evaluated at sigma = s^2 (vectorized)."""
    sigma = np.asarray(s, dtype=float) ** 2
    c = np.asarray(flow.scale.value(sigma), dtype=float)
    cp = np.asarray(flow.scale.derivative(sigma), dtype=float)
    H = flow.dimension * cp / (2.0 * c)
    return c, H


@dataclass(frozen=True)
class SpaceTimeCurve:
    """Radial curve sampled as (tau_i, r_i) with strictly increasing tau."""

    tau: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if tau.ndim != 1 or tau.shape != r.shape or tau.size < 2:
            raise ValueError("curve needs matching 1-d tau and r with >= 2 samples")
        if np.any(np.diff(tau) <= 0.0):
            raise DegenerateCurve("curve times must be strictly increasing")
        if np.any(r < 0.0):
            raise ValueError("curve radii must be non-negative")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "r", r)


def l_length(flow, curve):
    """Reduced length of a sampled curve by a composite Gauss rule in s.

    The curve is interpreted as piecewise linear in s = sqrt(tau); on
    each segment rdot is constant and the smooth factors c, H are
    integrated with a 3-point Gauss rule.
    """
    if np.min(curve.tau) < 0.0 or np.max(curve.tau) > flow.tau_max:
        raise CurveOutOfHorizon(
            f"curve times leave [0, {flow.tau_max}]"
        )
    if flow.base_curvature == 1 and np.max(curve.r) > np.pi:
        raise ValueError("curve radius exceeds pi on the sphere")
    s = np.sqrt(curve.tau)
    ds = np.diff(s)
    if np.any(ds <= 0.0):
        raise DegenerateCurve("curve degenerates after s = sqrt(tau) substitution")
    rdot = np.diff(curve.r) / ds
    # Gauss nodes for all segments at once: shape (n_seg, 3)
    sg = s[:-1, None] + ds[:, None] * _GAUSS_X[None, :]
    c, H = _scale_on_s(flow, sg)
    integrand = 2.0 * sg**2 * H + 0.5 * c * rdot[:, None] ** 2
    return float(np.sum(ds * (integrand @ _GAUSS_W)))


# ------------------------------------------------------------ closed form

@lru_cache(maxsize=16384)
def _h_integral(flow, tau):
    """int_0^tau sqrt(sigma) H dsigma = int_0^sqrt(tau) 2 s^2 H(s^2) ds."""
    if tau == 0.0:
        return 0.0

    def f(s):
        c = float(flow.scale.value(s * s))
        cp = float(flow.scale.derivative(s * s))
        return 2.0 * s * s * flow.dimension * cp / (2.0 * c)

    val, _ = quad(f, 0.0, math.sqrt(tau), limit=200, epsabs=1e-13, epsrel=1e-12)
    return val


@lru_cache(maxsize=16384)
def _speed_integral(flow, tau):
    """I(tau) = int_0^tau dsigma/(sqrt(sigma) c) = int_0^sqrt(tau) 2/c(s^2) ds."""

    def f(s):
        return 2.0 / float(flow.scale.value(s * s))

    val, _ = quad(f, 0.0, math.sqrt(tau), limit=200, epsabs=1e-13, epsrel=1e-12)
    return val


@dataclass(frozen=True)
class ReducedValues:
    """Reduced quantities at one (radius, tau)."""

    radius: float
    tau: float
    L: float
    ell: float
    Lbar: float
    frak_d: float
    backend: str
    iterations: int = 0
    el_residual: float = 0.0
    curve: SpaceTimeCurve | None = field(default=None, repr=False)

    def to_dict(self):
        return {
            "radius": self.radius,
            "tau": self.tau,
            "L": self.L,
            "ell": self.ell,
            "Lbar": self.Lbar,
            "frak_d": self.frak_d,
            "backend": self.backend,
        }


def _derived(radius, tau, L, backend, **extra):
    ell = L / (2.0 * math.sqrt(tau))
    lbar = 4.0 * tau * ell
    frak_d = math.sqrt(lbar) if lbar >= 0.0 else float("nan")
    return ReducedValues(
        radius=float(radius), tau=float(tau), L=float(L), ell=float(ell),
        Lbar=float(lbar), frak_d=float(frak_d), backend=backend, **extra,
    )


def _check_endpoint(flow, radius, tau):
    if radius < 0.0:
        raise ValueError("radius must be non-negative")
    if flow.base_curvature == 1 and radius > np.pi:
        raise ValueError("radius exceeds pi on the sphere")
    if tau == 0.0:
        raise TauZero("reduced distance needs tau > 0")
    flow.check_tau(tau, allow_zero=False)


def _closed_form(flow, radius, tau):
    L = _h_integral(flow, float(tau)) + radius * radius / _speed_integral(flow, float(tau))
    return _derived(radius, tau, L, "closed_form")


# ------------------------------------------------------------ variational

def _segment_weights(flow, s):
    """K_j with energy part  sum_j K_j (r_{j+1} - r_j)^2  and the
    curve-independent H part, both by the same per-segment Gauss rule."""
    ds = np.diff(s)
    sg = s[:-1, None] + ds[:, None] * _GAUSS_X[None, :]
    c, H = _scale_on_s(flow, sg)
    K = 0.5 * (ds * ((c @ _GAUSS_W))) / ds**2
    h_part = float(np.sum(ds * ((2.0 * sg**2 * H) @ _GAUSS_W)))
    return K, h_part


def _variational(flow, radius, tau, n_nodes=64, max_iter=5000):
    """Projected nonlinear CG over interior nodes of a uniform s-grid.

    The objective is quadratic for this family, so CG with an exact
    first trial step converges in at most n_nodes iterations; the
    backtracking guard and projection onto the admissible radius range
    keep the routine honest for constrained or perturbed variants.
    """
    s = np.linspace(0.0, math.sqrt(tau), n_nodes)
    K, h_part = _segment_weights(flow, s)
    r = np.linspace(0.0, radius, n_nodes)
    r_cap = np.pi if flow.base_curvature == 1 else np.inf

    def energy(rr):
        d = np.diff(rr)
        return float(np.sum(K * d * d))

    def gradient(rr):
        d = np.diff(rr)
        g = np.zeros_like(rr)
        g[1:-1] = 2.0 * (K[:-1] * d[:-1] - K[1:] * d[1:])
        return g[1:-1]

    def total(rr):
        return energy(rr) + h_part

    g = gradient(r)
    d = -g
    iterations = 0
    since_restart = 0
    restart_every = max(2, n_nodes - 2)  # classic CG restart period
    eps = np.finfo(float).eps
    for iterations in range(1, max_iter + 1):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm < 1e-10 * (1.0 + abs(total(r))):
            break
        # exact minimizer along d of the quadratic as first trial step
        full = np.zeros_like(r)
        full[1:-1] = d
        dd = np.diff(full)
        curv = 2.0 * float(np.sum(K * dd * dd))
        alpha = -float(g @ d) / curv if curv > 0.0 else 1.0
        e0 = energy(r)
        slope = float(g @ d)
        projected = False
        # Near convergence the predicted decrease -alpha*slope/2 drops
        # below the rounding resolution of the energy; the Armijo test is
        # then pure noise and halving alpha only destroys conjugacy, so
        # the exact step is accepted as-is in that regime.
        resolvable = -0.5 * alpha * slope > 64.0 * eps * max(1.0, abs(e0))
        trial = r.copy()
        trial[1:-1] = np.clip(r[1:-1] + alpha * d, 0.0, r_cap)
        if resolvable:
            for _ in range(60):  # backtracking with Armijo fraction 1e-4
                if energy(trial) <= e0 + 1e-4 * alpha * slope:
                    break
                alpha *= 0.5
                trial = r.copy()
                trial[1:-1] = np.clip(r[1:-1] + alpha * d, 0.0, r_cap)
        projected = bool(np.any(trial[1:-1] != r[1:-1] + alpha * d))
        stagnant = np.array_equal(trial, r)
        r = trial
        g_new = gradient(r)
        since_restart += 1
        # Restart the direction after a projection, on stagnation (step
        # below float resolution), and after n interior steps; plain
        # Polak-Ribiere otherwise.
        if projected or stagnant or since_restart >= restart_every:
            d = -g_new
            since_restart = 0
        else:
            beta = max(0.0, float(g_new @ (g_new - g)) / float(g @ g))
            d = -g_new + beta * d
        g = g_new
    else:
        raise NoConvergence(
            "variational backend exhausted its iteration budget",
            best_value=total(r),
            residual=float(np.max(np.abs(g))),
        )

    curve = SpaceTimeCurve(tau=s**2, r=r)
    return _derived(
        radius, tau, total(r), "variational",
        iterations=iterations,
        el_residual=float(np.max(np.abs(gradient(r)))) if r.size > 2 else 0.0,
        curve=curve,
    )


def reduced_distance(flow, radius, tau, backend="closed_form", n_nodes=64,
                     max_iter=5000):
    """L, ell, Lbar, frak_d at one (radius, tau) by the chosen backend."""
    _check_endpoint(flow, radius, tau)
    if backend == "closed_form":
        return _closed_form(flow, radius, tau)
    if backend == "variational":
        return _variational(flow, radius, tau, n_nodes=n_nodes, max_iter=max_iter)
    raise ValueError(f"unknown backend {backend!r}")


# ------------------------------------------------------------------ grids

@dataclass(frozen=True)
class ReducedField:
    """Reduced quantities tabulated on a (radius, tau) grid."""

    radii: np.ndarray
    taus: np.ndarray
    L: np.ndarray
    ell: np.ndarray
    Lbar: np.ndarray
    frak_d: np.ndarray
    backend: str

    def to_csv(self, path):
        rows = []
        for i, r in enumerate(self.radii):
            for j, t in enumerate(self.taus):
                rows.append((
                    float(r), float(t), self.L[i, j], self.ell[i, j],
                    self.Lbar[i, j], self.frak_d[i, j], self.backend,
                ))
        return write_csv(path, ["r", "tau", "L", "ell", "Lbar", "frak_d", "backend"], rows)


def build_reduced_field(flow, radii, taus, backend="closed_form", n_nodes=64):
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    if np.any(radii < 0.0):
        raise ValueError("radii must be non-negative")
    if flow.base_curvature == 1 and np.max(radii) > np.pi:
        raise ValueError("radius exceeds pi on the sphere")
    L = np.empty((radii.size, taus.size))
    if backend == "closed_form":
        for j, tau in enumerate(taus):
            _check_endpoint(flow, 0.0, float(tau))
            h_part = _h_integral(flow, float(tau))
            inv_i = 1.0 / _speed_integral(flow, float(tau))
            L[:, j] = h_part + radii**2 * inv_i
    else:
        for i, r in enumerate(radii):
            for j, tau in enumerate(taus):
                L[i, j] = reduced_distance(
                    flow, float(r), float(tau), backend=backend, n_nodes=n_nodes
                ).L
    ell = L / (2.0 * np.sqrt(taus)[None, :])
    lbar = 4.0 * taus[None, :] * ell
    frak_d = np.sqrt(np.where(lbar >= 0.0, lbar, np.nan))
    return ReducedField(radii=radii, taus=taus, L=L, ell=ell, Lbar=lbar,
                        frak_d=frak_d, backend=backend)


def frak_d_grid(flow, radii, taus):
    """Closed-form frak_d on a grid (the space-time distance surrogate)."""
    return build_reduced_field(flow, radii, taus).frak_d


# --------------------------------------------------- estimate verification

@dataclass(frozen=True)
class ReducedEstimateReport:
    """Finite-difference audit of the heat and gradient bounds on a window."""

    K: float
    heat_min_slack: float
    heat_max_violation: float
    grad_min_slack: float
    grad_max_violation: float
    heat_equality_gap: float           # max |(Lap + d_tau) Lbar - 2m - 2K Lbar|
    grad_value_range: tuple            # (min, max) of |grad frak_d|^2
    richardson_diffs: tuple            # sup-norm level differences of the heat lhs
    richardson_order: float            # log2 ratio of consecutive diffs (nan if < 3 levels)
    suspect_nodes: int                 # nodes whose level differences fail to shrink
    levels: int

    def to_dict(self):
        d = {k: getattr(self, k) for k in (
            "K", "heat_min_slack", "heat_max_violation", "grad_min_slack",
            "grad_max_violation", "heat_equality_gap", "richardson_order",
            "suspect_nodes", "levels")}
        d["grad_value_range"] = list(self.grad_value_range)
        d["richardson_diffs"] = list(self.richardson_diffs)
        return d


def _uniform_spacing(grid, name):
    d = np.diff(grid)
    if grid.size < 3 or np.any(d <= 0):
        raise ValueError(f"{name} grid must be increasing with >= 3 nodes")
    if np.max(np.abs(d - d[0])) > 1e-9 * d[0]:
        raise ValueError(f"{name} grid must be uniform")
    return float(d[0])


def _lbar_grid(flow, radii, taus):
    return build_reduced_field(flow, radii, taus).Lbar


def _heat_and_grad(flow, radii, taus):
    """(Lap + d_tau) Lbar and |grad frak_d|^2 on the interior of a uniform
    grid, with exterior values supplied by direct evaluation (parity
    reflection across r = 0 where the extension would cross the origin)."""
    dr = _uniform_spacing(radii, "radius")
    dt = _uniform_spacing(taus, "tau")
    k0 = flow.base_curvature
    if radii[0] < 1e-9 or (k0 == 1 and radii[-1] > np.pi - 1e-9):
        raise SingularRadius("window touches a degenerate radius")
    taus_ext = np.concatenate(([taus[0] - dt], taus, [taus[-1] + dt]))
    if taus_ext[0] <= 0.0 or taus_ext[-1] > flow.tau_max:
        raise ValueError("tau window needs one spacing of headroom inside (0, tau_max]")
    r_lo = radii[0] - dr
    r_ext = np.concatenate(([abs(r_lo)], radii, [radii[-1] + dr]))
    if k0 == 1 and r_ext[-1] > np.pi:
        raise SingularRadius("radius window needs headroom below pi on the sphere")

    # Using |r_lo| as the low exterior node makes the central stencils the
    # parity-extended ones automatically (Lbar is even in r).
    lbar = _lbar_grid(flow, r_ext, taus_ext)
    inner = lbar[1:-1, 1:-1]
    d2r = (lbar[2:, 1:-1] - 2.0 * inner + lbar[:-2, 1:-1]) / dr**2
    d1r = (lbar[2:, 1:-1] - lbar[:-2, 1:-1]) / (2.0 * dr)
    dtau = (lbar[1:-1, 2:] - lbar[1:-1, :-2]) / (2.0 * dt)

    c = np.asarray(flow.scale.value(taus), dtype=float)[None, :]
    ratio = sn_ratio(k0, radii)[:, None]
    heat = (d2r + (flow.dimension - 1) * ratio * d1r) / c + dtau

    frak = np.sqrt(lbar[:, 1:-1])
    d1_frak = (frak[2:, :] - frak[:-2, :]) / (2.0 * dr)
    grad_sq = d1_frak**2 / c
    return heat, grad_sq, inner


def reduced_estimate_check(flow, radii, taus, K=0.0, levels=2, tau_grid=None):
    """Audit (Lap + d_tau) Lbar <= 2m + 2K Lbar and |grad frak_d|^2 <= 3.

    The flow must pass the hypothesis gate at the supplied K (the heat
    bound consumes the D and H conditions, the gradient bound the
    Harnack and H conditions).  `levels` >= 2 halves the spacings over
    the same span and reports sup-norm level differences of the heat
    left-hand side on the common nodes; with 3 levels the measured
    convergence order and a count of nodes whose differences fail to
    shrink (non-smooth suspects) are included.
    """
    radii = np.asarray(radii, dtype=float)
    taus = np.asarray(taus, dtype=float)
    gate = assumption_gate(flow, taus if tau_grid is None else tau_grid, K=K)
    if not gate.passes:
        raise AssumptionFailed(
            f"hypothesis gate fails at K={K}: worst margin {gate.worst_margin:.3g} "
            f"at (tau, |V|) = {gate.worst_location}"
        )

    m = flow.dimension
    heat_levels = []
    grad_levels = []
    lbar_base = None
    for lev in range(max(1, levels)):
        step = 2**lev
        r_lev = np.linspace(radii[0], radii[-1], (radii.size - 1) * step + 1)
        t_lev = np.linspace(taus[0], taus[-1], (taus.size - 1) * step + 1)
        heat, grad_sq, lbar = _heat_and_grad(flow, r_lev, t_lev)
        heat_levels.append(heat[::step, ::step])
        grad_levels.append(grad_sq[::step, ::step])
        if lev == 0:
            lbar_base = lbar

    heat = heat_levels[-1]
    grad_sq = grad_levels[-1]
    rhs = 2.0 * m + 2.0 * K * lbar_base
    heat_slack = rhs - heat
    grad_slack = 3.0 - grad_sq

    diffs = tuple(
        float(np.max(np.abs(a - b))) for a, b in zip(heat_levels, heat_levels[1:])
    )
    order = float("nan")
    suspects = 0
    if len(diffs) >= 2 and diffs[1] > 0.0:
        order = math.log2(diffs[0] / diffs[1])
        d01 = np.abs(heat_levels[0] - heat_levels[1])
        d12 = np.abs(heat_levels[1] - heat_levels[2])
        floor = 1e-12 * (1.0 + np.abs(heat_levels[0]))
        suspects = int(np.sum((d12 > 0.6 * d01 + floor) & (d01 > floor)))

    return ReducedEstimateReport(
        K=float(K),
        heat_min_slack=float(np.min(heat_slack)),
        heat_max_violation=float(max(0.0, -np.min(heat_slack))),
        grad_min_slack=float(np.min(grad_slack)),
        grad_max_violation=float(max(0.0, -np.min(grad_slack))),
        heat_equality_gap=float(np.max(np.abs(heat - rhs))),
        grad_value_range=(float(np.min(grad_sq)), float(np.max(grad_sq))),
        richardson_diffs=diffs,
        richardson_order=order,
        suspect_nodes=suspects,
        levels=max(1, levels),
    )
