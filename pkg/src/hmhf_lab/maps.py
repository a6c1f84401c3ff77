"""Equivariant maps into space-form targets and their heat flow.

A map here is rotationally symmetric: it is determined by a scalar
profile rho(r, t) giving the target distance from the base point as a
function of domain radius and forward time t (the evolution equation is
backward in tau, which is the ordinary heat flow in t = -tau).  All
differential-geometric quantities of such a map reduce to closed forms
in rho and its first two radial derivatives, which is what makes the
identity checks in this module converge at the discretization order
instead of being sampled statistically.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from . import geometry
from ._io import write_csv
from .errors import (
    BoundaryStencil,
    CFLViolation,
    NotASolution,
    OutsideRegularBall,
    RegularBallExit,
)
from .flows import ModelFlow, StaticScale, flow_coefficients


@dataclass(frozen=True)
class TargetSpaceForm:
    """Simply connected target of constant curvature kappa.

    For kappa > 0 every map value must stay inside the open ball of
    radius pi / (2 sqrt(kappa)) around the base point; on the round
    sphere that ball misses the cut locus of the antipode.
    """

    n: int
    kappa: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("target dimension must be an integer >= 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def regular_radius(self):
        if self.kappa > 0.0:
            return math.pi / (2.0 * math.sqrt(self.kappa))
        return math.inf

    def sn(self, rho):
        return geometry.sn(self.kappa, rho)

    def sn_prime(self, rho):
        return geometry.sn_prime(self.kappa, rho)


def target_helpers(target, rho):
    """Scalar comparison functions of the target distance rho.

    Returns a dict with sn, sn_prime, rho_sq always present, and
    phi = 1 - cos(sqrt(kappa) rho), v = 1 / cos(sqrt(kappa) rho) when
    the target is positively curved (None otherwise: those two only
    make sense inside the regular ball of a positively curved target).
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0.0):
        raise ValueError("rho is a distance and must be non-negative")
    if target.kappa > 0.0 and np.any(rho >= target.regular_radius):
        raise OutsideRegularBall(
            "rho = %g reaches the regular ball radius %g"
            % (np.max(rho), target.regular_radius)
        )
    out = {
        "sn": target.sn(rho),
        "sn_prime": target.sn_prime(rho),
        "rho_sq": rho * rho if rho.ndim else float(rho) ** 2,
    }
    if target.kappa > 0.0:
        root = math.sqrt(target.kappa)
        cosr = np.cos(root * rho)
        phi = 1.0 - cosr
        v = 1.0 / cosr
        out["phi"] = float(phi) if phi.ndim == 0 else phi
        out["v"] = float(v) if v.ndim == 0 else v
    else:
        out["phi"] = None
        out["v"] = None
    if np.asarray(out["sn"]).ndim == 0:
        out["sn"] = float(out["sn"])
        out["sn_prime"] = float(out["sn_prime"])
        out["rho_sq"] = float(out["rho_sq"])
    return out


@dataclass(frozen=True)
class EquivariantMap:
    """A rotationally symmetric map stored as a profile on a grid.

    ``rho`` has shape (nt, nr) over forward times ``t`` and radii ``r``;
    a single-frame map is simply nt = 1.  ``boundary`` holds the
    Dirichlet value at r_max per frame (frozen by the solver).  The
    solver metadata fields (dr, dt, scheme, frame_stride) are populated
    by hmhf_evolve and are needed by the refinement-based checks, which
    re-solve from the first frame at halved spacings.
    """

    r: np.ndarray
    t: np.ndarray
    rho: np.ndarray
    domain: ModelFlow
    target: TargetSpaceForm
    boundary: np.ndarray
    dr: float = 0.0
    dt: Optional[float] = None
    scheme: Optional[str] = None
    frame_stride: Optional[int] = None
    initial_fn: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        t = np.atleast_1d(np.asarray(self.t, dtype=float))
        rho = np.asarray(self.rho, dtype=float)
        if rho.ndim == 1:
            rho = rho[None, :]
        boundary = np.atleast_1d(np.asarray(self.boundary, dtype=float))
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "boundary", boundary)
        if r.ndim != 1 or r.size < 4:
            raise ValueError("radius grid needs at least 4 nodes")
        dr = r[1] - r[0]
        if r[0] != 0.0 or dr <= 0.0 or not np.allclose(np.diff(r), dr, rtol=1e-9):
            raise ValueError("radius grid must be uniform starting at 0")
        object.__setattr__(self, "dr", float(dr))
        if t.ndim != 1 or np.any(np.diff(t) <= 0.0) and t.size > 1:
            raise ValueError("time grid must be strictly increasing")
        if rho.shape != (t.size, r.size):
            raise ValueError("profile shape must be (len(t), len(r))")
        if np.any(rho[:, 0] != 0.0):
            raise ValueError("equivariance requires rho(0, t) = 0 exactly")
        if boundary.shape != (t.size,) or not np.array_equal(boundary, rho[:, -1]):
            raise ValueError("boundary column must equal rho at r_max")
        if self.domain.base_curvature == 1 and r[-1] >= math.pi:
            raise ValueError("sphere domain grids must stay below r = pi")
        if self.target.kappa > 0.0:
            top = float(np.max(rho))
            if top >= self.target.regular_radius:
                raise OutsideRegularBall(
                    "profile reaches %g >= regular radius %g"
                    % (top, self.target.regular_radius)
                )

    @property
    def nr(self):
        return self.r.size

    @property
    def nt(self):
        return self.t.size

    def frame(self, j):
        return self.rho[j]

    def energy_density(self, j=0):
        """||du||^2 along frame j, including the r = 0 limit value."""
        return _energy_density_row(
            self.domain, self.target, self.r, self.rho[j], float(self.t[j])
        )


def _tau_of_t(flow, t):
    """Forward time to reverse time; static flows accept any t."""
    if isinstance(flow.scale, StaticScale):
        return 0.0
    tau = -float(t)
    flow.check_tau(tau, allow_zero=True)
    return tau


def _c_at(flow, t):
    return float(flow.scale.value(_tau_of_t(flow, t)))


def _d1(row, dr):
    """First radial derivative: parity at 0, central inside, one-sided end."""
    out = np.empty_like(row)
    out[0] = row[1] / dr  # rho odd: ghost node -rho[1]
    out[1:-1] = (row[2:] - row[:-2]) / (2.0 * dr)
    out[-1] = (3.0 * row[-1] - 4.0 * row[-2] + row[-3]) / (2.0 * dr)
    return out


def _d2(row, dr):
    out = np.empty_like(row)
    out[0] = 0.0  # odd profile has no even second derivative at 0
    out[1:-1] = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / (dr * dr)
    out[-1] = (2.0 * row[-1] - 5.0 * row[-2] + 4.0 * row[-3] - row[-4]) / (dr * dr)
    return out


def _energy_density_row(flow, target, r, row, t):
    c = _c_at(flow, t)
    dr = r[1] - r[0]
    lam1 = _d1(row, dr) / math.sqrt(c)
    lam2 = np.empty_like(row)
    lam2[1:] = target.sn(row[1:]) / (
        math.sqrt(c) * geometry.sn(flow.base_curvature, r[1:])
    )
    lam2[0] = lam1[0]  # sn_kappa(rho)/sn_k0(r) -> rho_r at the origin
    return lam1 * lam1 + (flow.dimension - 1) * lam2 * lam2


def _tension_row(flow, target, r, row, t):
    """Radial tension field Delta u on a frame (interior nodes only).

    Entry 0 and the last entry are filled with the adjacent interior
    values only to keep the array shape; callers never read them.
    """
    m = flow.dimension
    c = _c_at(flow, t)
    dr = r[1] - r[0]
    k0 = flow.base_curvature
    out = np.zeros_like(row)
    i = slice(1, -1)
    d2 = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / (dr * dr)
    d1 = (row[2:] - row[:-2]) / (2.0 * dr)
    ratio = geometry.sn_ratio(k0, r[i])
    sn0 = geometry.sn(k0, r[i])
    out[i] = (d2 + (m - 1) * ratio * d1) / c - (m - 1) * target.sn(
        row[i]
    ) * target.sn_prime(row[i]) / (c * sn0 * sn0)
    return out


def tension_energy(map_, r, t):
    """Pointwise energy density, tension, time derivative and residual.

    flow_residual = Delta u - d_t u vanishes (to discretization order)
    exactly when the stored trajectory solves the flow equation, whose
    backward-reverse-time form is the forward heat flow in t.
    """
    i = _locate(map_.r, r, "radius")
    j = _locate(map_.t, t, "time")
    if i < 1 or i > map_.nr - 2:
        raise BoundaryStencil("radius %g has no interior stencil" % r)
    if map_.nt == 1:
        time_deriv = 0.0  # single-frame maps are static by convention
    elif j < 1 or j > map_.nt - 2:
        raise BoundaryStencil("time %g has no interior stencil" % t)
    else:
        dt_span = map_.t[j + 1] - map_.t[j - 1]
        time_deriv = (map_.rho[j + 1, i] - map_.rho[j - 1, i]) / dt_span
    row = map_.rho[j]
    density = _energy_density_row(map_.domain, map_.target, map_.r, row, t)[i]
    tension = _tension_row(map_.domain, map_.target, map_.r, row, t)[i]
    return {
        "energy_density": float(density),
        "tension_radial": float(tension),
        "time_deriv": float(time_deriv),
        "flow_residual": float(tension - time_deriv),
    }


def _locate(grid, value, what):
    i = int(round((value - grid[0]) / (grid[1] - grid[0]))) if grid.size > 1 else 0
    i = min(max(i, 0), grid.size - 1)
    if abs(grid[i] - value) > 1e-9 * (1.0 + abs(value)):
        raise ValueError("%s %g is not a grid node" % (what, value))
    return i


# ---------------------------------------------------------------------------
# evolution


def _grid(r_max, dr):
    n = int(round(r_max / dr))
    if abs(n * dr - r_max) > 1e-9 * r_max or n < 3:
        raise ValueError("dr must divide r_max into at least 3 cells")
    # i * dr keeps power-of-two spacings exact, which in turn keeps the
    # dilation-map cancellation in the tension field exact
    return np.arange(n + 1) * (r_max / n)


def _resample(map_, r_new):
    """Initial profile of a map on a refined grid (exact if a closed
    form was recorded, odd-extended cubic spline otherwise)."""
    if map_.initial_fn is not None:
        row = np.asarray(map_.initial_fn(r_new), dtype=float)
        row[0] = 0.0
        return row
    src_r = np.concatenate([-map_.r[:0:-1], map_.r])
    src_v = np.concatenate([-map_.rho[0, :0:-1], map_.rho[0]])
    row = CubicSpline(src_r, src_v)(r_new)
    row[0] = 0.0
    return row


def _step_matrix(flow, target, r, t_next, dt):
    """Banded matrix of I - dt*L for the linear radial operator at t_next."""
    m = flow.dimension
    c = _c_at(flow, t_next)
    dr = r[1] - r[0]
    k0 = flow.base_curvature
    ri = r[1:-1]
    ratio = geometry.sn_ratio(k0, ri)
    lower = (1.0 / (dr * dr) - (m - 1) * ratio / (2.0 * dr)) / c
    diag = -2.0 / (dr * dr) / c * np.ones_like(ri)
    upper = (1.0 / (dr * dr) + (m - 1) * ratio / (2.0 * dr)) / c
    n = ri.size
    ab = np.zeros((3, n))
    ab[0, 1:] = -dt * upper[:-1]
    ab[1, :] = 1.0 - dt * diag
    ab[2, :-1] = -dt * lower[1:]
    return ab, lower, upper, c


def _nonlinear(flow, target, r, row, c):
    m = flow.dimension
    k0 = flow.base_curvature
    ri = r[1:-1]
    sn0 = geometry.sn(k0, ri)
    return -(m - 1) * target.sn(row[1:-1]) * target.sn_prime(row[1:-1]) / (
        c * sn0 * sn0
    )


def _check_ball(target, row, t):
    if target.kappa > 0.0:
        top = float(np.max(row))
        if not np.isfinite(top) or top >= target.regular_radius:
            raise RegularBallExit(
                "profile reached the regular ball radius", t=float(t), max_rho=top
            )


def _evolve_frames(flow, target, r, row0, t0, n_steps, dt, scheme, keep):
    """Run the stepper and return {step_index: profile} for kept indices."""
    row = row0.copy()
    bdry = float(row0[-1])
    frames = {}
    if 0 in keep:
        frames[0] = row.copy()
    static = isinstance(flow.scale, StaticScale)
    cached = None
    for k in range(1, n_steps + 1):
        t_prev = t0 + (k - 1) * dt
        t_next = t0 + k * dt
        if scheme == "semi_implicit":
            if static:
                if cached is None:
                    cached = _step_matrix(flow, target, r, t_next, dt)
                ab, lower, upper, c_imp = cached
            else:
                ab, lower, upper, c_imp = _step_matrix(flow, target, r, t_next, dt)
            c_exp = c_imp if static else _c_at(flow, t_prev)
            rhs = row[1:-1] + dt * _nonlinear(flow, target, r, row, c_exp)
            rhs[-1] += dt * upper[-1] * bdry  # Dirichlet column at r_max
            row[1:-1] = solve_banded((1, 1), ab, rhs)
        else:
            tension = _tension_row(flow, target, r, row, t_prev)
            row = row + dt * tension
            row[0] = 0.0
            row[-1] = bdry
        _check_ball(target, row, t_next)
        if k in keep:
            frames[k] = row.copy()
    return frames


def hmhf_evolve(initial, flow, t1, dr, dt, scheme="semi_implicit", frame_stride=8):
    """Integrate the flow equation forward from the last frame of ``initial``.

    The semi-implicit scheme treats the linear radial operator
    implicitly (tridiagonal solve per step) and the target nonlinearity
    explicitly; it has no step restriction.  The explicit scheme is
    provided for cross-validation and enforces dt <= 0.25 c_min dr^2.
    Returns a trajectory that stores every frame_stride-th step plus the
    final one.
    """
    if scheme not in ("semi_implicit", "explicit"):
        raise ValueError("scheme must be semi_implicit or explicit")
    t0 = float(initial.t[-1])
    if t1 <= t0:
        raise ValueError("t1 must exceed the initial time")
    n_steps = max(1, int(round((t1 - t0) / dt)))
    dt = (t1 - t0) / n_steps
    r = _grid(float(initial.r[-1]), dr)
    if r.size == initial.r.size and np.allclose(r, initial.r, rtol=1e-12):
        row0 = initial.rho[-1].copy()
    else:
        row0 = _resample(initial, r)
    if scheme == "explicit":
        taus = [_tau_of_t(flow, t0 + k * dt) for k in range(n_steps + 1)]
        c_min = float(np.min(flow.scale.value(np.asarray(taus))))
        if dt > 0.25 * c_min * dr * dr * (1.0 + 1e-12):
            raise CFLViolation(
                "explicit scheme needs dt <= 0.25 c_min dr^2 = %g, got %g"
                % (0.25 * c_min * dr * dr, dt)
            )
    keep = set(range(0, n_steps + 1, max(1, int(frame_stride))))
    keep.add(n_steps)
    frames = _evolve_frames(flow, initial.target, r, row0, t0, n_steps, dt, scheme, keep)
    order = sorted(frames)
    rho = np.array([frames[k] for k in order])
    times = np.array([t0 + k * dt for k in order])
    return EquivariantMap(
        r=r,
        t=times,
        rho=rho,
        domain=flow,
        target=initial.target,
        boundary=rho[:, -1].copy(),
        dt=dt,
        scheme=scheme,
        frame_stride=int(frame_stride),
        initial_fn=initial.initial_fn if np.array_equal(times[:1], initial.t[-1:]) else None,
    )


def map_energy(map_, j=None):
    """Total energy int ||du||^2 dmu at frame j (all frames if j is None).

    The measure of g = c g0 is c^{m/2} sn_k0(r)^{m-1} times the round
    sphere area; the trapezoid rule matches the second-order stencils
    used everywhere else.
    """
    if j is None:
        return np.array([map_energy(map_, jj) for jj in range(map_.nt)])
    flow = map_.domain
    m = flow.dimension
    c = _c_at(flow, float(map_.t[j]))
    density = map_.energy_density(j)
    weight = geometry.sn(flow.base_curvature, map_.r) ** (m - 1)
    area = geometry.sphere_area(m)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    return float(area * c ** (m / 2.0) * trapezoid(density * weight, map_.r))


# ---------------------------------------------------------------------------
# identity checks


def _grad_du_sq_row(flow, target, r, row, t):
    """||grad du||^2 along a frame, equivariant closed form (interior)."""
    m = flow.dimension
    c = _c_at(flow, t)
    dr = r[1] - r[0]
    k0 = flow.base_curvature
    d1 = _d1(row, dr)
    d2 = _d2(row, dr)
    out = np.zeros_like(row)
    i = slice(1, -1)
    sn0 = geometry.sn(k0, r[i])
    sn0p = geometry.sn_prime(k0, r[i])
    snr = target.sn(row[i])
    snrp = target.sn_prime(row[i])
    mixed = snrp * d1[i] / sn0 - snr * sn0p / (sn0 * sn0)
    orbital = d1[i] * sn0p / sn0 - snr * snrp / (sn0 * sn0)
    out[i] = (d2[i] ** 2 + 2.0 * (m - 1) * mixed ** 2 + (m - 1) * orbital ** 2) / (
        c * c
    )
    return out


def _lambdas_at(flow, target, r, row, t, i):
    c = _c_at(flow, t)
    dr = r[1] - r[0]
    lam1 = _d1(row, dr)[i] / math.sqrt(c)
    lam2 = target.sn(row[i]) / (
        math.sqrt(c) * geometry.sn(flow.base_curvature, r[i])
    )
    return lam1, lam2


def _scalar_heat(flow, r, rows, t_mid, s, dr, i):
    """(Delta + d_tau) f at node i from three rows f(t-s), f(t), f(t+s)."""
    m = flow.dimension
    c = _c_at(flow, t_mid)
    f_prev, f_mid, f_next = rows
    f_rr = (f_mid[i + 1] - 2.0 * f_mid[i] + f_mid[i - 1]) / (dr * dr)
    f_r = (f_mid[i + 1] - f_mid[i - 1]) / (2.0 * dr)
    lap = (f_rr + (m - 1) * geometry.sn_ratio(flow.base_curvature, r[i]) * f_r) / c
    dtau = -(f_next[i] - f_prev[i]) / (2.0 * s)  # tau = -t
    return lap + dtau


@dataclass(frozen=True)
class BochnerReport:
    r: float
    t: float
    residuals: tuple
    orders: tuple

    @property
    def order(self):
        return float(np.mean(self.orders)) if self.orders else float("nan")

    def to_dict(self):
        return {
            "r": self.r,
            "t": self.t,
            "residuals": list(self.residuals),
            "orders": list(self.orders),
            "order": self.order,
        }


def bochner_residual(map_, flow, r, t, refinement_levels=3, solution_tol=None):
    """Residual of the energy-density evolution identity, per level.

    Both sides of

        (Delta + d_tau)||du||^2 = 2||grad du||^2
            + 2 (ric_coeff - lambda) ||du||^2
            - 2 kappa (m-1) lam2^2 (2 lam1^2 + (m-2) lam2^2)

    are evaluated at (r, t); each refinement level re-solves the flow
    from the first stored frame at halved dr (and dt/4, so the stepper
    error keeps up) and uses difference stencils proportional to the
    level spacing.  On a numerical solution the residual shrinks at
    second order.
    """
    if map_.dt is None or map_.scheme is None or map_.frame_stride is None:
        raise ValueError("bochner_residual needs a trajectory from hmhf_evolve")
    probe = tension_energy(map_, r, t)
    tol = solution_tol
    if tol is None:
        scale = 1.0 + float(np.max(np.abs(map_.rho)))
        tol = 10.0 * (map_.dr ** 2 + map_.dt) * scale
    if abs(probe["flow_residual"]) > tol:
        raise NotASolution(
            "flow residual %g exceeds %g; the identity presumes a solution"
            % (probe["flow_residual"], tol)
        )
    i0 = _locate(map_.r, r, "radius")
    j0 = _locate(map_.t, t, "time")
    if i0 < 2 or i0 > map_.nr - 3:
        raise BoundaryStencil("radius %g has no nested interior stencil" % r)
    m = flow.dimension
    target = map_.target
    t0 = float(map_.t[0])
    s0 = float(map_.t[1] - map_.t[0])
    stride0 = int(round(s0 / map_.dt))
    residuals = []
    for lev in range(refinement_levels):
        dr_l = map_.dr / 2 ** lev
        dt_l = map_.dt / 4 ** lev
        s_l = s0 / 2 ** lev
        stride_l = stride0 * 2 ** lev
        r_l = _grid(float(map_.r[-1]), dr_l)
        row0 = _resample(map_, r_l)
        k_mid = int(round((t - t0) / dt_l))
        keep = {k_mid - stride_l, k_mid, k_mid + stride_l}
        frames = _evolve_frames(
            flow, target, r_l, row0, t0, k_mid + stride_l, dt_l, map_.scheme, keep
        )
        rows = [frames[k] for k in sorted(keep)]
        i = i0 * 2 ** lev
        co = flow_coefficients(flow, _tau_of_t(flow, t))
        dens = [
            _energy_density_row(flow, target, r_l, rw, tt)
            for rw, tt in zip(rows, (t - s_l, t, t + s_l))
        ]
        lhs = _scalar_heat(flow, r_l, dens, t, s_l, dr_l, i)
        lam1, lam2 = _lambdas_at(flow, target, r_l, rows[1], t, i)
        grad_du = _grad_du_sq_row(flow, target, r_l, rows[1], t)[i]
        du_sq = dens[1][i]
        rhs = (
            2.0 * grad_du
            + 2.0 * (co.ric_coeff - co.lam) * du_sq
            - 2.0
            * target.kappa
            * (m - 1)
            * lam2 ** 2
            * (2.0 * lam1 ** 2 + (m - 2) * lam2 ** 2)
        )
        residuals.append(abs(lhs - rhs))
    orders = tuple(
        math.log2(residuals[k] / residuals[k + 1])
        if residuals[k + 1] > 0.0 and residuals[k] > 0.0
        else float("nan")
        for k in range(len(residuals) - 1)
    )
    return BochnerReport(r=float(r), t=float(t), residuals=tuple(residuals), orders=orders)


def hessian_comparison_slack(map_, r, t):
    """Slack of the distance-composition heat inequality at (r, t).

    Flat and negatively curved targets use f = rho^2 with lower bound
    2||du||^2; positively curved targets use f = 1 - cos(sqrt(kappa) rho)
    with lower bound kappa cos(sqrt(kappa) rho) ||du||^2.  On solutions
    the slack is non-negative up to discretization error (and zero for
    space-form targets, where the comparison is an identity).
    """
    i = _locate(map_.r, r, "radius")
    j = _locate(map_.t, t, "time")
    if i < 1 or i > map_.nr - 2:
        raise BoundaryStencil("radius %g has no interior stencil" % r)
    flow = map_.domain
    target = map_.target
    if map_.nt == 1:
        s = 1.0  # static map: the time difference below is zero anyway
        rows3 = np.vstack([map_.rho[0], map_.rho[0], map_.rho[0]])
    elif j < 1 or j > map_.nt - 2:
        raise BoundaryStencil("time %g has no interior stencil" % t)
    else:
        s = float(map_.t[j + 1] - map_.t[j])
        s_back = float(map_.t[j] - map_.t[j - 1])
        if abs(s - s_back) > 1e-9 * s:
            raise BoundaryStencil("time stencil at %g is not uniform" % t)
        rows3 = map_.rho[j - 1 : j + 2]
    du_sq = _energy_density_row(flow, target, map_.r, map_.rho[j], t)[i]
    if target.kappa > 0.0:
        root = math.sqrt(target.kappa)
        fs = [1.0 - np.cos(root * rw) for rw in rows3]
        rhs = target.kappa * math.cos(root * map_.rho[j, i]) * du_sq
    else:
        fs = [rw * rw for rw in rows3]
        rhs = 2.0 * du_sq
    lhs = _scalar_heat(flow, map_.r, fs, t, s, map_.dr, i)
    return {"lhs": float(lhs), "rhs": float(rhs), "slack": float(lhs - rhs)}


# ---------------------------------------------------------------------------
# builders and io


def constant_map(flow, target, r_max, dr, t0=0.0):
    """The base-point map rho == 0 (harmonic for every target)."""
    r = _grid(r_max, dr)
    rho = np.zeros((1, r.size))
    return EquivariantMap(
        r=r,
        t=np.array([float(t0)]),
        rho=rho,
        domain=flow,
        target=target,
        boundary=rho[:, -1].copy(),
        initial_fn=lambda rr: np.zeros_like(np.asarray(rr, dtype=float)),
    )


def dilation_map(flow, target, slope, r_max, dr, t0=0.0):
    """rho = slope * r between flat spaces (a static harmonic map)."""
    if flow.base_curvature != 0 or target.kappa != 0.0:
        raise ValueError("the dilation map is harmonic only flat-to-flat")
    r = _grid(r_max, dr)
    rho = (slope * r)[None, :]
    return EquivariantMap(
        r=r,
        t=np.array([float(t0)]),
        rho=rho,
        domain=flow,
        target=target,
        boundary=rho[:, -1].copy(),
        initial_fn=lambda rr: slope * np.asarray(rr, dtype=float),
    )


def profile_map(flow, target, profile_fn, r_max, dr, t0=0.0):
    """Single-frame map from a closed-form radial profile rho(r)."""
    r = _grid(r_max, dr)
    rho = np.asarray(profile_fn(r), dtype=float)[None, :].copy()
    rho[0, 0] = 0.0
    return EquivariantMap(
        r=r,
        t=np.array([float(t0)]),
        rho=rho,
        domain=flow,
        target=target,
        boundary=rho[:, -1].copy(),
        initial_fn=profile_fn,
    )


def relax_to_harmonic(initial, flow, dt, tol=1e-11, max_steps=200000, block=200):
    """Drive a profile to a harmonic map by running the flow to stationarity.

    Steps the semi-implicit scheme in blocks until the update rate
    max|rho_new - rho| / dt drops below tol; returns the relaxed
    single-frame map and the final rate.
    """
    r = initial.r
    row = initial.rho[-1].copy()
    t = float(initial.t[-1])
    rate = math.inf
    for _ in range(0, max_steps, block):
        frames = _evolve_frames(
            flow, initial.target, r, row, t, block, dt, "semi_implicit", {block}
        )
        new = frames[block]
        rate = float(np.max(np.abs(new - row))) / dt
        row = new
        t += block * dt
        if rate < tol:
            break
    relaxed = EquivariantMap(
        r=r.copy(),
        t=np.array([t]),
        rho=row[None, :],
        domain=flow,
        target=initial.target,
        boundary=row[-1:].copy(),
    )
    return relaxed, rate


def to_csv(map_, path):
    """Write the trajectory as rows r,t,rho,energy_density."""
    rows = []
    for j in range(map_.nt):
        density = map_.energy_density(j)
        for i in range(map_.nr):
            rows.append((map_.r[i], map_.t[j], map_.rho[j, i], density[i]))
    write_csv(path, ["r", "t", "rho", "energy_density"], rows)


def from_csv(path, flow, target):
    """Read a single-frame profile written by to_csv."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        recs = [(float(row["r"]), float(row["t"]), float(row["rho"])) for row in reader]
    if not recs:
        raise ValueError("no profile rows in %s" % path)
    times = sorted({rec[1] for rec in recs})
    if len(times) != 1:
        raise ValueError("initial profiles must contain a single time")
    recs.sort()
    r = np.array([rec[0] for rec in recs])
    rho = np.array([rec[2] for rec in recs])[None, :]
    return EquivariantMap(
        r=r,
        t=np.array(times),
        rho=rho,
        domain=flow,
        target=target,
        boundary=rho[:, -1].copy(),
    )
