"""Gradient-estimate verification and growth scans for equivariant maps.

This module builds the space-time cutoff used by the pointwise gradient
estimates, measures its derivative constants on a fine grid, assembles
the explicit dimensional constants, and then checks the two estimates

    nonpositive target:  |du| / (A^2 - rho^2 o u) <= (c_m^{1/4}/A) S
    positive target:     |du| / (A - phi o u) <= (4 cbar_m^{1/4}/sqrt(kappa))
                                                  S * sup(1/cos(sqrt(kappa) rho o u))^2

with S = 1/R + 1/sqrt(T) + sqrt(K), on grid nodes of stored equivariant
maps.  Space-time windows Q_{R,T} are sublevel sets of the reduced
distance surrogate frak_d.  A growth scanner fits the window suprema
against R and classifies the sublinearity hypothesis of the vanishing
theorems.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import flows as _flows
from . import maps as _maps
from . import reduced as _reduced
from ._io import write_csv, write_json
from .errors import (
    AssumptionFailed,
    EmptyWindow,
    InsufficientWindows,
    InvalidWindow,
    OutsideRegularBall,
    WrongAlpha,
)

#: Number of measurement nodes per axis for the cutoff constants.
MEASUREMENT_NODES = 2048

#: Growth-exponent threshold: sublinear means fitted slope below 1 by
#: at least this safety margin.
SLOPE_MARGIN = 0.05

#: Fraction of T used as the floor of the time window; verdicts are
#: floored away from the initial slice by this amount.
THETA_FRACTION = 1e-3

_INTERPRETATION = (
    "growth near infinity read as the log-log regression slope over the "
    "largest available decade of R; sublinear means slope < %g"
    % (1.0 - SLOPE_MARGIN)
)


# ---------------------------------------------------------------------------
# smooth transition profiles


def _theta_jet(s):
    """Value and first two derivatives of the C^infinity step theta.

    theta(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) on (0,1), extended
    by 0 and 1; evaluated as a logistic of g(s) = 1/(1-s) - 1/s so that
    both tails underflow cleanly instead of dividing 0 by 0.
    """
    s = np.asarray(s, dtype=float)
    th = np.zeros_like(s)
    d1 = np.zeros_like(s)
    d2 = np.zeros_like(s)
    th[s >= 1.0] = 1.0
    inner = (s > 0.0) & (s < 1.0)
    x = s[inner]
    g = 1.0 / (1.0 - x) - 1.0 / x
    gp = 1.0 / (1.0 - x) ** 2 + 1.0 / x ** 2
    gpp = 2.0 / (1.0 - x) ** 3 - 2.0 / x ** 3
    t = expit(g)
    w = t * (1.0 - t)
    th[inner] = t
    d1[inner] = w * gp
    d2[inner] = w * ((1.0 - 2.0 * t) * gp * gp + gpp)
    return th, d1, d2


def _bump_jet(s):
    """theta^8 and its first two derivatives.

    The eighth power gives vanishing order 8 at s = 0, which keeps all
    the ratio constants below finite even for exponents alpha close
    to 1.
    """
    th, d1, d2 = _theta_jet(s)
    p = th ** 8
    p1 = 8.0 * th ** 7 * d1
    p2 = 8.0 * th ** 6 * (7.0 * d1 * d1 + th * d2)
    return p, p1, p2


def _phi1_jet(xi):
    """Radial profile: 1 on [0,1/2], theta^8 transition, 0 from 1 on."""
    xi = np.asarray(xi, dtype=float)
    val = np.ones_like(xi)
    d1 = np.zeros_like(xi)
    d2 = np.zeros_like(xi)
    val[xi >= 1.0] = 0.0
    mid = (xi > 0.5) & (xi < 1.0)
    p, p1, p2 = _bump_jet(2.0 * (1.0 - xi[mid]))
    val[mid] = p
    d1[mid] = -2.0 * p1
    d2[mid] = 4.0 * p2
    return val, d1, d2


def _phi2_jet(eta):
    """Time profile: 1 on [0,1/4], theta^8 transition, 0 from 1 on."""
    eta = np.asarray(eta, dtype=float)
    val = np.ones_like(eta)
    d1 = np.zeros_like(eta)
    d2 = np.zeros_like(eta)
    val[eta >= 1.0] = 0.0
    mid = (eta > 0.25) & (eta < 1.0)
    p, p1, p2 = _bump_jet((4.0 / 3.0) * (1.0 - eta[mid]))
    val[mid] = p
    d1[mid] = -(4.0 / 3.0) * p1
    d2[mid] = (16.0 / 9.0) * p2
    return val, d1, d2


def cutoff_ratio_profiles(alpha, s):
    """The three dimensionless derivative ratios along the transition.

    With psi = phi1(r/R) phi2(tau/T) and phi = theta^8 on a transition
    variable s, the ratios |d_r psi| psi^{-alpha} R,
    |d_r^2 psi| psi^{-alpha} R^2 and |d_tau psi| psi^{-1/2} T factor
    into a function of the radial transition variable times a power of
    the other profile, whose sup is 1 on the plateau.  The radial
    factors reduce algebraically to

        16 theta^{7-8 alpha} |theta'|
        32 theta^{6-8 alpha} |7 theta'^2 + theta theta''|
        (32/3) theta^3 |theta'|

    which stay bounded on [0,1]; evaluating them in this cancelled form
    avoids dividing vanishing derivatives by vanishing powers of psi.
    """
    th, d1, d2 = _theta_jet(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = 16.0 * th ** (7.0 - 8.0 * alpha) * np.abs(d1)
        r2 = 32.0 * th ** (6.0 - 8.0 * alpha) * np.abs(7.0 * d1 * d1 + th * d2)
        rt = (32.0 / 3.0) * th ** 3 * np.abs(d1)
    # the analytic limit of every ratio at the support edge is 0
    r1 = np.where(np.isfinite(r1), r1, 0.0)
    r2 = np.where(np.isfinite(r2), r2, 0.0)
    rt = np.where(np.isfinite(rt), rt, 0.0)
    return r1, r2, rt


def measure_cutoff_constants(alpha, nodes=MEASUREMENT_NODES):
    """Measured suprema (C_alpha, C) of the cutoff derivative ratios.

    The profiles factorize, so the sup over the nodes-per-axis product
    grid equals the product of axis maxima; the orthogonal factor
    attains its maximum 1 on the plateau, which the grid contains.
    """
    s = np.linspace(0.0, 1.0, nodes)
    r1, r2, rt = cutoff_ratio_profiles(alpha, s)
    return float(max(r1.max(), r2.max())), float(rt.max())


@dataclass(frozen=True)
class CutoffFunction:
    """Space-time cutoff psi(r, tau) = phi1(r/R) phi2(tau/T).

    Identically 1 on [0, R/2] x [0, T/4], supported in [0, R] x [0, T],
    radially non-increasing.  C_alpha bounds both radial derivative
    ratios |d_r psi| psi^{-alpha} R and |d_r^2 psi| psi^{-alpha} R^2;
    C bounds the time ratio |d_tau psi| psi^{-1/2} T.  Both constants
    are measured suprema over the construction grid.
    """

    R: float
    T: float
    alpha: float
    profile_r: object
    profile_t: object
    C_alpha: float
    C: float

    def psi(self, r, tau):
        v1, _, _ = _phi1_jet(np.asarray(r, dtype=float) / self.R)
        v2, _, _ = _phi2_jet(np.asarray(tau, dtype=float) / self.T)
        return v1 * v2

    def dpsi_dr(self, r, tau):
        _, d1, _ = _phi1_jet(np.asarray(r, dtype=float) / self.R)
        v2, _, _ = _phi2_jet(np.asarray(tau, dtype=float) / self.T)
        return d1 * v2 / self.R

    def d2psi_dr2(self, r, tau):
        _, _, d2 = _phi1_jet(np.asarray(r, dtype=float) / self.R)
        v2, _, _ = _phi2_jet(np.asarray(tau, dtype=float) / self.T)
        return d2 * v2 / (self.R * self.R)

    def dpsi_dtau(self, r, tau):
        v1, _, _ = _phi1_jet(np.asarray(r, dtype=float) / self.R)
        _, d1, _ = _phi2_jet(np.asarray(tau, dtype=float) / self.T)
        return v1 * d1 / self.T


def build_cutoff(R, T, alpha=0.75):
    """Construct the cutoff for the window [0,R] x [0,T] and measure its
    derivative constants on the standard grid."""
    if not (R > 0.0 and T > 0.0):
        raise InvalidWindow("window needs R > 0 and T > 0, got R=%g T=%g" % (R, T))
    if not 0.0 < alpha < 1.0:
        raise InvalidWindow("cutoff exponent alpha must lie in (0,1), got %g" % alpha)
    c_alpha, c_time = measure_cutoff_constants(alpha)

    def profile_r(xi):
        return _phi1_jet(xi)[0]

    def profile_t(eta):
        return _phi2_jet(eta)[0]

    return CutoffFunction(
        R=float(R),
        T=float(T),
        alpha=float(alpha),
        profile_r=profile_r,
        profile_t=profile_t,
        C_alpha=c_alpha,
        C=c_time,
    )


# ---------------------------------------------------------------------------
# explicit constants


@dataclass(frozen=True)
class EstimateConstants:
    """Explicit constants entering the nonpositive-target estimate."""

    m: int
    C34: float
    C: float
    Cbar_m: float
    Ctilde1: float
    Ctilde2: float
    c_m: float


def constants_from_values(m, C34, C):
    """Assemble the constant chain from given cutoff constants."""
    if m < 2:
        raise ValueError("dimension must be at least 2")
    if C34 <= 0.0 or C <= 0.0:
        raise ValueError("cutoff constants must be positive")
    cbar = 6.0 * C34 ** 2 * (m * m + 9.0 / 4.0 + (369.0 / 32.0) * C34 ** 2)
    ct1 = 1.5 * C * C
    ct2 = 6.0 * (1.0 + C34 ** 2 / 4.0)
    return EstimateConstants(
        m=int(m),
        C34=float(C34),
        C=float(C),
        Cbar_m=cbar,
        Ctilde1=ct1,
        Ctilde2=ct2,
        c_m=max(cbar, ct1, ct2),
    )


def theorem_constants(m, cutoff):
    """Constants for the nonpositive-target estimate at alpha = 3/4."""
    if cutoff.alpha != 0.75:
        raise WrongAlpha(
            "constant chain is derived for alpha = 3/4, cutoff has %g" % cutoff.alpha
        )
    return constants_from_values(m, cutoff.C_alpha, cutoff.C)


def cbar_from_values(m, C34, C):
    """Constant chain for the positive-target estimate.

    Three blocks, one per derivative of the cutoff entering the
    comparison argument run with the cubed cutoff psi^3:

      radial block   (27/4) C34^2 (m^2 + 9/4 + 9 C34^2) + (177147/16) C34^4
      time block     (27/16) C^2
      curvature block(27/4) (1 + C34^2/4)

    The 27/4 multipliers come from |grad psi^3| = 3 psi^2 |grad psi|
    squared against the 3/4-power weight; the quartic term absorbs the
    gradient self-interaction of the cubed cutoff (3^11/16 = 177147/16).
    """
    if m < 2:
        raise ValueError("dimension must be at least 2")
    if C34 <= 0.0 or C <= 0.0:
        raise ValueError("cutoff constants must be positive")
    radial = (27.0 / 4.0) * C34 ** 2 * (m * m + 9.0 / 4.0 + 9.0 * C34 ** 2)
    radial += (177147.0 / 16.0) * C34 ** 4
    time_block = (27.0 / 16.0) * C * C
    curvature = (27.0 / 4.0) * (1.0 + C34 ** 2 / 4.0)
    return max(radial, time_block, curvature)


def positive_curvature_constant(m, cutoff):
    """cbar_m for the positive-target estimate at alpha = 3/4."""
    if cutoff.alpha != 0.75:
        raise WrongAlpha(
            "constant chain is derived for alpha = 3/4, cutoff has %g" % cutoff.alpha
        )
    return cbar_from_values(m, cutoff.C_alpha, cutoff.C)


# ---------------------------------------------------------------------------
# window machinery


def _window_frames(map_, flow, T, theta):
    """Frames of the stored map that live in the time window [theta, T].

    Single-frame maps are read as eternal static solutions: one frame
    represents every time slice, and the reduced distance is evaluated
    at the flow horizon (it is time-independent for static scales).
    """
    if map_.nt == 1:
        return [(0, flow.tau_max)], True
    frames = []
    for j, t in enumerate(map_.t):
        tau = -float(t)
        if theta <= tau <= T:
            frames.append((j, tau))
    if not frames:
        raise EmptyWindow(
            "no stored frame has tau = -t inside [%g, %g]" % (theta, T)
        )
    return frames, False


def _window_field(map_, flow, frames, reduced):
    """frak_d columns for the participating frames (rows = map radii)."""
    taus = np.array([tau for _, tau in frames], dtype=float)
    if reduced is not None:
        if reduced.radii.size != map_.r.size or not np.allclose(
            reduced.radii, map_.r
        ):
            raise ValueError("reduced field radii do not match the map grid")
        cols = np.empty((map_.r.size, taus.size))
        for k, tau in enumerate(taus):
            hits = np.nonzero(np.isclose(reduced.taus, tau))[0]
            if hits.size == 0:
                raise ValueError(
                    "reduced field lacks tau=%g needed by the window" % tau
                )
            cols[:, k] = reduced.frak_d[:, hits[0]]
        return cols
    field = _reduced.build_reduced_field(flow, map_.r, taus)
    return field.frak_d


def _collect_window(map_, flow, R, T, K, reduced):
    """Shared sup machinery for both verifiers.

    Returns the participating frames, their frak_d columns, the
    per-frame membership masks for Q_{R,T} and Q_{R/2,T/4}, and the
    theta floor.
    """
    if not (R > 0.0 and T > 0.0):
        raise InvalidWindow("window needs R > 0 and T > 0, got R=%g T=%g" % (R, T))
    if K < 0.0:
        raise ValueError("K must be non-negative")
    theta = T * THETA_FRACTION
    frames, static = _window_frames(map_, flow, T, theta)
    frak_d = _window_field(map_, flow, frames, reduced)
    if np.nanmax(frak_d) < R:
        raise InvalidWindow(
            "window radius R=%g exceeds the stored profile reach %g"
            % (R, float(np.nanmax(frak_d)))
        )
    big = []
    small = []
    for k, (j, tau) in enumerate(frames):
        col = frak_d[:, k]
        inner = col <= R
        big.append(inner)
        if static or tau <= T / 4.0:
            small.append(inner & (col <= R / 2.0))
        else:
            small.append(np.zeros_like(inner))
    if not any(mask.any() for mask in small):
        raise EmptyWindow("no grid node satisfies frak_d <= R/2 inside the window")
    return frames, static, big, small, theta


def _du_norm(map_, flow, j):
    row = map_.rho[j]
    t = float(map_.t[j])
    density = _maps._energy_density_row(flow, map_.target, map_.r, row, t)
    return np.sqrt(density)


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one pointwise estimate check on one window."""

    theorem: str
    window: tuple
    K: float
    lhs_max: float
    rhs: float
    margin: float
    location: tuple
    A: float
    assumption_report: object
    verdict: str
    theta: float
    interpretation: str

    def to_dict(self):
        return {
            "theorem": self.theorem,
            "R": self.window[0],
            "T": self.window[1],
            "K": self.K,
            "lhs_max": self.lhs_max,
            "rhs": self.rhs,
            "margin": self.margin,
            "location": list(self.location),
            "A": self.A,
            "assumptions": self.assumption_report.to_dict(),
            "verdict": self.verdict,
            "theta": self.theta,
            "interpretation": self.interpretation,
        }

    def csv_row(self):
        return (
            self.theorem,
            self.window[0],
            self.window[1],
            self.K,
            self.lhs_max,
            self.rhs,
            self.margin,
            self.verdict,
        )

    def to_json(self, path):
        return write_json(path, self.to_dict())


def reports_to_csv(reports, path):
    """Combined CSV summary of estimate reports."""
    header = ["theorem", "R", "T", "K", "lhs_max", "rhs", "margin", "verdict"]
    return write_csv(path, header, [rep.csv_row() for rep in reports])


def _verdict(report, margin, strict):
    if not report.passes:
        if strict:
            raise AssumptionFailed(
                "hypothesis gate fails at K=%g (worst margin %g)"
                % (report.K, report.worst_margin)
            )
        return "Vacuous"
    return "Holds" if margin >= 0.0 else "Fails"


def gradient_estimate_verify_npc(map_, flow, R, T, K, reduced=None, strict=False):
    """Check |du|/(A^2 - rho^2 o u) <= (c_m^{1/4}/A)(1/R + 1/sqrt(T) + sqrt(K))
    on Q_{R/2,T/4} for a map into a nonpositively curved target.

    A is the sup of 2 rho o u over Q_{R,T} (1.0 for a constant map,
    where any positive bound works).  With strict=True a failing
    hypothesis gate raises instead of returning a Vacuous verdict.
    """
    if map_.target.kappa > 0.0:
        raise ValueError("nonpositive-target estimate needs kappa <= 0")
    frames, static, big, small, theta = _collect_window(
        map_, flow, R, T, K, reduced
    )
    gate = _flows.assumption_gate(flow, _flows.default_tau_grid(flow), K)

    A = 0.0
    for k, (j, _) in enumerate(frames):
        if big[k].any():
            A = max(A, 2.0 * float(np.max(map_.rho[j, big[k]])))
    if A == 0.0:
        A = 1.0

    lhs_max = -math.inf
    location = (math.nan, math.nan)
    for k, (j, tau) in enumerate(frames):
        mask = small[k]
        if not mask.any():
            continue
        du = _du_norm(map_, flow, j)[mask]
        rho = map_.rho[j, mask]
        vals = du / (A * A - rho * rho)
        i_best = int(np.argmax(vals))
        if vals[i_best] > lhs_max:
            lhs_max = float(vals[i_best])
            location = (float(map_.r[mask][i_best]), 0.0 if static else tau)

    constants = theorem_constants(flow.dimension, build_cutoff(R, T))
    rhs = (constants.c_m ** 0.25 / A) * (1.0 / R + 1.0 / math.sqrt(T) + math.sqrt(K))
    margin = rhs - lhs_max
    return EstimateReport(
        theorem="Gradient1",
        window=(float(R), float(T)),
        K=float(K),
        lhs_max=lhs_max,
        rhs=rhs,
        margin=margin,
        location=location,
        A=A,
        assumption_report=gate,
        verdict=_verdict(gate, margin, strict),
        theta=theta,
        interpretation=_INTERPRETATION,
    )


def gradient_estimate_verify_pos(map_, flow, R, T, K, reduced=None, strict=False):
    """Check the positive-target estimate on Q_{R/2,T/4}.

    phi = 1 - cos(sqrt(kappa) rho o u), A = (1 + sup phi)/2 over
    Q_{R,T}; the right-hand side carries the secant sup
    (sup 1/cos(sqrt(kappa) rho o u))^2 and the constant
    4 cbar_m^{1/4} / sqrt(kappa).
    """
    kappa = map_.target.kappa
    if kappa <= 0.0:
        raise ValueError("positive-target estimate needs kappa > 0")
    frames, static, big, small, theta = _collect_window(
        map_, flow, R, T, K, reduced
    )
    gate = _flows.assumption_gate(flow, _flows.default_tau_grid(flow), K)

    root = math.sqrt(kappa)
    ball = map_.target.regular_radius
    sup_phi = 0.0
    sup_sec = 1.0
    for k, (j, _) in enumerate(frames):
        if not big[k].any():
            continue
        rho = map_.rho[j, big[k]]
        top = float(np.max(rho))
        if top >= ball:
            raise OutsideRegularBall(
                "image reaches rho=%g on the window, regular ball radius %g"
                % (top, ball)
            )
        sup_phi = max(sup_phi, 1.0 - math.cos(root * top))
        sup_sec = max(sup_sec, 1.0 / math.cos(root * top))
    A = 0.5 * (1.0 + sup_phi)

    lhs_max = -math.inf
    location = (math.nan, math.nan)
    for k, (j, tau) in enumerate(frames):
        mask = small[k]
        if not mask.any():
            continue
        du = _du_norm(map_, flow, j)[mask]
        phi = 1.0 - np.cos(root * map_.rho[j, mask])
        vals = du / (A - phi)
        i_best = int(np.argmax(vals))
        if vals[i_best] > lhs_max:
            lhs_max = float(vals[i_best])
            location = (float(map_.r[mask][i_best]), 0.0 if static else tau)

    cbar = positive_curvature_constant(flow.dimension, build_cutoff(R, T))
    rhs = (
        (4.0 * cbar ** 0.25 / root)
        * (1.0 / R + 1.0 / math.sqrt(T) + math.sqrt(K))
        * sup_sec ** 2
    )
    margin = rhs - lhs_max
    return EstimateReport(
        theorem="Gradient2",
        window=(float(R), float(T)),
        K=float(K),
        lhs_max=lhs_max,
        rhs=rhs,
        margin=margin,
        location=location,
        A=A,
        assumption_report=gate,
        verdict=_verdict(gate, margin, strict),
        theta=theta,
        interpretation=_INTERPRETATION,
    )


# ---------------------------------------------------------------------------
# growth scans


@dataclass(frozen=True)
class ScanReport:
    """Growth classification of window suprema against the window radius."""

    mode: str
    R_values: tuple
    sups: tuple
    exponent: float
    threshold: float
    classification: str
    fit_range: tuple
    implied_bounds: tuple
    constant_map: bool
    interpretation: str

    def to_dict(self):
        return {
            "mode": self.mode,
            "R_values": list(self.R_values),
            "sups": list(self.sups),
            "exponent": self.exponent,
            "threshold": self.threshold,
            "classification": self.classification,
            "fit_range": list(self.fit_range),
            "implied_bounds": list(self.implied_bounds),
            "constant_map": self.constant_map,
            "interpretation": self.interpretation,
        }

    def to_json(self, path):
        return write_json(path, self.to_dict())


def _scan_sup(map_, flow, R, mode, reduced):
    """Window supremum for one radius: Q_{R,R^2} for the parabolic
    modes, the static ball frak_d <= R for the linear mode."""
    T = R * R
    theta = T * THETA_FRACTION
    frames, _static = _window_frames(map_, flow, T, theta)
    frak_d = _window_field(map_, flow, frames, reduced)
    if np.nanmax(frak_d) < R:
        raise InvalidWindow(
            "scan radius R=%g exceeds the stored profile reach %g"
            % (R, float(np.nanmax(frak_d)))
        )
    kappa = map_.target.kappa
    root = math.sqrt(kappa) if kappa > 0.0 else 0.0
    ball = map_.target.regular_radius
    out = 0.0
    for k, (j, _) in enumerate(frames):
        mask = frak_d[:, k] <= R
        if not mask.any():
            continue
        rho = map_.rho[j, mask]
        if mode == "NPC_growth":
            out = max(out, 2.0 * float(np.max(rho)))
        else:
            top = float(np.max(rho))
            if top >= ball:
                raise OutsideRegularBall(
                    "image reaches rho=%g inside the scan window" % top
                )
            sec = 1.0 / math.cos(root * top)
            out = max(out, sec * sec if mode == "Pos_growth" else sec)
    return out


def liouville_scan(map_, flow, R_list, mode, reduced=None):
    """Fit the growth of window suprema and classify sublinearity.

    Modes: NPC_growth tracks A_R = sup 2 rho o u over Q_{R,R^2} for
    nonpositively curved targets; Pos_growth tracks the squared secant
    sup over Q_{R,R^2}; Static_linear tracks the plain secant sup over
    the ball frak_d <= R.  A fitted log-log slope below the threshold
    classifies the map as HypothesisSatisfied, and the report then
    carries the implied gradient bounds, which shrink to zero as the
    windows grow.
    """
    if mode not in ("NPC_growth", "Pos_growth", "Static_linear"):
        raise ValueError("unknown scan mode %r" % (mode,))
    R_values = [float(R) for R in R_list]
    if len(R_values) < 3:
        raise InsufficientWindows(
            "growth fit needs at least 3 window radii, got %d" % len(R_values)
        )
    if any(b <= a for a, b in zip(R_values, R_values[1:])):
        raise ValueError("window radii must be strictly increasing")
    if mode == "NPC_growth" and map_.target.kappa > 0.0:
        raise ValueError("NPC_growth needs a target with kappa <= 0")
    if mode != "NPC_growth" and map_.target.kappa <= 0.0:
        raise ValueError("%s needs a target with kappa > 0" % mode)

    sups = [_scan_sup(map_, flow, R, mode, reduced) for R in R_values]
    threshold = 1.0 - SLOPE_MARGIN

    cutoff = build_cutoff(1.0, 1.0)
    if mode == "NPC_growth":
        c_root = theorem_constants(flow.dimension, cutoff).c_m ** 0.25
    else:
        c_root = 4.0 * positive_curvature_constant(
            flow.dimension, cutoff
        ) ** 0.25 / math.sqrt(map_.target.kappa)

    def implied(R, sup):
        # the matching estimate at K=0, T=R^2: both window terms give 1/R
        if mode == "NPC_growth":
            return 2.0 * c_root * sup / R
        if mode == "Pos_growth":
            return 2.0 * c_root * sup / R
        return c_root * sup * sup / R

    if all(s == 0.0 for s in sups):
        return ScanReport(
            mode=mode,
            R_values=tuple(R_values),
            sups=tuple(sups),
            exponent=0.0,
            threshold=threshold,
            classification="HypothesisSatisfied",
            fit_range=(R_values[0], R_values[-1]),
            implied_bounds=tuple(0.0 for _ in R_values),
            constant_map=True,
            interpretation=_INTERPRETATION,
        )
    if any(s <= 0.0 for s in sups):
        raise ValueError("window suprema must be positive for a log-log fit")

    arr_R = np.array(R_values)
    arr_S = np.array(sups)
    decade = arr_R >= arr_R[-1] / 10.0
    if decade.sum() < 3:
        decade = np.zeros_like(decade)
        decade[-3:] = True
    slope = float(
        np.polyfit(np.log(arr_R[decade]), np.log(arr_S[decade]), 1)[0]
    )
    satisfied = slope < threshold
    bounds = tuple(
        implied(R, s) if satisfied else math.nan
        for R, s in zip(R_values, sups)
    )
    return ScanReport(
        mode=mode,
        R_values=tuple(R_values),
        sups=tuple(sups),
        exponent=slope,
        threshold=threshold,
        classification="HypothesisSatisfied" if satisfied else "HypothesisViolated",
        fit_range=(float(arr_R[decade][0]), float(arr_R[decade][-1])),
        implied_bounds=bounds,
        constant_map=False,
        interpretation=_INTERPRETATION,
    )
