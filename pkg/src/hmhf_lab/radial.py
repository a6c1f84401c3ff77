"""Radial harmonic map ODE suite: phase plane, roots, growth orders.

In log-radius time t = log r the profile equation for an equivariant
harmonic map from flat R^m becomes the damped pendulum

    alpha'' + (m - 2) alpha' = (m - 1) sin(alpha),      alpha = 2 rho,

whose connecting orbit from (0, 0) to (pi, 0) is the classical singular
harmonic map profile.  The approach to (pi, 0) is governed by the roots
of lambda^2 + (m - 2) lambda + (m - 1) = 0: real (node) for m >= 7,
complex (spiral, so the orbit overshoots pi) for 2 <= m <= 6.  The
exponent N1 = -lambda1 of the slow mode is the polynomial growth order
of 1/cos(rho(r)) along the profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from ._io import write_csv
from .errors import (
    ClassificationConflict,
    NotConvergent,
    ToleranceNotMet,
    WindowTooNarrow,
)

#: Default fit window in pi - alpha: below the nonlinear regime, above
#: round-off amplification.
FIT_GAP_HIGH = 1e-4
FIT_GAP_LOW = 1e-8


@dataclass(frozen=True)
class RootData:
    """Characteristic data of the linearization at (pi, 0)."""

    m: int
    discriminant: float
    real: bool
    lambda1: complex
    lambda2: complex
    N1: Optional[float]
    N2: Optional[float]

    def to_dict(self):
        out = {
            "m": self.m,
            "discriminant": self.discriminant,
            "real": self.real,
            "N1": self.N1,
            "N2": self.N2,
        }
        if self.real:
            out["lambda1"] = float(self.lambda1.real)
            out["lambda2"] = float(self.lambda2.real)
        else:
            out["lambda1"] = [self.lambda1.real, self.lambda1.imag]
            out["lambda2"] = [self.lambda2.real, self.lambda2.imag]
        return out


def characteristic_roots(m):
    """Roots of lambda^2 + (m-2) lambda + (m-1) = 0, exact formula."""
    if int(m) != m or m < 2:
        raise ValueError("dimension must be an integer >= 2")
    m = int(m)
    disc = m * m - 8 * m + 8
    if disc >= 0:
        root = math.sqrt(disc)
        lam1 = (-(m - 2) + root) / 2.0
        lam2 = (-(m - 2) - root) / 2.0
        return RootData(
            m=m,
            discriminant=float(disc),
            real=True,
            lambda1=complex(lam1),
            lambda2=complex(lam2),
            N1=-lam1,
            N2=-lam2,
        )
    root = math.sqrt(-disc)
    lam1 = complex(-(m - 2) / 2.0, root / 2.0)
    return RootData(
        m=m,
        discriminant=float(disc),
        real=False,
        lambda1=lam1,
        lambda2=lam1.conjugate(),
        N1=None,
        N2=None,
    )


@dataclass(frozen=True)
class PendulumTrajectory:
    """Sampled phase-plane orbit with its dense interpolant."""

    m: int
    epsilon: float
    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    classification: str
    crossing_t: Optional[float] = None
    interp: Optional[Callable] = field(default=None, repr=False, compare=False)

    @property
    def r(self):
        return np.exp(self.t)

    @property
    def rho(self):
        return self.alpha / 2.0

    @property
    def crossing_r(self):
        return math.exp(self.crossing_t) if self.crossing_t is not None else None

    def to_csv(self, path):
        rows = zip(self.t, self.alpha, self.beta, self.r, self.rho)
        write_csv(path, ["t", "alpha", "beta", "r", "rho"], rows)


def _pendulum_rhs(m):
    damping = float(m - 2)
    forcing = float(m - 1)

    def rhs(t, y):
        return (y[1], forcing * math.sin(y[0]) - damping * y[1])

    return rhs


def _classify(t, alpha, crossing_t):
    if crossing_t is not None:
        return "SpiralCrossing"
    increasing = bool(np.all(np.diff(alpha) >= -1e-12))
    if increasing and math.pi - alpha[-1] < 1e-2:
        return "NodeConvergent"
    return "Undetermined"


def integrate_pendulum(m, alpha0, beta0, t_span, tol=1e-11, samples=4001):
    """Integrate the phase-plane system from arbitrary initial data.

    Returns a trajectory with the same classification rules as su_solve
    but without the dimension-consistency enforcement (this entry point
    exists for fixed-point and covariance checks).
    """
    if int(m) != m or m < 2:
        raise ValueError("dimension must be an integer >= 2")
    t_min, t_max = float(t_span[0]), float(t_span[1])
    if t_max <= t_min:
        raise ValueError("t_span must be increasing")
    events = None
    if alpha0 < math.pi:
        # a genuine spiral overshoots pi by a macroscopic amount, while a
        # node orbit can graze it within round-off; the offset keeps the
        # classifier from firing on 1e-15 wiggles near the equilibrium
        def cross(t, y):
            return y[0] - (math.pi + 1e-9)
        cross.terminal = False
        cross.direction = 1.0
        events = [cross]
    sol = solve_ivp(
        _pendulum_rhs(int(m)),
        (t_min, t_max),
        (float(alpha0), float(beta0)),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-2,
        dense_output=True,
        events=events,
    )
    if not sol.success:
        raise ToleranceNotMet("integrator failed: %s" % sol.message)
    t = np.linspace(t_min, t_max, int(samples))
    y = sol.sol(t)
    crossing = None
    if events is not None and sol.t_events[0].size:
        crossing = float(sol.t_events[0][0])
    return PendulumTrajectory(
        m=int(m),
        epsilon=float("nan"),
        t=t,
        alpha=y[0],
        beta=y[1],
        classification=_classify(t, y[0], crossing),
        crossing_t=crossing,
        interp=sol.sol,
    )


def su_solve(m, epsilon=1e-6, t_span=(-20.0, 16.0), tol=1e-11, samples=4001):
    """Orbit leaving (0,0) along the unstable eigenvector (1,1).

    The launch point (epsilon, epsilon) at t_min realizes the slope
    condition d rho/dr > 0 at r = 0; epsilon must be small enough that
    the linear regime is valid there.  Classification that contradicts
    the root structure (a crossing for m >= 7, or a node for m <= 6)
    signals an integration fault and raises instead of returning.
    """
    if not 0.0 < epsilon <= 0.1:
        raise ValueError("epsilon must lie in (0, 0.1]")
    t_min = float(t_span[0])
    if epsilon * math.exp(t_min) > max(tol, 1e-12):
        raise ValueError(
            "t_min is not negative enough for the unstable-manifold launch"
        )
    traj = integrate_pendulum(m, epsilon, epsilon, t_span, tol=tol, samples=samples)
    traj = PendulumTrajectory(
        m=traj.m,
        epsilon=float(epsilon),
        t=traj.t,
        alpha=traj.alpha,
        beta=traj.beta,
        classification=traj.classification,
        crossing_t=traj.crossing_t,
        interp=traj.interp,
    )
    roots = characteristic_roots(m)
    if roots.real and traj.classification == "SpiralCrossing":
        raise ClassificationConflict(
            "m=%d has real roots but the orbit crossed pi" % m
        )
    if not roots.real and traj.classification == "NodeConvergent":
        raise ClassificationConflict(
            "m=%d has complex roots but the orbit converged monotonically" % m
        )
    return traj


@dataclass(frozen=True)
class ExponentReport:
    slope: float
    stderr: float
    N1_predicted: float
    growth_order_of_v: float
    window: tuple
    matched_root: str
    points: int

    def to_dict(self):
        return {
            "slope": self.slope,
            "stderr": self.stderr,
            "N1_formula": self.N1_predicted,
            "growth_order_of_v": self.growth_order_of_v,
            "window": list(self.window),
            "matched_root": self.matched_root,
            "points": self.points,
        }


def _auto_window(traj):
    gap = math.pi - traj.alpha
    inside = np.nonzero((gap > FIT_GAP_LOW) & (gap < FIT_GAP_HIGH))[0]
    if inside.size < 2:
        raise WindowTooNarrow(
            "trajectory never resolves pi - alpha in [%g, %g]"
            % (FIT_GAP_LOW, FIT_GAP_HIGH)
        )
    return float(traj.t[inside[0]]), float(traj.t[inside[-1]])


def asymptotic_exponent(traj, fit_window=None):
    """Least-squares exponent of the approach alpha -> pi.

    log(pi - alpha) ~ slope * t + const on the window; -slope estimates
    N1, which is also the polynomial growth order of v = 1/cos(rho(r))
    in r.  If the orbit happens to approach along the fast mode the
    report says so in matched_root instead of failing.
    """
    if traj.classification != "NodeConvergent":
        raise NotConvergent(
            "exponent fit needs a NodeConvergent orbit, got %s"
            % traj.classification
        )
    if fit_window is None:
        fit_window = _auto_window(traj)
    t_a, t_b = float(fit_window[0]), float(fit_window[1])
    mask = (traj.t >= t_a) & (traj.t <= t_b)
    gap = math.pi - traj.alpha[mask]
    tt = traj.t[mask]
    if tt.size < 8 or t_b - t_a < 0.5:
        raise WindowTooNarrow(
            "fit window [%g, %g] holds %d samples" % (t_a, t_b, tt.size)
        )
    if np.any(gap <= 0.0):
        raise WindowTooNarrow("window reaches past the approach regime")
    design = np.vstack([tt, np.ones_like(tt)]).T
    coef, res, _, _ = np.linalg.lstsq(design, np.log(gap), rcond=None)
    slope = float(coef[0])
    dof = max(tt.size - 2, 1)
    var = float(res[0]) / dof if res.size else 0.0
    sxx = float(np.sum((tt - tt.mean()) ** 2))
    stderr = math.sqrt(var / sxx) if sxx > 0 else float("inf")
    roots = characteristic_roots(traj.m)
    n1, n2 = roots.N1, roots.N2
    matched = "N1" if abs(-slope - n1) <= abs(-slope - n2) else "N2"
    return ExponentReport(
        slope=slope,
        stderr=stderr,
        N1_predicted=float(n1),
        growth_order_of_v=-slope,
        window=(t_a, t_b),
        matched_root=matched,
        points=int(tt.size),
    )


def profile_interpolant(traj):
    """The map profile rho(r) = alpha(log r) / 2 as a vectorized callable.

    Below the sampled window the linear launch regime rho ~ C r is used,
    so the interpolant is usable down to r = 0 (profile builders sample
    it on grids that start at the origin).
    """
    t_min = float(traj.t[0])
    t_max = float(traj.t[-1])
    c_lin = float(traj.alpha[0]) * math.exp(-t_min) / 2.0

    def rho(r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        small = r <= math.exp(t_min)
        out[small] = c_lin * r[small]
        big = ~small
        if np.any(big):
            tt = np.log(r[big])
            if np.any(tt > t_max + 1e-12):
                raise ValueError("profile sampled beyond the integrated window")
            out[big] = traj.interp(np.minimum(tt, t_max))[0] / 2.0
        return out

    return rho
