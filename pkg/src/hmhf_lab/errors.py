"""Exception types shared across the laboratory modules.

Every failure mode that a caller can meaningfully react to gets its own
class.  Plain ``ValueError`` is reserved for garden-variety precondition
violations (negative radius, malformed arrays) that indicate a caller bug
rather than a mathematical condition of interest.
"""

from __future__ import annotations


class HmhfLabError(Exception):
    """Base class for all laboratory-specific errors."""


# ---------------------------------------------------------------- flows

class OutOfHorizon(HmhfLabError):
    """A time value lies outside the flow's [0, tau_max] horizon."""


class NonPositiveScale(HmhfLabError):
    """The conformal scale c(tau) fails positivity on the horizon."""


class TauZero(HmhfLabError):
    """A quantity with a 1/tau term was requested at tau = 0."""


class EmptyGrid(HmhfLabError):
    """A grid argument contains no nodes."""


# --------------------------------------------------------------- reduced

class CurveOutOfHorizon(HmhfLabError):
    """A space-time curve leaves the flow horizon."""


class DegenerateCurve(HmhfLabError):
    """A space-time curve has non-increasing or duplicated times."""


class NoConvergence(HmhfLabError):
    """The variational minimizer exhausted its iteration budget.

    Carries the best value and gradient residual reached so the caller
    can decide whether the partial answer is usable.
    """

    def __init__(self, message, best_value=None, residual=None):
        super().__init__(message)
        self.best_value = best_value
        self.residual = residual


class AssumptionFailed(HmhfLabError):
    """A check requires flow assumptions that the gate rejected."""


class SingularRadius(HmhfLabError):
    """A radial grid touches a point where the Laplacian degenerates."""


# ------------------------------------------------------------------ maps

class OutsideRegularBall(HmhfLabError):
    """A map profile leaves the regular ball of the positively curved target."""


class BoundaryStencil(HmhfLabError):
    """A finite-difference stencil was requested at a boundary node."""


class CFLViolation(HmhfLabError):
    """The explicit scheme was asked to step beyond its stability bound."""


class RegularBallExit(HmhfLabError):
    """The evolving profile reached the regular-ball boundary.

    Carries the forward time and profile sup at the moment of exit.
    """

    def __init__(self, message, t=None, max_rho=None):
        super().__init__(message)
        self.t = t
        self.max_rho = max_rho


class NotASolution(HmhfLabError):
    """An identity that presumes the flow equation was evaluated on data
    whose flow residual is above threshold."""


# ------------------------------------------------------------------ kato

class ConstraintViolated(HmhfLabError):
    """A jet fails its symmetry or trace-free constraint."""


class NotHarmonic(HmhfLabError):
    """A pointwise check that presumes harmonicity got a map whose
    tension residual is above threshold."""


class QTooSmall(HmhfLabError):
    """The subharmonicity exponent q does not exceed 2m - 3."""


# ------------------------------------------------------------- estimates

class InvalidWindow(HmhfLabError):
    """A space-time window is empty, inverted, or not covered by the data."""


class WrongAlpha(HmhfLabError):
    """A cutoff vanishing-order exponent outside the supported range."""


class EmptyWindow(HmhfLabError):
    """No grid nodes fall inside the requested sub-window."""


# ---------------------------------------------------------------- radial

class InsufficientWindows(HmhfLabError):
    """Too few window radii to fit a growth exponent."""


class WindowTooNarrow(HmhfLabError):
    """An exponent fit window contains too few usable samples."""


class NotConvergent(HmhfLabError):
    """An asymptotic fit was requested on a non-convergent trajectory."""


class ClassificationConflict(HmhfLabError):
    """A phase-plane classification contradicts the root analysis."""


# ------------------------------------------------------------------- cli

class ToleranceNotMet(HmhfLabError):
    """A verdict fell outside its configured tolerance."""


class ConfigInvalid(HmhfLabError):
    """An experiment config failed schema validation."""


class MissingReport(HmhfLabError):
    """Plot emission was asked for a directory without reports."""
