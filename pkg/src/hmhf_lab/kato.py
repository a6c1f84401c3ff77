"""Pointwise algebraic inequalities for harmonic maps.

Two independent layers: a brute-force sweep of the refined Kato
inequality on random harmonic second-order jets (pure linear algebra,
no geometry), and finite-difference checks of the pointwise
subharmonicity consequences on equivariant harmonic maps into
positively curved targets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import ConstraintViolated, NotHarmonic, QTooSmall
from .maps import _c_at, _d1, _energy_density_row, _tension_row

#: Relative slack allowed in the inequality verdict (pure rounding).
KATO_TOL = 1e-12


@dataclass(frozen=True)
class HarmonicJet:
    """Gradient and Hessian of a harmonic map at a point, in normal
    coordinates: grad is n x m, hess is n x m x m, symmetric and
    trace-free in the domain indices (the harmonic-map equation)."""

    grad: np.ndarray
    hess: np.ndarray

    def __post_init__(self):
        grad = np.asarray(self.grad, dtype=float)
        hess = np.asarray(self.hess, dtype=float)
        object.__setattr__(self, "grad", grad)
        object.__setattr__(self, "hess", hess)
        self.validate()

    @property
    def n(self):
        return self.grad.shape[0]

    @property
    def m(self):
        return self.grad.shape[1]

    def validate(self):
        grad, hess = self.grad, self.hess
        if grad.ndim != 2 or hess.shape != (grad.shape[0],) + (grad.shape[1],) * 2:
            raise ConstraintViolated("jet shapes must be (n, m) and (n, m, m)")
        if not np.array_equal(hess, np.swapaxes(hess, 1, 2)):
            raise ConstraintViolated("hessian must be exactly symmetric")
        scale = float(np.max(np.abs(hess))) if hess.size else 0.0
        traces = np.trace(hess, axis1=1, axis2=2)
        if np.any(np.abs(traces) > 1e-14 * max(scale, 1.0)):
            raise ConstraintViolated("hessian traces must vanish (harmonicity)")


def random_jet(m, n, rng):
    """Uniform[-1,1] jet, symmetrized and diagonally projected trace-free."""
    grad = rng.uniform(-1.0, 1.0, size=(n, m))
    raw = rng.uniform(-1.0, 1.0, size=(n, m, m))
    hess = (raw + np.swapaxes(raw, 1, 2)) / 2.0
    trace = np.trace(hess, axis1=1, axis2=2) / m
    idx = np.arange(m)
    hess[:, idx, idx] -= trace[:, None]
    return HarmonicJet(grad=grad, hess=hess)


def kato_check(jet):
    """Refined Kato inequality at one jet.

    lhs = ||grad ||du|| ||^2 written algebraically as
    sum_i (sum_{alpha,j} u^a_ij u^a_j)^2 / ||du||^2, rhs is
    ((m-1)/m) ||grad du||^2.  Jets with zero gradient short-circuit to
    holds (the quotient is not defined there) and are flagged.
    """
    jet.validate()
    m = jet.m
    du_sq = float(np.sum(jet.grad * jet.grad))
    rhs = (m - 1) / m * float(np.sum(jet.hess * jet.hess))
    if du_sq == 0.0:
        return {
            "lhs": 0.0,
            "rhs": rhs,
            "holds": True,
            "slack": rhs,
            "degenerate": True,
        }
    w = np.einsum("aij,aj->i", jet.hess, jet.grad)
    lhs = float(np.sum(w * w)) / du_sq
    return {
        "lhs": lhs,
        "rhs": rhs,
        "holds": lhs <= rhs + KATO_TOL * rhs,
        "slack": rhs - lhs,
        "degenerate": False,
    }


@dataclass(frozen=True)
class SweepReport:
    samples: int
    violations: int
    worst_slack: float
    degenerate: int
    seed: int
    slack_histogram_edges: tuple = ()
    slack_histogram_counts: tuple = ()

    def to_dict(self):
        return {
            "samples": self.samples,
            "violations": self.violations,
            "worst_slack": self.worst_slack,
            "degenerate": self.degenerate,
            "seed": self.seed,
            "slack_histogram_edges": list(self.slack_histogram_edges),
            "slack_histogram_counts": list(self.slack_histogram_counts),
        }


def kato_sweep(samples=100000, m_max=6, n_max=4, seed=20240801):
    """Vectorized random sweep of the inequality over all (m, n) shapes.

    The sample budget is split evenly across m in [2, m_max] and
    n in [1, n_max]; each batch is evaluated with one einsum.  Returns
    the violation count (expected zero) and the smallest slack seen.
    """
    rng = np.random.default_rng(seed)
    shapes = [(m, n) for m in range(2, m_max + 1) for n in range(1, n_max + 1)]
    per = max(1, samples // len(shapes))
    total = 0
    violations = 0
    worst = math.inf
    edges = np.linspace(0.0, 1.0, 33)
    counts = np.zeros(edges.size - 1, dtype=int)
    for m, n in shapes:
        grad = rng.uniform(-1.0, 1.0, size=(per, n, m))
        raw = rng.uniform(-1.0, 1.0, size=(per, n, m, m))
        hess = (raw + np.swapaxes(raw, 2, 3)) / 2.0
        trace = np.trace(hess, axis1=2, axis2=3) / m
        idx = np.arange(m)
        hess[:, :, idx, idx] -= trace[:, :, None]
        du_sq = np.einsum("kam,kam->k", grad, grad)
        rhs = (m - 1) / m * np.einsum("kaij,kaij->k", hess, hess)
        w = np.einsum("kaij,kaj->ki", hess, grad)
        live = du_sq > 0.0
        lhs = np.zeros(per)
        lhs[live] = np.einsum("ki,ki->k", w[live], w[live]) / du_sq[live]
        slack = rhs - lhs
        violations += int(np.count_nonzero(lhs > rhs * (1.0 + KATO_TOL)))
        total += per
        worst = min(worst, float(np.min(slack)))
        rel = slack / np.maximum(rhs, np.finfo(float).tiny)
        counts += np.histogram(np.clip(rel, 0.0, 1.0), bins=edges)[0]
    return SweepReport(
        samples=total,
        violations=violations,
        worst_slack=worst,
        degenerate=0,
        seed=seed,
        slack_histogram_edges=tuple(float(e) for e in edges),
        slack_histogram_counts=tuple(int(c) for c in counts),
    )


@dataclass(frozen=True)
class EHReport:
    """Minima of the three pointwise inequalities, with refinement data."""

    q: float
    min_subharmonicity: float
    bochner_kato_min_slack: float
    lap_v_min_slack: float
    level_minima: tuple
    shrink_orders: tuple
    nodes: int

    def to_dict(self):
        return {
            "q": self.q,
            "min_subharmonicity": self.min_subharmonicity,
            "bochner_kato_min_slack": self.bochner_kato_min_slack,
            "lap_v_min_slack": self.lap_v_min_slack,
            "level_minima": [list(row) for row in self.level_minima],
            "shrink_orders": list(self.shrink_orders),
            "nodes": self.nodes,
        }


def _laplacian_row(flow, r, row, t):
    c = _c_at(flow, t)
    dr = r[1] - r[0]
    m = flow.dimension
    out = np.full_like(row, np.nan)
    d2 = (row[2:] - 2.0 * row[1:-1] + row[:-2]) / (dr * dr)
    d1 = (row[2:] - row[:-2]) / (2.0 * dr)
    ratio = geometry.sn_ratio(flow.base_curvature, r[1:-1])
    out[1:-1] = (d2 + (m - 1) * ratio * d1) / c
    return out


def _eh_minima(flow, target, r, rho, t, q, node_mask):
    """Minima of the three quantities over the masked interior nodes."""
    m = flow.dimension
    c = _c_at(flow, t)
    root = math.sqrt(target.kappa)
    du_sq = _energy_density_row(flow, target, r, rho, t)
    v = 1.0 / np.cos(root * rho)
    f = du_sq ** (q / 2.0) * v ** q
    lap_f = _laplacian_row(flow, r, f, t)
    du = np.sqrt(du_sq)
    grad_du_sq = _d1(du, r[1] - r[0]) ** 2 / c
    lap_du_sq = _laplacian_row(flow, r, du_sq, t)
    bk = lap_du_sq + 2.0 * target.kappa * du_sq ** 2 - (2.0 * m / (m - 1)) * grad_du_sq
    lap_v = _laplacian_row(flow, r, v, t)
    grad_v_sq = _d1(v, r[1] - r[0]) ** 2 / c
    lv = lap_v - target.kappa * du_sq * v - 2.0 * grad_v_sq / v
    return (
        float(np.min(lap_f[node_mask])),
        float(np.min(bk[node_mask])),
        float(np.min(lv[node_mask])),
    )


def eh_pointwise_check(map_, q, radii=None, levels=2, tension_tol=None):
    """Pointwise inequalities for a harmonic map into a kappa > 0 target.

    Evaluates, on interior nodes, the subharmonicity Delta(||du||^q v^q)
    (requires q > 2m - 3), the Bochner-Kato lower bound for
    Delta ||du||^2, and the lower bound for Delta v.  Each refinement
    level halves the spacing (re-sampling the profile); negative
    excursions of all three minima shrink at second order since the
    underlying inequalities are non-strict pointwise bounds.
    """
    flow = map_.domain
    target = map_.target
    if target.kappa <= 0.0:
        raise ValueError("the pointwise checks need a positively curved target")
    m = flow.dimension
    if q <= 2 * m - 3:
        raise QTooSmall("q must exceed 2m - 3 = %d, got %g" % (2 * m - 3, q))
    t = float(map_.t[-1])
    rho0 = map_.rho[-1]
    r0 = map_.r
    dr0 = float(map_.dr)
    tension = _tension_row(flow, target, r0, rho0, t)
    if tension_tol is None:
        tension_tol = 100.0 * dr0 * dr0 * (1.0 + float(np.max(np.abs(rho0))))
    worst = float(np.max(np.abs(tension[2:-2]))) if r0.size > 4 else 0.0
    if worst > tension_tol:
        raise NotHarmonic(
            "tension residual %g exceeds %g; the checks presume a harmonic map"
            % (worst, tension_tol)
        )
    if radii is None:
        radii = r0[2:-2]
    radii = np.asarray(radii, dtype=float)
    from .maps import _resample  # local import to avoid a cycle at load

    minima = []
    for lev in range(levels):
        factor = 2 ** lev
        r_l = np.arange((r0.size - 1) * factor + 1) * (dr0 / factor)
        rho_l = rho0 if lev == 0 else _resample(map_, r_l)
        idx = np.round(radii / (dr0 / factor)).astype(int)
        mask = np.zeros(r_l.size, dtype=bool)
        mask[idx] = True
        mask[:2] = False
        mask[-2:] = False
        minima.append(_eh_minima(flow, target, r_l, rho_l, t, q, mask))
    neg = [[max(0.0, -val) for val in row] for row in minima]
    orders = []
    for k in range(3):
        if neg[0][k] > 0.0 and neg[-1][k] > 0.0:
            orders.append(
                math.log2(neg[0][k] / neg[-1][k]) / max(1, levels - 1)
            )
        else:
            orders.append(float("nan"))
    fine = minima[-1]
    return EHReport(
        q=float(q),
        min_subharmonicity=fine[0],
        bochner_kato_min_slack=fine[1],
        lap_v_min_slack=fine[2],
        level_minima=tuple(tuple(row) for row in minima),
        shrink_orders=tuple(orders),
        nodes=int(np.count_nonzero(radii)),
    )
