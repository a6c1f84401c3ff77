"""Space-form helper functions shared by the domain and target modules.

``sn(k, r)`` is the generalized sine: the solution of f'' + k f = 0 with
f(0) = 0, f'(0) = 1.  It interpolates continuously in the curvature k:

    k > 0: sin(sqrt(k) r) / sqrt(k)
    k = 0: r
    k < 0: sinh(sqrt(-k) r) / sqrt(-k)

All functions accept scalars or numpy arrays and are evaluated in a form
stable for |k| r^2 << 1 so that curvature can be taken to zero without a
jump (the k -> 0 limit agrees with the flat value to machine precision).
"""

from __future__ import annotations

import numpy as np

# Below this value of x = |k| r^2 the series for sn/sn' is used; the first
# omitted term is x^3/5040 ~ 1e-19 at the threshold, under double rounding.
_SERIES_CUT = 1e-4


def sn(k, r):
    """Generalized sine sn_k(r)."""
    k = float(k)
    r = np.asarray(r, dtype=float)
    if k == 0.0:
        out = r.copy()
    else:
        x = k * r * r
        small = np.abs(x) < _SERIES_CUT
        out = np.empty_like(r)
        # series: r (1 - x/6 + x^2/120)
        xs = np.where(small, x, 0.0)
        out_small = r * (1.0 - xs / 6.0 + xs * xs / 120.0)
        if k > 0.0:
            s = np.sqrt(k)
            out_big = np.sin(s * r) / s
        else:
            s = np.sqrt(-k)
            out_big = np.sinh(s * r) / s
        out = np.where(small, out_small, out_big)
    if out.ndim == 0:
        return float(out)
    return out


def sn_prime(k, r):
    """Derivative sn_k'(r): cos, 1, or cosh of the scaled argument."""
    k = float(k)
    r = np.asarray(r, dtype=float)
    if k == 0.0:
        out = np.ones_like(r)
    elif k > 0.0:
        out = np.cos(np.sqrt(k) * r)
    else:
        out = np.cosh(np.sqrt(-k) * r)
    if out.ndim == 0:
        return float(out)
    return out


def sn_ratio(k, r):
    """The radial mean-curvature factor sn_k'(r) / sn_k(r).

    Diverges like 1/r at r = 0; callers keep their grids away from zero
    (and away from r = pi on the unit sphere).
    """
    return sn_prime(k, r) / sn(k, r)


def sphere_area(m):
    """Surface measure of the unit (m-1)-sphere in R^m."""
    from scipy.special import gamma

    return 2.0 * np.pi ** (m / 2.0) / gamma(m / 2.0)
