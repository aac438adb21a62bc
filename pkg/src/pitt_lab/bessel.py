"""Bessel functions J_alpha, their normalized form j_alpha, and positive zeros.

The normalized function j_alpha(t) = Gamma(alpha+1) (t/2)^{-alpha} J_alpha(t)
equals 1 at t = 0 and is the radial Fourier kernel in R^n for
alpha = n/2 - 1.  Orders below -1/2 are out of scope.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import gamma, jv

__all__ = [
    "BesselOrder",
    "bessel_j",
    "normalized_j",
    "first_positive_zero",
    "zeros",
    "order_for_dimension",
]


@dataclass(frozen=True)
class BesselOrder:
    """Order alpha >= -1/2 of a Bessel function of the first kind."""

    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise ValueError("Bessel order must be finite")
        if self.alpha < -0.5:
            raise ValueError(f"Bessel order must be >= -1/2, got {self.alpha}")


def order_for_dimension(n: int) -> BesselOrder:
    """Radial kernel order n/2 - 1 for dimension n >= 1."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return BesselOrder(n / 2 - 1)


def _as_order(order) -> BesselOrder:
    if isinstance(order, BesselOrder):
        return order
    return BesselOrder(float(order))


def bessel_j(order, t):
    """J_alpha(t) for t >= 0.

    Accepts a scalar or array argument; relative accuracy is well below
    1e-10 for t <= 2000 (verified against an extended-precision series
    reference in the test suite).
    """
    order = _as_order(order)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("bessel_j requires t >= 0")
    out = jv(order.alpha, t)
    return float(out) if out.ndim == 0 else out


def normalized_j(order, t):
    """Normalized Bessel function j_alpha(t), with j_alpha(0) = 1.

    Evaluated through the defining formula away from zero and by its
    power series for small t, so the removable singularity at t = 0
    never surfaces.
    """
    order = _as_order(order)
    alpha = order.alpha
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("normalized_j requires t >= 0")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)

    small = t < 0.5
    if np.any(small):
        # j_alpha(t) = sum_k z^k / (k! (alpha+1)_k), z = -t^2/4
        z = -0.25 * t[small] ** 2
        term = np.ones_like(z)
        acc = np.ones_like(z)
        for k in range(1, 12):
            term = term * z / (k * (alpha + k))
            acc += term
        out[small] = acc
    if np.any(~small):
        ts = t[~small]
        out[~small] = gamma(alpha + 1) * (ts / 2.0) ** (-alpha) * jv(alpha, ts)
    return float(out[0]) if scalar else out


@lru_cache(maxsize=None)
def _zeros_cached(alpha: float, count: int):
    # Sequential sign-change scan.  Consecutive zeros of J_alpha are at least
    # ~3 apart for alpha >= -1/2, so a 0.5 step cannot skip a pair; the
    # asymptotic guess pi*(1 + alpha/2 - 1/4) only caps how far we may scan.
    f = lambda t: normalized_j(alpha, t)
    step = 0.5
    found = []
    t_prev = 1e-9
    f_prev = f(t_prev)
    t = step
    horizon = math.pi * (count + alpha / 2 + 2) + 10 * step
    while len(found) < count and t < horizon * 4:
        f_cur = f(t)
        if f_prev == 0.0:
            found.append(t_prev)
        elif f_prev * f_cur < 0:
            found.append(brentq(f, t_prev, t, xtol=1e-13, rtol=8.9e-16))
        t_prev, f_prev = t, f_cur
        t += step
    if len(found) < count:
        raise RuntimeError(f"zero search stalled for order {alpha}")
    return tuple(found[:count])


def first_positive_zero(order) -> float:
    """First positive zero q_alpha of j_alpha (equivalently of J_alpha)."""
    order = _as_order(order)
    return _zeros_cached(order.alpha, 1)[0]


def zeros(order, count: int) -> np.ndarray:
    """First `count` positive zeros of J_alpha, strictly increasing."""
    order = _as_order(order)
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.array(_zeros_cached(order.alpha, count))
