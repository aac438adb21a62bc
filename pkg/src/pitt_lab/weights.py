"""Weight catalog, non-increasing rearrangement, majorants, and related checks.

The catalog covers power weights |x|^a, piecewise power weights (|x|^alpha
inside the unit ball, |x|^beta outside), the sparse-shell weight whose
radial mass sits on the intervals (k, k + k^{-n-1}), and tabulated weights
(radial from CSV, or gridded for n <= 3).  Rearrangements are built
constructively from distribution functions; for the catalog the
superlevel-set measures are closed forms, so rearranged norms are exact
up to root-finding tolerance.
"""

import bisect
import csv
from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .numerics import omega_surface
from .reports import (
    ConditionReport,
    VERDICT_FAILS,
    VERDICT_HOLDS,
)

__all__ = [
    "Weight",
    "PowerWeight",
    "PiecewiseWeight",
    "CounterexampleWeight",
    "TabulatedRadialWeight",
    "TabulatedGridWeight",
    "RadialCallableWeight",
    "one_weight",
    "counterexample_weight",
    "RearrangementTable",
    "rearrangement",
    "Majorant",
    "homogeneity_majorant",
    "radial_moment",
    "ball_weighted_integral",
    "campanato_morrey_norm",
    "interval_translation_check",
    "load_weight_csv",
]


def _ball_volume(n: int, radius: float) -> float:
    return omega_surface(n) / n * radius ** n


class Weight:
    """Base class: nonnegative weight on R^n, evaluable at point arrays."""

    kind = "abstract"
    is_radial = True

    def radial(self, rho):
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        return self.radial(np.linalg.norm(x, axis=1))

    def head_exponent(self):
        """Power behavior near 0, if known."""
        return None

    def tail_exponent(self):
        """Power behavior near infinity, if known."""
        return None

    def breakpoints(self, radius):
        """Radii where the weight is non-smooth (quadrature split hints)."""
        return ()

    def powered(self, e: float):
        """Weight x -> w(x)^e (kept inside the catalog when closed)."""
        head = self.head_exponent()
        tail = self.tail_exponent()
        return RadialCallableWeight(
            lambda rho: np.power(self.radial(rho), e),
            head_exponent=None if head is None else head * e,
            tail_exponent=None if tail is None else tail * e,
            breaks=tuple(self.breakpoints(1e6)),
        )

    def superlevel_measure(self, sigma: float, n: int, radius: float) -> float:
        """Lebesgue measure of {x in B_radius : w(x) > sigma}."""
        return _superlevel_by_scan(self.radial, sigma, n, radius,
                                   self.breakpoints(radius))[0]

    def partial_mass_above(self, sigma: float, n: int, radius: float) -> float:
        """integral over B_radius of (w - sigma)_+ (exact layer-cake tail)."""
        _, intervals = _superlevel_by_scan(self.radial, sigma, n, radius,
                                           self.breakpoints(radius))
        om = omega_surface(n)
        total = 0.0
        for lo, hi in intervals:
            total += om * _radial_integral_generic(
                lambda r: max(float(self.radial(np.array([r]))[0]) - sigma, 0.0)
                * r ** (n - 1),
                lo, hi, self.breakpoints(hi))
        return total

    def critical_levels(self, n: int, radius: float):
        """Weight values at which the distribution function may kink."""
        rr = [r for r in self.breakpoints(radius) if 0 < r <= radius]
        rr.append(radius)
        vals = []
        for r in rr:
            for probe in (r * (1 - 1e-9), r, min(r * (1 + 1e-9), radius)):
                v = float(self.radial(np.array([probe]))[0])
                if math.isfinite(v) and v > 0:
                    vals.append(v)
        return sorted(set(vals))

    def ball_integral(self, s: float, n: int) -> float:
        """Integral of w over the centered ball of radius s."""
        return omega_surface(n) * _radial_integral_generic(
            lambda r: self.radial(r) * r ** (n - 1), 0.0, s,
            self.breakpoints(s))


class PowerWeight(Weight):
    """w(x) = |x|^a."""

    kind = "power"

    def __init__(self, a: float):
        self.a = float(a)

    def __repr__(self):
        return f"PowerWeight(a={self.a})"

    def radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.a == 0:
            return np.ones_like(rho)
        with np.errstate(divide="ignore"):
            return rho ** self.a

    def head_exponent(self):
        return self.a

    def tail_exponent(self):
        return self.a

    def powered(self, e):
        return PowerWeight(self.a * e)

    def superlevel_measure(self, sigma, n, radius):
        return _power_superlevel(self.a, sigma, n, 0.0, radius)

    def partial_mass_above(self, sigma, n, radius):
        return _power_mass_above(self.a, sigma, n, 0.0, radius)

    def ball_integral(self, s, n):
        e = self.a + n
        if e <= 0:
            return math.inf
        return omega_surface(n) * s ** e / e


class PiecewiseWeight(Weight):
    """w(x) = |x|^alpha for |x| <= 1, |x|^beta for |x| > 1."""

    kind = "piecewise"

    def __init__(self, alpha: float, beta: float):
        self.alpha = float(alpha)
        self.beta = float(beta)

    def __repr__(self):
        return f"PiecewiseWeight(alpha={self.alpha}, beta={self.beta})"

    def radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore"):
            inner = rho ** self.alpha
            outer = rho ** self.beta
        return np.where(rho <= 1.0, inner, outer)

    def head_exponent(self):
        return self.alpha

    def tail_exponent(self):
        return self.beta

    def breakpoints(self, radius):
        return (1.0,) if radius > 1.0 else ()

    def powered(self, e):
        return PiecewiseWeight(self.alpha * e, self.beta * e)

    def superlevel_measure(self, sigma, n, radius):
        total = _power_superlevel(self.alpha, sigma, n, 0.0, min(1.0, radius))
        if radius > 1.0:
            total += _power_superlevel(self.beta, sigma, n, 1.0, radius)
        return total

    def partial_mass_above(self, sigma, n, radius):
        total = _power_mass_above(self.alpha, sigma, n, 0.0, min(1.0, radius))
        if radius > 1.0:
            total += _power_mass_above(self.beta, sigma, n, 1.0, radius)
        return total

    def ball_integral(self, s, n):
        om = omega_surface(n)
        e_in = self.alpha + n
        if e_in <= 0:
            return math.inf
        if s <= 1.0:
            return om * s ** e_in / e_in
        out = om / e_in
        e_out = self.beta + n
        if e_out == 0:
            out += om * math.log(s)
        else:
            out += om * (s ** e_out - 1.0) / e_out
        return out


class CounterexampleWeight(Weight):
    """Sparse-shell radial weight: u0(rho) rho^{n-1} = sum_k k^n chi_{A_k},
    A_k = (k, k + k^{-n-1}).

    Its moment integral against rho^{-a} is finite for every a > 0 while
    the rearranged mass over the shells grows like the harmonic sum.
    """

    kind = "counterexample"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("dimension must be >= 1")
        self.n = int(n)

    def __repr__(self):
        return f"CounterexampleWeight(n={self.n})"

    def shell(self, k: int):
        return float(k), k + float(k) ** (-self.n - 1)

    def shells_up_to(self, radius: float):
        out = []
        k = 1
        while k < radius:
            a, b = self.shell(k)
            if a >= radius:
                break
            out.append((k, a, min(b, radius)))
            k += 1
        return out

    def _shell_arrays(self, radius: float):
        cache = getattr(self, "_shell_cache", None)
        if cache is None:
            cache = {}
            self._shell_cache = cache
        if radius not in cache:
            kmax = int(radius)
            k = np.arange(1, max(kmax + 1, 2), dtype=float)
            a = k.copy()
            # keep widths separately: k + k^{-n-1} loses the width to roundoff
            width = np.minimum(k ** (-self.n - 1.0), np.maximum(radius - a, 0.0))
            valid = a < radius
            cache[radius] = (k[valid], a[valid], width[valid])
        return cache[radius]

    def radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        k = np.floor(rho).astype(int)
        inside = (k >= 1) & (rho > k) & (rho < k + np.maximum(k, 1) ** (-self.n - 1.0))
        out = np.zeros_like(rho)
        kk = k[inside].astype(float)
        out[inside] = kk ** self.n * rho[inside] ** (1 - self.n)
        return out

    def breakpoints(self, radius):
        pts = []
        for _, a, b in self.shells_up_to(radius):
            pts.extend((a, b))
        return tuple(pts)

    def tail_exponent(self):
        # envelope of the shell values: u0 ~ rho on the shells
        return 1.0

    def radial_mass(self, s: float) -> float:
        """Exact int_0^s u0(rho) rho^{n-1} drho = sum over shell overlaps."""
        k, a, width = self._shell_arrays(float(s))
        return float(np.sum(k ** self.n * width))

    def ball_integral(self, s, n):
        if n != self.n:
            raise ValueError("counterexample weight is tied to its dimension")
        return omega_surface(n) * self.radial_mass(s)

    def superlevel_measure(self, sigma, n, radius):
        if n != self.n:
            raise ValueError("counterexample weight is tied to its dimension")
        om = omega_surface(n)
        k, a, width = self._shell_arrays(float(radius))
        if len(k) == 0:
            return 0.0
        b = a + width
        if n == 1:
            hi = np.where(k > sigma, b, a)
        elif sigma <= 0:
            hi = b
        else:
            # value k^n rho^{1-n} decreases across each shell
            rho_star = (k ** n / sigma) ** (1.0 / (n - 1))
            hi = np.minimum(b, rho_star)
        hi = np.maximum(hi, a)
        return float(om / n * np.sum(hi ** n - a ** n))

    def partial_mass_above(self, sigma, n, radius):
        if n != self.n:
            raise ValueError("counterexample weight is tied to its dimension")
        om = omega_surface(n)
        k, a, width = self._shell_arrays(float(radius))
        if len(k) == 0:
            return 0.0
        b = a + width
        if n == 1:
            hi = np.where(k > sigma, b, a)
        elif sigma <= 0:
            hi = b
        else:
            rho_star = (k ** n / sigma) ** (1.0 / (n - 1))
            hi = np.clip(rho_star, a, b)
        # int_a^hi (k^n rho^{1-n} - sigma) rho^{n-1} drho, both pieces exact
        mass = k ** n * (hi - a) - sigma * (hi ** n - a ** n) / n
        return float(om * np.sum(np.maximum(mass, 0.0)))

    def critical_levels(self, n, radius):
        k, a, width = self._shell_arrays(float(radius))
        vals = np.concatenate([k ** self.n * a ** (1 - self.n),
                               k ** self.n * (a + width) ** (1 - self.n)])
        return sorted(set(vals.tolist()))

    def moment_tail_bound(self, a: float, k_from: int) -> float:
        """Upper bound sum_{k >= k_from} k^{-1-a} for the shell moments."""
        if a <= 0:
            return math.inf
        return k_from ** (-a) / a


class TabulatedRadialWeight(Weight):
    """Radial weight linearly interpolated from (r, value) samples.

    Zero beyond the last node; constant extension of the first value
    toward r = 0.
    """

    kind = "tabulated_radial"

    def __init__(self, nodes, values):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-D arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("radii must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("weight values must be nonnegative")
        self.nodes = nodes
        self.values = values

    def radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.interp(rho, self.nodes, self.values,
                         left=self.values[0], right=0.0)

    def breakpoints(self, radius):
        return tuple(r for r in self.nodes if r < radius)


class TabulatedGridWeight(Weight):
    """Piecewise-constant weight on a regular lattice in R^n, n <= 3."""

    kind = "tabulated_grid"
    is_radial = False

    def __init__(self, axes, values):
        axes = [np.asarray(a, dtype=float) for a in axes]
        if not 1 <= len(axes) <= 3:
            raise ValueError("grid weights support n <= 3")
        for a in axes:
            if np.any(np.diff(a) <= 0):
                raise ValueError("grid coordinates must be strictly increasing")
        values = np.asarray(values, dtype=float)
        if values.shape != tuple(len(a) for a in axes):
            raise ValueError("value array shape must match the axes")
        if np.any(values < 0):
            raise ValueError("weight values must be nonnegative")
        self.axes = axes
        self.values = values

    @property
    def n(self):
        return len(self.axes)

    def _cell_edges(self, a):
        mid = 0.5 * (a[:-1] + a[1:])
        first = a[0] - (mid[0] - a[0]) if len(a) > 1 else a[0] - 0.5
        last = a[-1] + (a[-1] - mid[-1]) if len(a) > 1 else a[-1] + 0.5
        return np.concatenate([[first], mid, [last]])

    def cell_measures(self):
        meas = np.ones(1)
        for a in self.axes:
            edges = self._cell_edges(a)
            meas = np.multiply.outer(meas, np.diff(edges))
        return meas.reshape(self.values.shape)

    def cell_centers(self):
        grids = np.meshgrid(*self.axes, indexing="ij")
        return np.column_stack([g.ravel() for g in grids])

    def radial(self, rho):
        raise TypeError("grid weights are not radial")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        idx = []
        for d, a in enumerate(self.axes):
            edges = self._cell_edges(a)
            i = np.clip(np.searchsorted(edges, x[:, d]) - 1, 0, len(a) - 1)
            idx.append(i)
        return self.values[tuple(idx)]

    def superlevel_measure(self, sigma, n, radius):
        if n != self.n:
            raise ValueError("dimension mismatch")
        centers = self.cell_centers()
        meas = self.cell_measures().ravel()
        vals = self.values.ravel()
        inside = np.linalg.norm(centers, axis=1) <= radius
        return float(np.sum(meas[inside & (vals > sigma)]))

    def partial_mass_above(self, sigma, n, radius):
        if n != self.n:
            raise ValueError("dimension mismatch")
        centers = self.cell_centers()
        meas = self.cell_measures().ravel()
        vals = self.values.ravel()
        inside = np.linalg.norm(centers, axis=1) <= radius
        return float(np.sum(meas[inside] * np.maximum(vals[inside] - sigma, 0.0)))

    def critical_levels(self, n, radius):
        return sorted(set(self.values.ravel().tolist()))


class RadialCallableWeight(Weight):
    """Generic radial weight from an evaluator (library-side convenience)."""

    kind = "radial"

    def __init__(self, fn, head_exponent=None, tail_exponent=None, breaks=()):
        self._fn = fn
        self._head = head_exponent
        self._tail = tail_exponent
        self._breaks = tuple(breaks)

    def radial(self, rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return np.asarray(self._fn(rho), dtype=float)

    def head_exponent(self):
        return self._head

    def tail_exponent(self):
        return self._tail

    def breakpoints(self, radius):
        return tuple(b for b in self._breaks if b < radius)


def one_weight() -> PowerWeight:
    """The constant weight v = 1."""
    return PowerWeight(0.0)


def counterexample_weight(n: int) -> CounterexampleWeight:
    """The sparse-shell weight with shells A_k = (k, k + k^{-n-1})."""
    return CounterexampleWeight(n)


# --- superlevel helpers ------------------------------------------------------

def _power_superlevel(a: float, sigma: float, n: int, lo: float, hi: float) -> float:
    """Measure of {rho in [lo, hi] : rho^a > sigma} in R^n."""
    interval = _power_superlevel_interval(a, sigma, lo, hi)
    if interval is None:
        return 0.0
    om = omega_surface(n)
    r1, r2 = interval
    return om / n * (r2 ** n - r1 ** n)


def _power_superlevel_interval(a, sigma, lo, hi):
    if hi <= lo:
        return None
    if sigma <= 0:
        return (lo, hi)
    if a == 0:
        return (lo, hi) if sigma < 1.0 else None
    crossing = sigma ** (1.0 / a)
    if a > 0:
        lo = max(lo, crossing)
    else:
        hi = min(hi, crossing)
    return (lo, hi) if hi > lo else None


def _power_mass_above(a: float, sigma: float, n: int, lo: float, hi: float) -> float:
    """integral over {rho in [lo,hi]} of (rho^a - sigma)_+ rho^{n-1} omega drho."""
    interval = _power_superlevel_interval(a, sigma, lo, hi)
    if interval is None:
        return 0.0
    r1, r2 = interval
    om = omega_surface(n)
    e = a + n
    if e <= 0 and r1 <= 0:
        return math.inf
    if e == 0:
        top = math.log(r2 / r1)
    else:
        top = (r2 ** e - r1 ** e) / e
    return om * (top - sigma * (r2 ** n - r1 ** n) / n)


def _boundary_bisect(indicator, lo, hi, iters=60):
    """Edge of a superlevel region by bisection on the boolean indicator."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if indicator(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _superlevel_by_scan(radial_fn, sigma, n, radius, breaks=()):
    """Superlevel measure and intervals by sampling + boundary bisection.

    Handles jump discontinuities as well as smooth crossings; resolution
    below the sample spacing comes from the bisection refinement, so the
    weight should be piecewise monotone at the sample scale.
    """
    base = np.linspace(0.0, radius, 4097)
    logpart = np.geomspace(max(radius * 1e-9, 1e-12), radius, 1025)
    eps = radius * 1e-12
    near_breaks = [b + d for b in breaks for d in (-eps, 0.0, eps)]
    rho = np.unique(np.concatenate([base, logpart, np.asarray(near_breaks, float)]))
    rho = rho[(rho >= 0) & (rho <= radius)]
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.asarray(radial_fn(rho), dtype=float)
    vals = np.nan_to_num(vals, nan=0.0, posinf=1e308)
    mask = vals > sigma
    om = omega_surface(n)

    def above(r):
        with np.errstate(divide="ignore", over="ignore"):
            v = float(radial_fn(np.array([r]))[0])
        return math.isfinite(v) and v > sigma or v == math.inf

    total = 0.0
    intervals = []
    i = 0
    while i < len(rho):
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < len(rho) and mask[j + 1]:
            j += 1
        lo = rho[i]
        hi = rho[j]
        if i > 0:
            lo = _boundary_bisect(lambda r: not above(r), rho[i - 1], rho[i])
        if j + 1 < len(rho):
            hi = _boundary_bisect(above, rho[j], rho[j + 1])
        total += om / n * (hi ** n - lo ** n)
        intervals.append((lo, hi))
        i = j + 1
    return total, intervals


def _radial_integral_generic(fn, lo, hi, breaks=()):
    pts = sorted({lo, hi} | {b for b in breaks if lo < b < hi})
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = quad(fn, a, b, limit=200, epsabs=1e-13, epsrel=1e-11)
        total += val
    return total


# --- rearrangement -----------------------------------------------------------

class RearrangementTable:
    """Non-increasing rearrangement u* of a weight over a truncated domain.

    Built from the distribution function lambda(sigma) = |{w > sigma}|;
    `decreasing` inverts it by bisection against the exact superlevel
    measures, so evaluation accuracy is limited only by root finding.
    """

    def __init__(self, weight: Weight, n: int, radius: float):
        self.weight = weight
        self.n = n
        self.radius = float(radius)
        self._build()

    def _build(self):
        w, n, R = self.weight, self.n, self.radius
        if isinstance(w, TabulatedGridWeight):
            sample_max = float(w.values.max())
            sample_min_pos = float(w.values[w.values > 0].min()) if np.any(w.values > 0) else 0.0
        else:
            rho = np.unique(np.concatenate([
                np.linspace(1e-9, R, 8193),
                np.geomspace(max(R * 1e-12, 1e-14), R, 2049),
                np.asarray(w.breakpoints(R), float) + 1e-13,
            ]))
            rho = rho[(rho > 0) & (rho <= R)]
            with np.errstate(divide="ignore", over="ignore"):
                vals = np.asarray(w.radial(rho), dtype=float)
            vals = vals[np.isfinite(vals)]
            sample_max = float(vals.max(initial=0.0))
            pos = vals[vals > 0]
            sample_min_pos = float(pos.min()) if len(pos) else 0.0
        head = w.head_exponent()
        self.unbounded_head = bool(head is not None and head < 0) or not math.isfinite(sample_max)
        if self.unbounded_head:
            # cap the level grid; the analytic head tail is added separately
            sample_max = max(sample_max, 1.0) * 1e12
        self.total_measure = w.superlevel_measure(0.0, n, R)
        if sample_max <= 0:
            self._sigmas = np.array([0.0, 1.0])
            self._lams = np.array([0.0, 0.0])
            self.value_max = 0.0
            self.value_min = 0.0
            self._critical_levels = []
            return
        if sample_min_pos <= 0 or sample_min_pos >= sample_max:
            sample_min_pos = sample_max * 1e-12
        levels = {0.0}
        levels.update(np.geomspace(sample_min_pos * 0.5, sample_max, 1200).tolist())
        # refine toward the top where lambda drops to zero
        levels.update((sample_max * (1 - 0.5 ** j) for j in range(1, 40)))
        if isinstance(w, CounterexampleWeight):
            for k, a, b in w.shells_up_to(R):
                for r_edge in (a, b):
                    levels.add(float(k) ** w.n * r_edge ** (1 - w.n))
        sig = np.array(sorted(s for s in levels if s >= 0.0))
        lam = np.array([w.superlevel_measure(s, n, R) for s in sig])
        self._sigmas = sig
        self._lams = lam
        self.value_max = sample_max if not self.unbounded_head else math.inf
        self.value_min = sample_min_pos
        try:
            self._critical_levels = list(w.critical_levels(n, R))
        except (NotImplementedError, TypeError):
            self._critical_levels = []

    # -- spec-facing fields
    @property
    def breakpoints(self):
        """Measures t_i (increasing) at which u* passes the grid levels."""
        return self._lams[::-1]

    @property
    def values(self):
        return self._sigmas[::-1]

    def distribution(self, sigma: float) -> float:
        """lambda(sigma) = |{w > sigma}| restricted to the truncation ball."""
        return self.weight.superlevel_measure(sigma, self.n, self.radius)

    def decreasing(self, t: float) -> float:
        """u*(t) = inf{sigma : lambda(sigma) <= t}."""
        if t < 0:
            raise ValueError("t must be >= 0")
        if t >= self.total_measure:
            return 0.0
        lo, hi = 0.0, max(self._sigmas[-1], 1.0)
        # ensure lambda(hi) <= t
        for _ in range(200):
            if self.distribution(hi) <= t:
                break
            hi *= 4.0
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if self.distribution(mid) <= t:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-15 * max(1.0, hi):
                break
        return hi

    def cumulative(self, s: float) -> float:
        """integral_0^s u*(t) dt = s u*(s) + integral of (w - u*(s))_+.

        The second term is the layer-cake tail integral of the
        distribution function above the level u*(s), evaluated through
        the exact superlevel masses of the weight.
        """
        if s <= 0:
            return 0.0
        s_eff = min(s, self.total_measure)
        sigma_s = self.decreasing(s_eff)
        mass = self.weight.partial_mass_above(sigma_s, self.n, self.radius)
        return s_eff * sigma_s + mass

    def lp_norm(self, p: float) -> float:
        """||u*||_p over (0, inf) via p int sigma^{p-1} lambda(sigma) dsigma."""
        if p < 1:
            raise ValueError("p must be >= 1")
        if p == math.inf:
            return self.value_max
        vmax = self._sigmas[-1]
        vmin = max(self.value_min, vmax * 1e-14)
        # constant strip below the smallest positive value
        total = self.total_measure * vmin ** p / p
        levels = [lv for lv in self._critical_levels if vmin < lv < vmax]
        if len(levels) > 64:
            levels = levels[:: len(levels) // 64 + 1]
        edges = sorted({vmin, vmax, *levels})
        for lo, hi in zip(edges[:-1], edges[1:]):
            piece, _ = quad(lambda s: s ** (p - 1.0) * self.distribution(s),
                            lo, hi, limit=200, epsabs=1e-14, epsrel=1e-11)
            total += piece
        if self.unbounded_head:
            head = self.weight.head_exponent()
            if head is None or head >= 0:
                return math.inf
            kappa = self.n / head  # lambda ~ c sigma^{n/head} at the top
            if p - 1.0 + kappa >= -1.0:
                return math.inf
            l_top = self.distribution(vmax)
            total += -l_top * vmax ** p / (p + kappa)
        if not math.isfinite(total):
            return math.inf
        return (p * total) ** (1.0 / p)


def rearrangement(w: Weight, n: int, radius: float = 128.0) -> RearrangementTable:
    """Non-increasing rearrangement of w over the ball of the given radius."""
    if isinstance(w, CounterexampleWeight) and w.n != n:
        raise ValueError("counterexample weight is tied to its dimension")
    return RearrangementTable(w, n, radius)


# --- majorants ---------------------------------------------------------------

@dataclass(frozen=True)
class Majorant:
    """Radial function with w(rho x) <= majorant(rho) w(x) for all x."""

    kind: str
    alpha: float
    beta: float

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.kind == "power":
            return rho ** self.alpha
        return np.maximum(rho ** self.alpha, rho ** self.beta)


def homogeneity_majorant(w: Weight) -> Majorant:
    """Dilation majorant: exact rho^a for powers, max(rho^alpha, rho^beta)
    for piecewise powers."""
    if isinstance(w, PowerWeight):
        return Majorant("power", w.a, w.a)
    if isinstance(w, PiecewiseWeight):
        return Majorant("piecewise-max", w.alpha, w.beta)
    raise ValueError(f"no majorant available for weight kind {w.kind!r}")


# --- moments -----------------------------------------------------------------

def radial_moment(w: Weight, exponent: float, n: int, *,
                  shell_cut: int = 200_000, radius: float = 4096.0):
    """integral_0^inf rho^exponent u0(rho) drho with divergence detection.

    Returns (value, error_bound); value is +inf when the head or tail is
    non-integrable.  Counterexample weights are summed shell-by-shell in
    closed form; power and piecewise weights use closed forms; other
    radial weights fall back to quadrature with a power-law tail fit.
    """
    if isinstance(w, CounterexampleWeight):
        if n != w.n:
            raise ValueError("counterexample weight is tied to its dimension")
        a = -(exponent + 1 - n)  # shell moment behaves like k^{-1-a}
        total = 0.0
        e = exponent + 1 - n
        for k in range(1, shell_cut + 1):
            lo, hi = w.shell(k)
            if abs(e + 1.0) < 1e-14:
                piece = math.log(hi / lo)
            else:
                piece = (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)
            total += float(k) ** n * piece
        tail = w.moment_tail_bound(a, shell_cut + 1)
        if not math.isfinite(tail):
            return math.inf, math.inf
        return total + 0.5 * tail, 0.5 * tail
    if isinstance(w, PowerWeight):
        return math.inf, math.inf  # rho^{exponent+a} never integrable on (0, inf)
    if isinstance(w, PiecewiseWeight):
        e_head = exponent + w.alpha
        e_tail = exponent + w.beta
        if e_head <= -1 or e_tail >= -1:
            return math.inf, math.inf
        return 1.0 / (e_head + 1) - 1.0 / (e_tail + 1), 0.0
    # generic radial weight: quadrature + tail fit
    head = w.head_exponent()
    if head is not None and exponent + head <= -1:
        return math.inf, math.inf
    breaks = sorted(set(w.breakpoints(radius)) | {1.0, radius / 2})

    def fn(r):
        return r ** exponent * float(w.radial(np.array([r]))[0])

    total = _radial_integral_generic(fn, 1e-12, radius, breaks)
    # fit the tail exponent on [radius/2, radius]
    rr = np.geomspace(radius / 2, radius, 33)
    vv = np.asarray(w.radial(rr), float) * rr ** exponent
    if np.all(vv > 0):
        kappa = np.polyfit(np.log(rr), np.log(vv), 1)[0]
        if kappa >= -1.0:
            return math.inf, math.inf
        tail = vv[-1] * radius / (-kappa - 1.0)
        return total + tail, abs(tail)
    return total, 0.0


# --- ball averages and the Campanato-Morrey estimate -------------------------

def _cap_fraction(n: int, s: float, d: float, rho: float) -> float:
    """Fraction of the sphere {|y| = s} lying inside the ball B(x, rho), |x| = d."""
    if s <= 0:
        return 1.0 if d < rho else 0.0
    if d == 0:
        return 1.0 if s < rho else 0.0
    c = (s * s + d * d - rho * rho) / (2.0 * s * d)
    if c <= -1.0:
        return 1.0
    if c >= 1.0:
        return 0.0
    if n == 2:
        return math.acos(c) / math.pi
    if n == 3:
        return 0.5 * (1.0 - c)
    raise ValueError("cap fractions implemented for n in {2, 3}")


def ball_weighted_integral(w: Weight, center_dist: float, rho: float,
                           r_power: float, n: int) -> float:
    """integral over B(x, rho) of w^{r_power}, for radial w and |x| = center_dist."""
    d = float(center_dist)
    lo = max(0.0, d - rho)
    hi = d + rho

    def integrand(s):
        val = float(w.radial(np.array([s]))[0]) ** r_power
        if n == 1:
            # on the line the "sphere" {|y| = s} is the two points +-s
            return val * 2.0 * _line_fraction(s, d, rho)
        return val * _cap_fraction(n, s, d, rho) * omega_surface(n) * s ** (n - 1)

    breaks = [b for b in w.breakpoints(hi) if lo < b < hi]
    if d > 0:
        breaks.extend(p for p in (abs(d - rho), d + rho) if lo < p < hi)
    return _radial_integral_generic(integrand, lo, hi, breaks)


def _line_fraction(s, d, rho):
    if d == 0:
        return 1.0 if s < rho else 0.0
    hits = 0
    for y in (s, -s):
        if abs(y - d) < rho:
            hits += 1
    return hits / 2.0


def campanato_morrey_norm(V, alpha: float, r: float, n: int, *,
                          center_dists=None, radii=None) -> float:
    """Lower estimate of the Campanato-Morrey norm sup rho^alpha
    (rho^{-n} int_{B(x,rho)} |V|^r)^{1/r}.

    The supremum runs over a finite candidate set (center distances on a
    half-integer lattice up to 10, dyadic radii 2^{-8}..2^8), so the
    returned value is a certified lower bound that is monotone under
    candidate refinement.
    """
    if not (0 <= alpha <= n / r):
        raise ValueError("need 0 <= alpha <= n/r")
    if r < 1:
        raise ValueError("r must be >= 1")
    if radii is None:
        radii = [2.0 ** k for k in range(-8, 9)]
    if isinstance(V, TabulatedGridWeight):
        return _campanato_grid(V, alpha, r, n, radii)
    if center_dists is None:
        center_dists = np.arange(0.0, 10.5, 0.5)
    best = 0.0
    for d in center_dists:
        for rho in radii:
            avg = ball_weighted_integral(V, d, rho, r, n) / rho ** n
            best = max(best, rho ** alpha * avg ** (1.0 / r))
    return best


def _campanato_grid(V: TabulatedGridWeight, alpha, r, n, radii):
    centers = V.cell_centers()
    meas = V.cell_measures().ravel()
    vals = V.values.ravel() ** r
    lattice = centers[np.linalg.norm(centers, axis=1) <= 10.0]
    if len(lattice) > 400:
        lattice = lattice[:: max(1, len(lattice) // 400)]
    best = 0.0
    for x in lattice:
        dist = np.linalg.norm(centers - x[None, :], axis=1)
        for rho in radii:
            inside = dist <= rho
            avg = float(np.sum(meas[inside] * vals[inside])) / rho ** n
            best = max(best, rho ** alpha * avg ** (1.0 / r))
    return best


# --- interval translation / doubling ratios ----------------------------------

def interval_translation_check(v0, p: float, mode: str, intervals=None, *,
                               cap: float = 10.0) -> ConditionReport:
    """Translation/doubling stability of v0^{1-p'} over an interval family.

    mode 'vs1' compares against the family shifted down by |A|, 'vs2'
    shifted up by |A|, 'doubling' against the concentric doubled
    intervals.  Reports the maximal ratio and checks it against `cap`.
    """
    if mode not in ("vs1", "vs2", "doubling"):
        raise ValueError(f"unknown mode {mode!r}")
    if p <= 1:
        raise ValueError("need p > 1")
    pprime = p / (p - 1.0)
    if intervals is None:
        intervals = [(float(k), float(k + 1)) for k in range(1, 21)]
    g = _as_radial_fn(v0, 1.0 - pprime)
    worst = 0.0
    worst_interval = None
    ratios = []
    for a, b in intervals:
        length = b - a
        den, _ = quad(g, a, b, limit=200)
        if den <= 0:
            continue
        if mode == "vs1":
            if a - length < 0:
                continue
            num, _ = quad(lambda t: g(t - length), a, b, limit=200)
        elif mode == "vs2":
            num, _ = quad(lambda t: g(t + length), a, b, limit=200)
        else:
            mid = 0.5 * (a + b)
            num, _ = quad(g, max(0.0, mid - length), mid + length, limit=200)
        ratio = num / den
        ratios.append(ratio)
        if ratio > worst:
            worst = ratio
            worst_interval = (a, b)
    verdict = VERDICT_HOLDS if worst <= cap else VERDICT_FAILS
    return ConditionReport(
        condition=f"interval-translation-{mode}",
        verdict=verdict,
        value=worst,
        witness={"interval": worst_interval} if verdict == VERDICT_FAILS else worst_interval,
        equation_tag=mode,
        tolerances={"cap": cap},
        diagnostics={"ratios": ratios[:64], "exponent": 1.0 - pprime},
    )


def _as_radial_fn(v0, power: float):
    if isinstance(v0, Weight):
        return lambda t: float(v0.radial(np.array([abs(t)]))[0]) ** power
    return lambda t: float(v0(abs(t))) ** power


# --- CSV loading --------------------------------------------------------------

def load_weight_csv(path) -> Weight:
    """Load a tabulated weight from CSV.

    Two layouts are accepted: radial files with columns (r, value) and
    strictly increasing r, or grid files with columns (x1..xn, value) on
    a complete regular lattice with n <= 3.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty weight file")
    if _looks_like_header(rows[0]):
        rows = rows[1:]
    data = np.array([[float(c) for c in row] for row in rows])
    ncols = data.shape[1]
    if ncols == 2:
        radii, values = data[:, 0], data[:, 1]
        if np.any(np.diff(radii) <= 0):
            raise ValueError(f"{path}: radii must be strictly increasing")
        return TabulatedRadialWeight(radii, values)
    if ncols in (3, 4):
        n = ncols - 1
        axes = [np.unique(data[:, d]) for d in range(n)]
        shape = tuple(len(a) for a in axes)
        if int(np.prod(shape)) != len(data):
            raise ValueError(f"{path}: grid rows must form a complete lattice")
        values = np.full(shape, np.nan)
        idx = tuple(np.searchsorted(axes[d], data[:, d]) for d in range(n))
        values[idx] = data[:, -1]
        if np.any(np.isnan(values)):
            raise ValueError(f"{path}: grid rows must form a complete lattice")
        return TabulatedGridWeight(axes, values)
    raise ValueError(f"{path}: expected 2 columns (radial) or n+1 columns (grid)")


def _looks_like_header(row):
    try:
        [float(c) for c in row]
        return False
    except ValueError:
        return True
