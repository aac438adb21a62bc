"""Radial grids, adaptive 1-D quadrature, sphere quadrature, weighted L^p norms.

All n-dimensional radial integrals reduce to weighted 1-D integrals
against r^{n-1} dr; the sphere rules (n = 2, 3) exist for the few places
where genuinely angular integrands appear.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

__all__ = [
    "omega_surface",
    "RadialGrid",
    "QuadratureError",
    "integrate_radial",
    "weighted_lp_norm",
    "SphereQuadrature",
    "sphere_integrate",
    "gauss_legendre_panels",
]

#: guard above which a refining integral is declared divergent
OVERFLOW_GUARD = 1e200


def omega_surface(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1}: 2 pi^{n/2} / Gamma(n/2)."""
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)


def gauss_legendre_panels(a: float, b: float, panels: int, order: int = 8):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _clenshaw_curtis(order: int):
    """Clenshaw-Curtis nodes/weights on [-1, 1] (order+1 points)."""
    if order < 2:
        raise ValueError("Clenshaw-Curtis order must be >= 2")
    k = np.arange(order + 1)
    x = np.cos(np.pi * k / order)
    w = np.zeros(order + 1)
    for i in k:
        s = 0.0
        for j in range(1, order // 2 + 1):
            factor = 0.5 if 2 * j == order else 1.0
            s += factor * np.cos(2 * j * np.pi * i / order) / (4 * j * j - 1)
        w[i] = (1.0 - 2.0 * s) * (2.0 / order)
    w[0] *= 0.5
    w[-1] *= 0.5
    return x[::-1], w[::-1]


@dataclass(frozen=True)
class RadialGrid:
    """Panel decomposition of [0, R]: `nodes` are the increasing panel edges."""

    nodes: np.ndarray
    R: float
    scheme: str = "gauss"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("grid needs at least two edge nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValueError("truncation radius must be finite and positive")
        if self.scheme not in ("gauss", "clenshaw"):
            raise ValueError(f"unknown scheme {self.scheme!r}")

    @classmethod
    def uniform(cls, R: float, panels: int = 32, scheme: str = "gauss"):
        return cls(np.linspace(0.0, R, panels + 1), R, scheme)

    @classmethod
    def from_breakpoints(cls, points, R: float, scheme: str = "gauss"):
        edges = np.unique(np.clip(np.asarray(list(points) + [0.0, R], float), 0.0, R))
        return cls(edges, R, scheme)

    def quadrature(self, order: int = 8):
        """Composite quadrature nodes/weights over all panels."""
        if self.scheme == "gauss":
            x, w = np.polynomial.legendre.leggauss(order)
        else:
            x, w = _clenshaw_curtis(order)
        mid = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        half = 0.5 * np.diff(self.nodes)
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        weights = (half[:, None] * w[None, :]).ravel()
        return nodes, weights


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge.

    Carries the best partial value and its error estimate so callers can
    still report something meaningful.
    """

    def __init__(self, message, partial_value, error_estimate):
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate


def _panel_edges(grid: RadialGrid, oscillation_scale, breakpoints):
    edges = set(np.asarray(grid.nodes, float).tolist())
    if oscillation_scale is not None and oscillation_scale > 0:
        period = math.pi / oscillation_scale
        k = 1
        while k * period < grid.R and k <= 2_000_000:
            edges.add(k * period)
            k += 1
    if breakpoints is not None:
        for b in breakpoints:
            if 0.0 < b < grid.R:
                edges.add(float(b))
    return np.array(sorted(edges))


def integrate_radial(f, grid: RadialGrid, oscillation_scale=None, *,
                     breakpoints=None, rtol=1e-10, atol=1e-12, max_splits=3):
    """Integrate f over [0, R] with panel-wise adaptive quadrature.

    When ``oscillation_scale`` is given, panel boundaries are aligned with
    multiples of pi / oscillation_scale so each panel is sign-coherent;
    explicit ``breakpoints`` (e.g. Bessel zeros scaled by the frequency)
    are honored the same way.  Raises :class:`QuadratureError`, carrying
    the partial value and error estimate, if the requested tolerance is
    unreachable after ``max_splits`` rounds of panel splitting.
    """
    edges = _panel_edges(grid, oscillation_scale, breakpoints)
    total = err = 0.0
    for attempt in range(max_splits + 1):
        total = 0.0
        total_abs = 0.0
        err = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            out = quad(f, lo, hi, epsabs=atol, epsrel=rtol, limit=200, full_output=1)
            val, abserr = out[0], out[1]
            total += val
            total_abs += abs(val)
            err += abserr
        if err <= atol * len(edges) + rtol * total_abs * 4.0:
            return total
        if attempt < max_splits:
            mids = 0.5 * (edges[:-1] + edges[1:])
            edges = np.sort(np.concatenate([edges, mids]))
    raise QuadratureError(
        f"radial quadrature did not reach tolerance (estimate {err:.3e})",
        total, err)


def weighted_lp_norm(profile, weight, p: float, n: int, *, rtol=1e-11) -> float:
    """Weighted norm ||v^{1/p} f||_p for radial data.

    Evaluates (omega_{n-1} int |f0|^p v0 r^{n-1} dr)^{1/p}; at p = inf the
    weight drops out and the essential sup of |f0| over a dense node set
    is returned.  A divergent integral is reported as +inf, not an error.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    radius = profile.truncation_radius(p=p, n=n, weight=weight)
    if p == math.inf:
        r = np.linspace(0.0, radius if math.isfinite(radius) else 64.0, 8193)
        return float(np.max(np.abs(profile(r))))
    if not math.isfinite(radius):
        return math.inf

    v0 = _radial_weight_fn(weight)
    head = _weight_head_exponent(weight)
    if head is not None and head + (n - 1) <= -1 and profile(0.0) != 0.0:
        return math.inf

    def integrand(r):
        if r == 0.0:
            r = 1e-300
        return abs(profile(r)) ** p * v0(r) * r ** (n - 1)

    grid = RadialGrid.from_breakpoints(_weight_breakpoints(weight, radius), radius)
    try:
        val = integrate_radial(integrand, grid, rtol=rtol, atol=1e-14)
    except QuadratureError as exc:
        val = exc.partial_value
        if not math.isfinite(val) or abs(val) > OVERFLOW_GUARD:
            return math.inf
        raise
    if not math.isfinite(val) or abs(val) > OVERFLOW_GUARD:
        return math.inf
    return float((omega_surface(n) * val) ** (1.0 / p))


def _radial_weight_fn(weight):
    if weight is None:
        return lambda r: 1.0
    radial = getattr(weight, "radial", None)
    if radial is not None:
        return radial
    return weight


def _weight_breakpoints(weight, radius):
    fn = getattr(weight, "breakpoints", None)
    if fn is None:
        return ()
    return [b for b in fn(radius) if 0.0 < b < radius]


def _weight_head_exponent(weight):
    if weight is None:
        return None
    fn = getattr(weight, "head_exponent", None)
    return fn() if callable(fn) else None


@dataclass(frozen=True)
class SphereQuadrature:
    """Quadrature on S^{n-1}, n in {2, 3}: unit points and positive weights."""

    n: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.n not in (2, 3):
            raise ValueError("sphere quadrature implemented for n in {2, 3}")
        pts = np.asarray(self.points, float)
        wts = np.asarray(self.weights, float)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        norms = np.linalg.norm(pts, axis=1)
        if np.max(np.abs(norms - 1.0)) > 1e-14:
            raise ValueError("sphere points must have unit norm")
        if abs(wts.sum() - omega_surface(self.n)) > 1e-12:
            raise ValueError("weights must sum to the sphere surface measure")

    @classmethod
    def circle(cls, m: int = 256):
        """Trapezoid rule on S^1 (spectrally accurate for periodic data)."""
        theta = 2.0 * np.pi * np.arange(m) / m
        pts = np.column_stack([np.cos(theta), np.sin(theta)])
        wts = np.full(m, 2.0 * np.pi / m)
        return cls(2, pts, wts)

    @classmethod
    def sphere(cls, n_polar: int = 64, n_azimuth: int = 128):
        """Gauss-Legendre in cos(theta) times trapezoid in azimuth on S^2."""
        mu, wmu = np.polynomial.legendre.leggauss(n_polar)
        phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
        st = np.sqrt(1.0 - mu ** 2)
        x = st[:, None] * np.cos(phi)[None, :]
        y = st[:, None] * np.sin(phi)[None, :]
        z = np.broadcast_to(mu[:, None], x.shape)
        pts = np.column_stack([x.ravel(), y.ravel(), z.ravel()])
        wts = np.repeat(wmu * (2.0 * np.pi / n_azimuth), n_azimuth)
        # renormalize roundoff so the constant integrates exactly
        wts = wts * (omega_surface(3) / wts.sum())
        pts = pts / np.linalg.norm(pts, axis=1)[:, None]
        return cls(3, pts, wts)

    @classmethod
    def default(cls, n: int):
        if n == 2:
            return cls.circle()
        return cls.sphere()


def sphere_integrate(g, quad_rule: SphereQuadrature):
    """Integral of g over S^{n-1}; exact for constants by construction."""
    try:
        vals = np.asarray(g(quad_rule.points))
        if vals.shape != (len(quad_rule.points),):
            raise TypeError
    except TypeError:
        vals = np.array([g(p) for p in quad_rule.points])
    return np.sum(quad_rule.weights * vals)
