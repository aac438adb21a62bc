"""Radial Fourier transforms, sphere restriction/extension, spherical means.

Convention: fhat(xi) = int e^{i x.xi} f(x) dx, so the Gaussian e^{-|x|^2/2}
transforms to (2 pi)^{n/2} e^{-|xi|^2/2} and Plancherel reads
||fhat||_2 = (2 pi)^{n/2} ||f||_2.  For radial f the transform reduces to
a 1-D integral against the kernel omega_{n-1} j_{n/2-1}(r rho) r^{n-1}.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import comb

from . import bessel
from .numerics import (
    QuadratureError,
    RadialGrid,
    SphereQuadrature,
    integrate_radial,
    omega_surface,
    weighted_lp_norm,
)

__all__ = [
    "Decay",
    "RadialProfile",
    "TestFunctionFamily",
    "GridFunction",
    "radial_fourier",
    "fourier_on_grid",
    "transform_l2_norm",
    "restriction_values",
    "extension_operator",
    "spherical_mean",
    "v_lt",
    "v_lt_coefficients",
    "modulus_omega",
    "classical_modulus_1d",
]


@dataclass(frozen=True)
class Decay:
    """Decay class of a radial profile.

    kind 'compact' with param R (identically zero beyond R), 'gaussian'
    with param sigma (|f| <= C e^{-r^2/(2 sigma^2)} up to translation
    `pad`), or 'polynomial' with param m (|f| <= C (1+r)^{-m}).
    """

    kind: str
    param: float
    pad: float = 0.0

    def __post_init__(self):
        if self.kind not in ("compact", "gaussian", "polynomial"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.param <= 0:
            raise ValueError("decay parameter must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """One-variable profile r -> f0(r) standing for f(x) = f0(|x|) on R^n."""

    fn: callable
    decay: Decay
    smoothness: str = "smooth"
    kinks: tuple = ()
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, r):
        return self.fn(np.asarray(r, dtype=float))

    def truncation_radius(self, p: float = 1.0, n: int = 1, weight=None,
                          tol: float = 1e-16) -> float:
        """Radius beyond which |f0|^p v0 r^{n-1} contributes below `tol`."""
        d = self.decay
        if d.kind == "compact":
            return d.param + d.pad
        if d.kind == "gaussian":
            if p == math.inf:
                return d.pad + d.param * math.sqrt(2.0 * math.log(1.0 / tol))
            return d.pad + d.param * math.sqrt(2.0 * math.log(1.0 / tol) / p) + 1.0
        # polynomial tail: integrand ~ r^{-mp + wt + n - 1}
        wt = 0.0
        if weight is not None:
            fn = getattr(weight, "tail_exponent", None)
            wt = fn() if callable(fn) else 0.0
            if wt is None:
                wt = 0.0
        if p == math.inf:
            return d.pad + tol ** (-1.0 / (d.param * 1.0)) if d.param > 0 else math.inf
        exponent = -d.param * p + wt + n - 1
        if exponent >= -1:
            return math.inf
        radius = tol ** (1.0 / (exponent + 1))
        return d.pad + min(max(radius, 16.0), 1e8)

    def dilate(self, lam: float) -> "RadialProfile":
        """Profile of f(lam x): r -> f0(lam r)."""
        if lam <= 0:
            raise ValueError("dilation factor must be positive")
        d = self.decay
        meta = dict(self.meta)
        if "sigma_min" in meta:
            meta["sigma_min"] = meta["sigma_min"] / lam
        return RadialProfile(
            lambda r, _l=lam: self.fn(_l * np.asarray(r, float)),
            Decay(d.kind, d.param if d.kind == "polynomial" else d.param / lam,
                  d.pad / lam),
            self.smoothness,
            tuple(k / lam for k in self.kinks),
            meta,
        )

    def scale(self, c: float) -> "RadialProfile":
        return RadialProfile(lambda r, _c=c: _c * self.fn(np.asarray(r, float)),
                             self.decay, self.smoothness, self.kinks, dict(self.meta))

    # --- catalog -----------------------------------------------------------
    @classmethod
    def gaussian(cls, sigma: float = 1.0):
        s2 = 2.0 * sigma * sigma
        return cls(lambda r: np.exp(-np.asarray(r, float) ** 2 / s2),
                   Decay("gaussian", sigma), "smooth", (), {"sigma_min": sigma})

    @classmethod
    def gaussian_mixture(cls, coeffs, sigmas):
        coeffs = np.asarray(coeffs, float)
        sigmas = np.asarray(sigmas, float)
        if np.any(sigmas <= 0):
            raise ValueError("mixture sigmas must be positive")

        def fn(r):
            r = np.asarray(r, float)
            return sum(c * np.exp(-r ** 2 / (2 * s * s)) for c, s in zip(coeffs, sigmas))

        return cls(fn, Decay("gaussian", float(sigmas.max())), "smooth", (),
                   {"sigma_min": float(sigmas.min())})

    @classmethod
    def ball_indicator(cls, radius: float = 1.0):
        return cls(lambda r: (np.asarray(r, float) <= radius).astype(float),
                   Decay("compact", radius), "jump", (radius,))

    @classmethod
    def hat(cls, width: float = 1.0):
        return cls(lambda r: np.maximum(0.0, 1.0 - np.asarray(r, float) / width),
                   Decay("compact", width), "lipschitz", (width,))

    @classmethod
    def bump(cls, center: float = 0.0, width: float = 1.0):
        """Smooth compactly supported bump on (center - width, center + width)."""

        def fn(r):
            u = (np.asarray(r, float) - center) / width
            out = np.zeros_like(u)
            inside = np.abs(u) < 1.0
            ui = u[inside]
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
            return out

        return cls(fn, Decay("compact", center + width), "smooth", ())

    @classmethod
    def from_callable(cls, fn, decay: Decay, smoothness: str = "smooth", kinks=()):
        return cls(lambda r, _f=fn: np.asarray(_f(np.asarray(r, float)), float),
                   decay, smoothness, tuple(kinks))


@dataclass(frozen=True)
class TestFunctionFamily:
    """Parametric family driving ratio searches: dilations of a base profile."""

    base: RadialProfile
    dilations: tuple = (1.0,)
    bump_centers: tuple = ()

    def __post_init__(self):
        if any(l <= 0 for l in self.dilations):
            raise ValueError("dilations must be positive")

    def members(self):
        out = [(f"dilation-{lam:g}", self.base.dilate(lam)) for lam in self.dilations]
        out += [(f"bump-{c:g}", RadialProfile.bump(center=c, width=0.5))
                for c in self.bump_centers]
        return out


@dataclass(frozen=True)
class GridFunction:
    """Non-radial test function on R^n given by a callable and a support box."""

    fn: callable
    box: tuple  # ((lo_1, hi_1), ..., (lo_n, hi_n))

    @property
    def n(self):
        return len(self.box)

    def quadrature(self, order_per_axis: int = 96):
        axes = []
        for lo, hi in self.box:
            x, w = np.polynomial.legendre.leggauss(order_per_axis)
            axes.append((0.5 * (lo + hi) + 0.5 * (hi - lo) * x, 0.5 * (hi - lo) * w))
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wts = np.ones(pts.shape[0])
        for axis in range(self.n):
            w_axis = axes[axis][1]
            shape = [1] * self.n
            shape[axis] = -1
            wts = wts * np.broadcast_to(
                w_axis.reshape(shape), [len(a[0]) for a in axes]).ravel()
        return pts, wts


def _kernel_breakpoints(alpha: float, R: float, rho: float, max_exact: int = 40):
    """Splitting radii for the oscillatory kernel j_alpha(r rho) on [0, R]."""
    if rho <= 0:
        return ()
    total = int(R * rho / math.pi) + 1
    count = min(total, max_exact)
    if count < 1:
        return ()
    qs = list(bessel.zeros(alpha, count))
    while qs[-1] < R * rho and len(qs) < total + 2:
        qs.append(qs[-1] + math.pi)
    return [q / rho for q in qs if q / rho < R]


def radial_fourier(profile: RadialProfile, n: int, rho, *, rtol=1e-10):
    """fhat(rho) = omega_{n-1} int_0^inf f0(r) j_{n/2-1}(r rho) r^{n-1} dr."""
    order = bessel.order_for_dimension(n)
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0):
        raise ValueError("rho must be >= 0")
    R = profile.truncation_radius(p=1.0, n=n)
    if not math.isfinite(R):
        raise ValueError("profile is not integrable against r^{n-1}")
    om = omega_surface(n)
    out = np.empty_like(rho_arr)
    for i, p_rho in enumerate(rho_arr):
        def integrand(r, _rho=p_rho):
            return profile(r) * bessel.normalized_j(order, r * _rho) * r ** (n - 1)

        brk = list(_kernel_breakpoints(order.alpha, R, p_rho)) + list(profile.kinks)
        grid = RadialGrid.from_breakpoints(brk, R)
        out[i] = om * integrate_radial(integrand, grid, rtol=rtol, atol=1e-14)
    return float(out[0]) if np.isscalar(rho) or np.asarray(rho).ndim == 0 else out


def fourier_on_grid(profile: RadialProfile, n: int, rho_nodes, *,
                    nodes_per_period: int = 10, min_panels: int = 64,
                    chunk: int = 512):
    """Vectorized fhat on many rho nodes through one shared r-quadrature.

    Sized so the fastest oscillation present is resolved; trig fast paths
    cover n in {1, 3} where the kernel degenerates to cos/sinc.
    """
    rho_nodes = np.asarray(rho_nodes, dtype=float)
    R = profile.truncation_radius(p=1.0, n=n)
    rho_max = float(rho_nodes.max(initial=0.0))
    panels = max(min_panels, int(R * rho_max / math.pi * nodes_per_period / 8) + 1)
    edges = np.unique(np.concatenate([
        np.linspace(0.0, R, panels + 1), np.asarray(profile.kinks, float)]))
    edges = edges[(edges >= 0) & (edges <= R)]
    grid = RadialGrid(edges, R)
    r, w = grid.quadrature(order=8)
    base = profile(r) * r ** (n - 1) * w
    om = omega_surface(n)
    alpha = n / 2 - 1

    out = np.empty_like(rho_nodes)
    for start in range(0, len(rho_nodes), chunk):
        sl = slice(start, start + chunk)
        arg = np.outer(rho_nodes[sl], r)
        if n == 1:
            kern = np.cos(arg)
        elif n == 3:
            kern = np.ones_like(arg)
            nz = arg != 0
            kern[nz] = np.sin(arg[nz]) / arg[nz]
        else:
            kern = bessel.normalized_j(alpha, arg.ravel()).reshape(arg.shape)
        out[sl] = om * kern.dot(base)
    return out


def transform_l2_norm(profile: RadialProfile, n: int, *, rho_max=None,
                      nodes_per_period: int = 10) -> float:
    """||fhat||_2 computed on the transform side (fast-decaying profiles)."""
    if rho_max is None:
        if profile.decay.kind != "gaussian":
            raise ValueError("rho_max required for non-gaussian decay")
        sigma_min = profile.meta.get("sigma_min", profile.decay.param)
        rho_max = 10.0 / sigma_min
    panels = max(64, int(rho_max * 4))
    grid = RadialGrid.uniform(rho_max, panels)
    rho, w = grid.quadrature(order=8)
    vals = fourier_on_grid(profile, n, rho, nodes_per_period=nodes_per_period)
    om = omega_surface(n)
    return float(math.sqrt(om * np.sum(w * rho ** (n - 1) * vals ** 2)))


def restriction_values(f, n: int, quad_rule: SphereQuadrature = None):
    """Values of fhat on S^{n-1} (the restriction operator applied to f).

    For a radial profile all values coincide with the transform at rho = 1;
    for a :class:`GridFunction` the transform is evaluated by direct
    quadrature over the support box (n <= 3) and is complex in general.
    """
    if quad_rule is None:
        quad_rule = SphereQuadrature.default(n)
    if isinstance(f, RadialProfile):
        return np.full(len(quad_rule.points), radial_fourier(f, n, 1.0))
    if isinstance(f, GridFunction):
        if f.n != n:
            raise ValueError("dimension mismatch")
        pts, wts = f.quadrature()
        fw = f.fn(pts) * wts
        phases = np.exp(1j * pts.dot(quad_rule.points.T))
        return phases.T.dot(fw)
    raise TypeError("f must be a RadialProfile or GridFunction")


def extension_operator(g, U, q: float, x, quad_rule: SphereQuadrature = None):
    """Adjoint of weighted restriction: int g(w) e^{i w.x} U^{1/q}(w) dsigma(w).

    With g = U^{-1/q} this collapses to the closed kernel
    omega_{n-1} j_{n/2-1}(|x|).
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if quad_rule is None:
        quad_rule = SphereQuadrature.default(n)
    pts = quad_rule.points
    gv = np.asarray(g(pts)) if callable(g) else np.full(len(pts), float(g))
    if U is None:
        uv = np.ones(len(pts))
    else:
        uv = np.asarray(U(pts)) if callable(U) else np.full(len(pts), float(U))
    if np.any(uv < 0):
        raise ValueError("sphere weight must be nonnegative")
    integrand = gv * uv ** (1.0 / q)
    if not np.all(np.isfinite(integrand)):
        raise ValueError(
            "U vanishes where g is singular: q'-integrability violated")
    phases = np.exp(1j * pts.dot(x))
    return complex(np.sum(quad_rule.weights * integrand * phases))


def spherical_mean(profile: RadialProfile, n: int, t: float, r):
    """Average V_t f over the sphere of radius t, for radial f (V_t 1 = 1)."""
    if t <= 0:
        raise ValueError("t must be positive")
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.empty_like(r_arr)
    if n == 1:
        out = 0.5 * (profile(np.abs(r_arr - t)) + profile(r_arr + t))
    else:
        # (omega_{n-2}/omega_{n-1}) int_0^pi f0(sqrt(r^2+t^2+2rt cos a)) sin^{n-2}a da
        ratio = omega_surface(n - 1) / omega_surface(n) if n > 2 else 1.0 / math.pi
        for i, rv in enumerate(r_arr):
            def integrand(a, _r=rv):
                s = math.sqrt(max(_r * _r + t * t + 2 * _r * t * math.cos(a), 0.0))
                return profile(s) * math.sin(a) ** (n - 2)

            points = _mean_breakpoints(profile, rv, t)
            val, _ = quad(integrand, 0.0, math.pi, limit=200,
                          points=points or None, epsabs=1e-13, epsrel=1e-11)
            out[i] = ratio * val
    return float(out[0]) if np.asarray(r).ndim == 0 else out


def _mean_breakpoints(profile, r, t):
    """Angles where the cross-section radius crosses a profile kink."""
    pts = []
    for s in profile.kinks:
        if r == 0 or t == 0:
            continue
        c = (s * s - r * r - t * t) / (2 * r * t)
        if -1.0 < c < 1.0:
            pts.append(math.acos(c))
    return sorted(pts)


def v_lt_coefficients(l: int):
    """Coefficients c_j of V_{l,t} = sum_j c_j V_{jt}; they sum to 1."""
    if l < 1:
        raise ValueError("l must be >= 1")
    c0 = -2.0 / comb(2 * l, l, exact=True)
    return np.array([c0 * (-1) ** j * comb(2 * l, l - j, exact=True)
                     for j in range(1, l + 1)])


def v_lt(profile: RadialProfile, n: int, l: int, t: float) -> RadialProfile:
    """Binomial combination V_{l,t} f of spherical means (V_{l,t} 1 = 1)."""
    coeffs = v_lt_coefficients(l)

    def fn(r):
        r = np.asarray(r, float)
        return sum(c * spherical_mean(profile, n, j * t, r)
                   for j, c in zip(range(1, l + 1), coeffs))

    d = profile.decay
    decay = Decay(d.kind, d.param, d.pad + l * t)
    kinks = sorted({abs(s + sgn * j * t)
                    for s in profile.kinks
                    for j in range(1, l + 1) for sgn in (-1, 1)})
    return RadialProfile(fn, decay, profile.smoothness, tuple(kinks), dict(profile.meta))


def v_lt_multiplier(n: int, l: int, t: float, rho):
    """Fourier multiplier of V_{l,t}: sum_j c_j j_{n/2-1}(j t rho)."""
    order = bessel.order_for_dimension(n)
    coeffs = v_lt_coefficients(l)
    rho = np.asarray(rho, dtype=float)
    return sum(c * bessel.normalized_j(order, j * t * rho)
               for j, c in zip(range(1, l + 1), coeffs))


def modulus_omega(profile: RadialProfile, n: int, l: int, t: float, p: float,
                  *, method: str = "physical", resolution: int = 1) -> float:
    """Smoothness modulus Omega_l(f, t)_p = ||f - V_{l,t} f||_p.

    The physical-space route is the primary one; at p = 2 an independent
    Fourier-side route is available for cross-checking.  For slowly
    decaying transforms (compact profiles) the Fourier route subtracts
    the Plancherel mass so only a fast-converging correction integral is
    quadratured; its trailing panels are extrapolated by a power fit.
    """
    if t == 0:
        return 0.0
    if method == "physical":
        smeared = v_lt(profile, n, l, t)

        def fn(r):
            return profile(r) - smeared(r)

        kinks = tuple(sorted(set(profile.kinks) | set(smeared.kinks)))
        diff = RadialProfile(fn, smeared.decay, "piecewise", kinks)
        return weighted_lp_norm(diff, None, p, n, rtol=1e-9)
    if method != "fourier":
        raise ValueError(f"unknown method {method!r}")
    if p != 2:
        raise ValueError("the Fourier-side route requires p = 2")
    return _modulus_fourier_side(profile, n, l, t, resolution)


def _modulus_fourier_side(profile, n, l, t, resolution=1):
    # Omega^2 = ||f||^2 - (2pi)^{-n} omega int (2m - m^2) |fhat|^2 rho^{n-1} drho
    norm_f = weighted_lp_norm(profile, None, 2.0, n, rtol=1e-12)
    om = omega_surface(n)
    pref = om / (2.0 * math.pi) ** n

    def weight_fn(rho):
        m = v_lt_multiplier(n, l, t, rho)
        return (2.0 - m) * m

    if profile.decay.kind == "gaussian":
        sigma_min = profile.meta.get("sigma_min", profile.decay.param)
        P = 12.0 / sigma_min
        grid = RadialGrid.uniform(P, max(64, int(P * 4)) * resolution)
        rho, w = grid.quadrature(order=8)
        fh = fourier_on_grid(profile, n, rho)
        corr = float(np.sum(w * weight_fn(rho) * fh ** 2 * rho ** (n - 1)))
    else:
        # panel sums between pi-multiples, power-fit tail on the last quarter
        P = 3000.0 * resolution
        panels = int(P / math.pi)
        edges = np.arange(panels + 1) * math.pi
        edges[0] = 0.0
        grid = RadialGrid(edges, edges[-1])
        rho, w = grid.quadrature(order=10)
        fh = fourier_on_grid(profile, n, rho)
        contrib = w * weight_fn(rho) * fh ** 2 * rho ** (n - 1)
        per_panel = contrib.reshape(panels, -1).sum(axis=1)
        corr = float(per_panel.sum())
        mids = 0.5 * (edges[:-1] + edges[1:])
        k0 = 3 * panels // 4
        tail_x = mids[k0:]
        tail_y = np.abs(per_panel[k0:])
        mask = tail_y > 0
        if mask.sum() >= 8:
            s, a = np.polyfit(np.log(tail_x[mask]), np.log(tail_y[mask]), 1)
            if s < -1.0:
                # panel sums ~ A rho^s with spacing pi -> tail ~ A P^{s+1}/(pi |s+1|)
                amp = math.exp(a)
                corr += amp * edges[-1] ** (s + 1) / (math.pi * abs(s + 1))
    val = norm_f ** 2 - pref * corr
    return math.sqrt(max(val, 0.0))


def classical_modulus_1d(f, l: int, delta: float, p: float, *,
                         window=(-4.0, 4.0), h_count: int = 64,
                         grid_count: int = 8192) -> float:
    """Classical modulus sup_{|h|<=delta} ||Delta_h^l f||_p on a window.

    The function is treated as defined on `window`; for step h the
    difference Delta_h^l f(x) is formed for x with all l+1 sample points
    inside the window.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if delta == 0:
        return 0.0
    a, b = window
    coeffs = np.array([(-1) ** (l - j) * comb(l, j, exact=True) for j in range(l + 1)])
    best = 0.0
    for h in np.linspace(delta / h_count, delta, h_count):
        x = np.linspace(a, b - l * h, grid_count)
        vals = sum(c * f(x + j * h) for j, c in enumerate(coeffs))
        if p == math.inf:
            cur = float(np.max(np.abs(vals)))
        else:
            dx = x[1] - x[0]
            cur = float((np.sum(np.abs(vals) ** p) * dx) ** (1.0 / p))
        best = max(best, cur)
    return best
