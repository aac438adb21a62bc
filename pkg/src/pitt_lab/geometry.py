"""Centrally symmetric convex bodies, polar sets, dilates, translated unions.

Polar sets are computed in closed form per catalog variant (ball,
ellipsoid, box, cross-polytope), never by generic convex duality.  The
cross-polytope exists as an internal fourth variant because it is the
polar of the box.
"""

from dataclasses import dataclass
import itertools
import math

import numpy as np

from .numerics import SphereQuadrature, omega_surface

__all__ = [
    "ConvexBody",
    "ball",
    "ellipsoid",
    "box",
    "cross_polytope",
    "polar_set",
    "dilate",
    "TranslatedUnion",
    "body_integral",
]


@dataclass(frozen=True)
class ConvexBody:
    """Centrally symmetric convex body, one of the catalog variants.

    `params` are the per-axis radii/half-widths; the support function
    h(xi) = sup_{x in A} x.xi and the gauge g(x) = inf{t > 0 : x in tA}
    are closed forms for every variant.
    """

    variant: str
    n: int
    params: np.ndarray

    def __post_init__(self):
        if self.variant not in ("ball", "ellipsoid", "box", "cross"):
            raise ValueError(f"unknown body variant {self.variant!r}")
        params = np.asarray(self.params, dtype=float)
        object.__setattr__(self, "params", params)
        if params.shape != (self.n,):
            raise ValueError("need one parameter per axis")
        if np.any(params <= 0) or not np.all(np.isfinite(params)):
            raise ValueError("body parameters must be positive and finite")

    def support(self, xi) -> float:
        """Support function h_A(xi)."""
        xi = np.asarray(xi, dtype=float)
        if self.variant in ("ball", "ellipsoid"):
            return float(np.linalg.norm(self.params * xi))
        if self.variant == "box":
            return float(np.sum(self.params * np.abs(xi)))
        return float(np.max(np.abs(xi) / self.params))

    def gauge(self, x) -> float:
        """Minkowski gauge: g(x) <= 1 iff x in A."""
        x = np.asarray(x, dtype=float)
        if self.variant in ("ball", "ellipsoid"):
            return float(np.linalg.norm(x / self.params))
        if self.variant == "box":
            return float(np.max(np.abs(x) / self.params))
        return float(np.sum(np.abs(x) / self.params))

    def contains(self, x, tol: float = 1e-12) -> bool:
        return self.gauge(x) <= 1.0 + tol

    def volume(self) -> float:
        prod = float(np.prod(self.params))
        if self.variant in ("ball", "ellipsoid"):
            return omega_surface(self.n) / self.n * prod
        if self.variant == "box":
            return 2.0 ** self.n * prod
        return 2.0 ** self.n / math.factorial(self.n) * prod

    def extreme_points(self, samples: int = 64):
        """Points on the boundary (used by sampling-based cross checks)."""
        if self.variant in ("ball", "ellipsoid"):
            rng = np.random.default_rng(7)
            dirs = rng.normal(size=(samples, self.n))
            dirs /= np.linalg.norm(dirs, axis=1)[:, None]
            return dirs * self.params[None, :]
        if self.variant == "box":
            corners = np.array(list(itertools.product(*[(-p, p) for p in self.params])))
            return corners
        verts = []
        for i in range(self.n):
            e = np.zeros(self.n)
            e[i] = self.params[i]
            verts.extend((e.copy(), -e))
        return np.array(verts)


def ball(n: int, radius: float = 1.0) -> ConvexBody:
    return ConvexBody("ball", n, np.full(n, float(radius)))


def ellipsoid(semi_axes) -> ConvexBody:
    semi_axes = np.asarray(semi_axes, dtype=float)
    return ConvexBody("ellipsoid", len(semi_axes), semi_axes)


def box(half_widths) -> ConvexBody:
    half_widths = np.asarray(half_widths, dtype=float)
    return ConvexBody("box", len(half_widths), half_widths)


def cross_polytope(coeff) -> ConvexBody:
    """{x : sum_i |x_i| / c_i <= 1}; polar of the box with half-widths c."""
    coeff = np.asarray(coeff, dtype=float)
    return ConvexBody("cross", len(coeff), coeff)


_POLAR_VARIANT = {"ball": "ball", "ellipsoid": "ellipsoid", "box": "cross", "cross": "box"}


def polar_set(A: ConvexBody) -> ConvexBody:
    """Polar body A* = {xi : |x.xi| <= 1 for all x in A} (closed form)."""
    if A.variant in ("ball", "ellipsoid"):
        return ConvexBody(_POLAR_VARIANT[A.variant], A.n, 1.0 / A.params)
    # box(s)* = {xi : sum s_i |xi_i| <= 1} = cross with c_i = 1/s_i;
    # cross(c)* = box with half-widths 1/c_i ... both reduce to reciprocals
    return ConvexBody(_POLAR_VARIANT[A.variant], A.n, 1.0 / A.params)


def dilate(A: ConvexBody, c: float, cap: float = None) -> ConvexBody:
    """Dilate c*A; rejects c >= cap when a theorem bound is in force."""
    if c <= 0:
        raise ValueError("dilation factor must be positive")
    if cap is not None and c >= cap:
        raise ValueError(f"dilation factor {c} must stay below {cap}")
    return ConvexBody(A.variant, A.n, A.params * c)


@dataclass(frozen=True)
class TranslatedUnion:
    """Disjoint union of translates A + x_j of a symmetric convex body.

    Disjointness is certified at construction: for a symmetric body the
    translates A + x_i and A + x_j are disjoint iff the gauge of
    x_i - x_j exceeds 2, checked with a 1e-9 margin.
    """

    base: ConvexBody
    shifts: np.ndarray

    def __post_init__(self):
        shifts = np.atleast_2d(np.asarray(self.shifts, dtype=float))
        object.__setattr__(self, "shifts", shifts)
        if shifts.shape[1] != self.base.n:
            raise ValueError("shift dimension mismatch")
        for i in range(len(shifts)):
            for j in range(i + 1, len(shifts)):
                if self.base.gauge(shifts[i] - shifts[j]) <= 2.0 * (1.0 + 1e-9):
                    raise ValueError(
                        f"translates {i} and {j} overlap (gauge separation failed)")

    @property
    def n(self):
        return self.base.n

    def volume(self):
        return self.base.volume() * len(self.shifts)


def _unit_ball_quadrature(n: int, radial_panels: int, order: int):
    """Product quadrature on the unit ball: radius x sphere (n <= 3)."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, radial_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    r = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wr = (half[:, None] * w[None, :]).ravel()
    if n == 1:
        pts = np.concatenate([-r, r])[:, None]
        wts = np.concatenate([wr, wr])
        return pts, wts
    sq = SphereQuadrature.circle(4 * order * radial_panels) if n == 2 \
        else SphereQuadrature.sphere(24, 48)
    pts = r[:, None, None] * sq.points[None, :, :]
    wts = (wr[:, None] * sq.weights[None, :]) * (r ** (n - 1))[:, None]
    return pts.reshape(-1, n), wts.ravel()


def _simplex_quadrature(n: int, order: int):
    """Duffy-type tensor rule on the standard simplex {z >= 0, sum z <= 1}."""
    x, w = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    if n == 1:
        return u[:, None], wu
    if n == 2:
        U1, U2 = np.meshgrid(u, u, indexing="ij")
        W = np.outer(wu, wu)
        z1 = U1 * (1 - U2)
        z2 = U1 * U2
        jac = U1
        return np.column_stack([z1.ravel(), z2.ravel()]), (W * jac).ravel()
    U1, U2, U3 = np.meshgrid(u, u, u, indexing="ij")
    W = wu[:, None, None] * wu[None, :, None] * wu[None, None, :]
    z1 = U1 * (1 - U2)
    z2 = U1 * U2 * (1 - U3)
    z3 = U1 * U2 * U3
    jac = U1 ** 2 * U2
    pts = np.column_stack([z1.ravel(), z2.ravel(), z3.ravel()])
    return pts, (W * jac).ravel()


def _body_quadrature(A: ConvexBody, order: int = 12):
    """Quadrature (points, weights) covering A exactly, n <= 3."""
    n = A.n
    if A.variant in ("ball", "ellipsoid"):
        pts, wts = _unit_ball_quadrature(n, radial_panels=8, order=order)
        pts = pts * A.params[None, :]
        wts = wts * float(np.prod(A.params))
        return pts, wts
    if A.variant == "box":
        axes = []
        for s in A.params:
            x, w = np.polynomial.legendre.leggauss(8 * order)
            axes.append((s * x, s * w))
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        pts = np.column_stack([g.ravel() for g in grids])
        wts = np.ones(len(pts))
        for d in range(n):
            shape = [1] * n
            shape[d] = -1
            wts = wts * np.broadcast_to(
                axes[d][1].reshape(shape), [len(a[0]) for a in axes]).ravel()
        return pts, wts
    # cross-polytope: 2^n signed copies of the standard simplex, scaled
    zpts, zwts = _simplex_quadrature(n, order=4 * order)
    pts_all = []
    wts_all = []
    jac = float(np.prod(A.params))
    for signs in itertools.product((-1.0, 1.0), repeat=n):
        signed = zpts * np.array(signs)[None, :] * A.params[None, :]
        pts_all.append(signed)
        wts_all.append(zwts * jac)
    return np.vstack(pts_all), np.concatenate(wts_all)


def body_integral(w, region, n: int, *, order: int = 12) -> float:
    """Integral of a weight over a convex body or a translated union.

    A radial weight over a centered ball reduces to the weight's exact
    1-D ball integral; everything else goes through product quadrature
    over the body (n <= 3).
    """
    if isinstance(region, TranslatedUnion):
        total = 0.0
        base_pts, base_wts = _body_quadrature(region.base, order=order)
        for shift in region.shifts:
            total += float(np.sum(base_wts * _eval_weight(w, base_pts + shift[None, :], n)))
        return total
    if not isinstance(region, ConvexBody):
        raise TypeError("region must be a ConvexBody or TranslatedUnion")
    if region.n != n:
        raise ValueError("dimension mismatch")
    if region.variant == "ball" and getattr(w, "is_radial", False):
        return w.ball_integral(float(region.params[0]), n)
    if n > 3:
        raise ValueError("generic body quadrature is limited to n <= 3")
    pts, wts = _body_quadrature(region, order=order)
    return float(np.sum(wts * _eval_weight(w, pts, n)))


def _eval_weight(w, pts, n):
    if w is None:
        return np.ones(len(pts))
    if callable(w) and not hasattr(w, "radial"):
        return np.asarray(w(pts), dtype=float)
    return np.asarray(w(pts), dtype=float)
