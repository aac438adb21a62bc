"""Best-constant estimation for the weighted transform inequalities.

Estimates are certified lower bounds: every reported value is the ratio
of an actual evaluated function (or the Rayleigh quotient of an explicit
discretized operator), and the search never claims sharpness.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import bessel
from .conditions import ExponentConfig
from .numerics import QuadratureError, RadialGrid, omega_surface, weighted_lp_norm
from .transforms import Decay, RadialProfile, TestFunctionFamily, radial_fourier
from .weights import Weight

__all__ = [
    "RatioObjective",
    "RatioEstimate",
    "build_transform_matrix",
    "best_constant_l2",
    "pitt_ratio",
    "restriction_ratio",
    "uncertainty_ratio",
    "ratio_ascent",
    "dilation_sweep",
]


@dataclass(frozen=True)
class RatioObjective:
    """Which inequality's best constant is being estimated.

    inequality is one of 'pitt', 'restriction', 'uncertainty'; u is the
    transform-side weight (or the sphere weight for restriction), v the
    space-side weight.  The ratio is homogeneous of degree zero in f.
    """

    inequality: str
    u: Weight
    v: Weight
    cfg: ExponentConfig
    grid_radius: float = 16.0
    grid_nodes: int = 256

    def __post_init__(self):
        if self.inequality not in ("pitt", "restriction", "uncertainty"):
            raise ValueError(f"unknown inequality {self.inequality!r}")

    def ratio(self, profile: RadialProfile, rtol: float = 1e-9) -> float:
        if self.inequality == "pitt":
            return pitt_ratio(profile, self.u, self.v, self.cfg, rtol=rtol)
        if self.inequality == "restriction":
            return restriction_ratio(profile, self.u, self.v, self.cfg)
        return uncertainty_ratio(profile, self.u, self.v, self.cfg)


@dataclass
class RatioEstimate:
    """Lower-bound estimate of a best constant, with its search trace."""

    value: float
    iterations: int
    converged: bool
    unbounded: bool = False
    witness_r: np.ndarray = None
    witness_f: np.ndarray = None
    trace: list = field(default_factory=list)

    def witness_csv(self, path):
        """Export the best profile as CSV columns (r, f0(r))."""
        data = np.column_stack([self.witness_r, self.witness_f])
        header = "r,f0"
        np.savetxt(path, data, delimiter=",", header=header, comments="")


# --- norms on the transform side ------------------------------------------------

def transform_weighted_norm(profile: RadialProfile, weight, q: float, n: int,
                            *, rho_max=None, rtol=1e-9) -> float:
    """||u^{1/q} fhat||_q via adaptive quadrature of the pointwise transform.

    For compact profiles the default transform-side truncation makes the
    value a slight underestimate, which is the safe direction for
    lower-bound reporting.
    """
    from scipy.integrate import quad

    if rho_max is None:
        if profile.decay.kind == "gaussian":
            sigma_min = profile.meta.get("sigma_min", profile.decay.param)
            rho_max = 12.0 / sigma_min
        elif profile.decay.kind == "compact":
            rho_max = 128.0
        else:
            raise ValueError("rho_max required for polynomial-decay profiles")
    u0 = (lambda r: 1.0) if weight is None else \
        (lambda r: float(weight.radial(np.array([r]))[0]))

    inner_rtol = min(1e-11, rtol * 1e-2)

    def integrand(rho):
        if rho == 0.0:
            rho = 1e-300
        fh = radial_fourier(profile, n, rho, rtol=inner_rtol)
        return abs(fh) ** q * u0(rho) * rho ** (n - 1)

    breaks = [b for b in (weight.breakpoints(rho_max) if weight is not None else ())
              if 0 < b < rho_max]
    pieces = sorted({0.0, rho_max, *breaks})
    total = 0.0
    for lo, hi in zip(pieces[:-1], pieces[1:]):
        val, _ = quad(integrand, lo, hi, limit=200, epsabs=1e-14, epsrel=rtol)
        total += val
    return (omega_surface(n) * total) ** (1.0 / q)


def pitt_ratio(profile: RadialProfile, u: Weight, v: Weight,
               cfg: ExponentConfig, *, rtol: float = 1e-9) -> float:
    """||u^{1/q} fhat||_q / ||v^{1/p} f||_p by adaptive quadrature."""
    rhs = weighted_lp_norm(profile, v, cfg.p, cfg.n, rtol=rtol)
    if rhs == 0.0 or math.isinf(rhs):
        raise ValueError("space-side norm must be finite and nonzero")
    lhs = transform_weighted_norm(profile, u, cfg.q, cfg.n, rtol=rtol)
    return lhs / rhs


def restriction_ratio(profile: RadialProfile, U, v: Weight,
                      cfg: ExponentConfig) -> float:
    """Sphere-restriction ratio for radial f: |fhat(1)| (int U dsigma)^{1/q}
    over ||v^{1/p} f||_p."""
    n = cfg.n
    rhs = weighted_lp_norm(profile, v, cfg.p, cfg.n)
    if rhs == 0.0 or math.isinf(rhs):
        raise ValueError("space-side norm must be finite and nonzero")
    value = abs(radial_fourier(profile, n, 1.0))
    u_mass = omega_surface(n) if U is None else \
        float(U) * omega_surface(n) if np.isscalar(U) else None
    if u_mass is None:
        raise ValueError("restriction objective expects a constant sphere weight")
    return value * u_mass ** (1.0 / cfg.q) / rhs


def uncertainty_ratio(profile: RadialProfile, u: Weight, v: Weight,
                      cfg: ExponentConfig) -> float:
    """Implied constant lower bound ||f||_2^2 /
    (||u^{-1/q} |xi| fhat||_{q'} ||v^{1/p} |x| f||_p)."""
    n = cfg.n
    lhs = weighted_lp_norm(profile, None, 2.0, n) ** 2
    moment_profile = RadialProfile(lambda r: np.asarray(r, float) * profile(r),
                                   profile.decay, profile.smoothness, profile.kinks,
                                   dict(profile.meta))
    rhs_space = weighted_lp_norm(moment_profile, v, cfg.p, n)
    u_neg = None if u is None else u.powered(-1.0)
    weight_fn = (lambda rho: 1.0) if u_neg is None else \
        (lambda rho: float(u_neg.radial(np.array([rho]))[0]))
    from scipy.integrate import quad

    sigma_min = profile.meta.get("sigma_min", profile.decay.param)
    rho_max = 14.0 / sigma_min if profile.decay.kind == "gaussian" else None
    if rho_max is None:
        raise ValueError("uncertainty sweeps use gaussian-decay profiles")

    def integrand(rho):
        if rho == 0.0:
            rho = 1e-300
        fh = radial_fourier(profile, n, rho, rtol=1e-11)
        return (abs(fh) * rho) ** cfg.q_prime * weight_fn(rho) ** (cfg.q_prime / cfg.q) \
            * rho ** (n - 1)

    val, _ = quad(integrand, 0.0, rho_max, limit=300, epsabs=1e-14, epsrel=1e-9)
    rhs_fourier = (omega_surface(n) * val) ** (1.0 / cfg.q_prime)
    if rhs_fourier == 0.0 or rhs_space == 0.0:
        raise ValueError("degenerate uncertainty denominator")
    if math.isinf(rhs_fourier) or math.isinf(rhs_space):
        raise ValueError("uncertainty right-hand side is infinite")
    return lhs / (rhs_fourier * rhs_space)


# --- discretized L^2 operator ---------------------------------------------------

def _weight_aware_grid(weight, R: float, panels: int) -> RadialGrid:
    edges = set(np.linspace(0.0, R, panels + 1).tolist())
    if weight is not None:
        edges.update(b for b in weight.breakpoints(R) if 0 < b < R)
    return RadialGrid(np.array(sorted(edges)), R)


def build_transform_matrix(u: Weight, v: Weight, n: int,
                           r_grid: RadialGrid, rho_grid: RadialGrid,
                           order: int = 8):
    """Discretized map f -> u^{1/2} (radial transform)(v^{-1/2} f) in
    square-root-of-measure coordinates, so its largest singular value is
    the operator norm between the discrete weighted L^2 spaces."""
    r, wr = r_grid.quadrature(order)
    rho, wrho = rho_grid.quadrature(order)
    om = omega_surface(n)
    alpha = n / 2 - 1
    kern = bessel.normalized_j(alpha, np.outer(rho, r))
    uvals = np.ones_like(rho) if u is None else np.asarray(u.radial(rho), float)
    vvals = np.ones_like(r) if v is None else np.asarray(v.radial(r), float)
    if np.any(vvals <= 0):
        raise ValueError("v must be positive on the grid")
    mu_r = wr * r ** (n - 1) * om
    mu_rho = wrho * rho ** (n - 1) * om
    # x_i = sqrt(mu_r_i) g_i with g = v^{-1/2} f; rows scaled by sqrt(u mu_rho)
    M = np.sqrt(uvals * mu_rho)[:, None] * (om * kern) * \
        (mu_r / om / np.sqrt(mu_r))[None, :] / np.sqrt(vvals)[None, :]
    return M, (r, wr, rho, wrho)


def _power_iteration(M: np.ndarray, tol: float = 1e-8, max_iter: int = 5000):
    rng = np.random.default_rng(12345)
    x = rng.normal(size=M.shape[1])
    x /= np.linalg.norm(x)
    sigma_old = 0.0
    for it in range(1, max_iter + 1):
        y = M.dot(x)
        sigma = np.linalg.norm(y)
        x_new = M.T.dot(y)
        norm_new = np.linalg.norm(x_new)
        if norm_new == 0.0:
            return 0.0, it, True
        x = x_new / norm_new
        if abs(sigma - sigma_old) <= tol * max(sigma, 1.0):
            return sigma, it, True
        sigma_old = sigma
    return sigma_old, max_iter, False


def best_constant_l2(u: Weight, v: Weight, n: int, grid: RadialGrid = None,
                     *, rho_grid: RadialGrid = None, tol: float = 1e-8,
                     refinement_rounds: int = 0) -> RatioEstimate:
    """Largest singular value of the discretized weighted transform at p=q=2.

    With ``refinement_rounds`` > 0 the domain is doubled that many times
    at fixed per-unit resolution; a monotone >10% growth per round flags
    the constant as unbounded (the estimate stays a lower bound).
    """
    if grid is None:
        grid = _weight_aware_grid(v, 20.0, 96)
    if rho_grid is None:
        rho_grid = _weight_aware_grid(u, 20.0, 96)
    values = []
    iters_total = 0
    converged = True
    for round_index in range(refinement_rounds + 1):
        scale = 2 ** round_index
        g = _weight_aware_grid(v, grid.R * scale, (len(grid.nodes) - 1) * scale)
        gr = _weight_aware_grid(u, rho_grid.R * scale, (len(rho_grid.nodes) - 1) * scale)
        M, _ = build_transform_matrix(u, v, n, g, gr)
        sigma, iters, ok = _power_iteration(M, tol=tol)
        values.append(sigma)
        iters_total += iters
        converged = converged and ok
    unbounded = False
    if len(values) >= 2:
        growths = [b / a for a, b in zip(values[:-1], values[1:])]
        unbounded = all(g > 1.10 for g in growths)
    return RatioEstimate(value=values[-1], iterations=iters_total,
                         converged=converged and not unbounded,
                         unbounded=unbounded, trace=values)


# --- general-exponent ascent ------------------------------------------------------

class _GridRatio:
    """Fast ratio evaluation for node-valued profiles on fixed grids."""

    def __init__(self, obj: RatioObjective):
        cfg = obj.cfg
        n = cfg.n
        self.obj = obj
        self.cfg = cfg
        r_grid = _weight_aware_grid(obj.v, obj.grid_radius, max(obj.grid_nodes // 8, 16))
        rho_grid = _weight_aware_grid(obj.u, obj.grid_radius, max(obj.grid_nodes // 8, 16))
        self.r, self.wr = r_grid.quadrature(8)
        self.rho, self.wrho = rho_grid.quadrature(8)
        om = omega_surface(n)
        alpha = n / 2 - 1
        self.kernel = om * bessel.normalized_j(alpha, np.outer(self.rho, self.r)) * \
            (self.wr * self.r ** (n - 1))[None, :]
        self.mu_rho = om * self.wrho * self.rho ** (n - 1)
        self.mu_r = om * self.wr * self.r ** (n - 1)
        self.uvals = np.ones_like(self.rho) if obj.u is None else \
            np.asarray(obj.u.radial(self.rho), float)
        self.vvals = np.ones_like(self.r) if obj.v is None else \
            np.asarray(obj.v.radial(self.r), float)

    def ratio(self, fvec: np.ndarray) -> float:
        cfg = self.cfg
        fh = self.kernel.dot(fvec)
        lhs = np.sum(self.mu_rho * self.uvals * np.abs(fh) ** cfg.q) ** (1.0 / cfg.q)
        rhs = np.sum(self.mu_r * self.vvals * np.abs(fvec) ** cfg.p) ** (1.0 / cfg.p)
        if rhs == 0.0:
            return 0.0
        return lhs / rhs

    def fixed_point_update(self, fvec: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        fh = self.kernel.dot(fvec)
        grad = self.kernel.T.dot(self.mu_rho * self.uvals *
                                 np.abs(fh) ** (cfg.q - 1.0) * np.sign(fh))
        scaled = grad / np.maximum(self.mu_r * self.vvals, 1e-300)
        update = np.abs(scaled) ** (1.0 / (cfg.p - 1.0)) * np.sign(scaled) \
            if cfg.p > 1 else scaled
        norm = np.linalg.norm(update)
        return update / norm if norm > 0 else fvec


def ratio_ascent(obj: RatioObjective, family: TestFunctionFamily,
                 iterations: int = 40) -> RatioEstimate:
    """Maximize the objective ratio over the family, then polish on a grid.

    Family members are scored with adaptive quadrature; the best one
    seeds multiplicative fixed-point updates and random coordinate
    polish on node values.  Every iterate's ratio is a valid lower bound
    for the true constant, and the running maximum is returned.
    """
    members = family.members()
    if not members:
        raise ValueError("family has no members")
    trace = []
    best_label, best_profile, best_value = None, None, -math.inf
    for label, profile in members:
        value = obj.ratio(profile)
        trace.append((label, value))
        if value > best_value:
            best_label, best_profile, best_value = label, profile, value
    if obj.inequality != "pitt":
        # grid polish is specific to the transform-norm objective
        r = np.linspace(0.0, obj.grid_radius, obj.grid_nodes)
        return RatioEstimate(value=best_value, iterations=len(members),
                             converged=True, witness_r=r,
                             witness_f=best_profile(r), trace=trace)
    engine = _GridRatio(obj)
    fvec = best_profile(engine.r)
    grid_best = engine.ratio(fvec)
    best_vec = fvec.copy()
    rng = np.random.default_rng(2024)
    for it in range(iterations):
        candidate = engine.fixed_point_update(best_vec)
        cand_ratio = engine.ratio(candidate)
        if cand_ratio > grid_best:
            grid_best = cand_ratio
            best_vec = candidate
        else:
            # coordinate polish: multiplicative bumps on random nodes
            trial = best_vec.copy()
            idx = rng.integers(0, len(trial), size=max(len(trial) // 16, 1))
            trial[idx] *= 1.0 + rng.uniform(-0.2, 0.2, size=len(idx))
            trial_ratio = engine.ratio(trial)
            if trial_ratio > grid_best:
                grid_best = trial_ratio
                best_vec = trial
    # re-certify the grid iterate as an actual function ratio before
    # letting it beat the adaptively evaluated family members
    refined = _recertified_ratio(obj, engine.r, best_vec)
    value = max(best_value, refined)
    return RatioEstimate(value=value, iterations=len(members) + iterations,
                         converged=True, witness_r=engine.r.copy(),
                         witness_f=best_vec,
                         trace=trace + [("grid", grid_best), ("refined", refined)])


def _recertified_ratio(obj: RatioObjective, r_nodes, fvec) -> float:
    order = np.argsort(r_nodes)
    r_sorted = np.asarray(r_nodes)[order]
    f_sorted = np.asarray(fvec)[order]
    # downsample to a manageable piecewise-linear profile whose kinks the
    # quadrature can split at; any actual function yields a valid bound
    step = max(len(r_sorted) // 128, 1)
    r_coarse = np.concatenate([r_sorted[::step], r_sorted[-1:]])
    f_coarse = np.concatenate([f_sorted[::step], [0.0]])
    profile = RadialProfile(
        lambda r: np.interp(np.asarray(r, float), r_coarse, f_coarse,
                            left=f_coarse[0], right=0.0),
        Decay("compact", float(r_coarse[-1])), "lipschitz",
        kinks=tuple(r_coarse.tolist()))
    try:
        return obj.ratio(profile, rtol=1e-6)
    except (ValueError, QuadratureError):
        return -math.inf


def dilation_sweep(obj: RatioObjective, base: RadialProfile, lambdas) -> list:
    """Objective ratio along the dilation family f(lambda x).

    For homogeneous weights on the admissible scaling relation the ratio
    column is constant; off the relation it follows a pure power law in
    lambda whose log-log slope is the relation defect over p.
    """
    rows = []
    for lam in lambdas:
        profile = base.dilate(float(lam))
        rows.append({"lambda": float(lam), "ratio": obj.ratio(profile)})
    return rows
