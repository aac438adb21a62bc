"""Regenerate the frozen Bessel reference values in tests/data/bessel_oracle.npz.

The reference path is an ascending power series evaluated in extended
precision (mpmath), independent of the scipy-backed production code.
Precision is scaled with the argument because the series suffers
cancellation of order e^t; runtime is minutes, which is why the values
are frozen instead of recomputed inside the test run.

Usage: python tests/generate_bessel_oracle.py
"""

import pathlib

import mpmath as mp
import numpy as np

ALPHAS = (-0.5, 0.0, 0.5, 1.0, 1.5)
GRID_POINTS = 1000
T_MIN, T_MAX = 1e-6, 2000.0

# first positive zeros frozen alongside: per alpha, and the first 5 zeros of J_1
ZERO_ALPHAS = (-0.5, 0.0, 0.5, 1.0, 1.5)


def series_besselj(alpha, t):
    """J_alpha(t) by the ascending power series, term-recursive, adaptive dps."""
    dps = int(25 + 0.45 * t)
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        tt = mp.mpf(t)
        if tt == 0:
            return mp.mpf(1 if alpha == 0 else 0)
        half = tt / 2
        term = half ** a / mp.gamma(a + 1)
        total = mp.mpf(0)
        for k in range(100000):
            total += term
            term = term * (-(half * half)) / ((k + 1) * (k + 1 + a))
            if k > 5 and abs(term) < abs(total) * mp.mpf(10) ** (-dps + 5):
                break
        else:
            raise RuntimeError(f"series did not converge for alpha={alpha}, t={t}")
        return +total


def series_zero(alpha, k):
    """k-th positive zero of J_alpha by bisection on the series reference."""
    guess = mp.pi * (k + alpha / 2 - 0.25)
    lo, hi = guess - 1.2, guess + 1.2
    if lo <= 0:
        lo = mp.mpf("1e-3")
    flo = series_besselj(alpha, lo)
    fhi = series_besselj(alpha, hi)
    width = mp.mpf("0.4")
    while flo * fhi > 0:
        lo -= width
        hi += width
        lo = max(lo, mp.mpf("1e-3"))
        flo = series_besselj(alpha, lo)
        fhi = series_besselj(alpha, hi)
    for _ in range(80):
        mid = (lo + hi) / 2
        fmid = series_besselj(alpha, mid)
        if flo * fmid <= 0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    return (lo + hi) / 2


def main():
    out = pathlib.Path(__file__).parent / "data" / "bessel_oracle.npz"
    grid = np.logspace(np.log10(T_MIN), np.log10(T_MAX), GRID_POINTS)

    values = np.empty((len(ALPHAS), GRID_POINTS))
    for i, alpha in enumerate(ALPHAS):
        for j, t in enumerate(grid):
            v = series_besselj(alpha, float(t))
            with mp.workdps(40):
                ref = mp.besselj(alpha, mp.mpf(float(t)))
                if ref != 0 and abs(v - ref) / abs(ref) > mp.mpf(10) ** (-25):
                    raise RuntimeError(f"series/besselj mismatch at alpha={alpha}, t={t}")
            values[i, j] = float(v)
        print(f"alpha={alpha}: done")

    first_zeros = np.array([float(series_zero(a, 1)) for a in ZERO_ALPHAS])
    j1_zeros = np.array([float(series_zero(1.0, k)) for k in range(1, 6)])

    np.savez_compressed(
        out,
        alphas=np.array(ALPHAS),
        grid=grid,
        values=values,
        zero_alphas=np.array(ZERO_ALPHAS),
        first_zeros=first_zeros,
        j1_zeros=j1_zeros,
    )
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
