"""Shared test helpers: random SPD tridiagonal pencils and small oracles."""

import math

import numpy as np

from gapsurvey.discretization import TridiagonalSymmetric


def random_spd_tridiagonal(rng, n, off_scale=1.0):
    """Random SPD tridiagonal matrix via strict diagonal dominance."""
    off = rng.uniform(-off_scale, off_scale, size=max(n - 1, 0))
    pad = np.zeros(1)
    dom = np.abs(np.concatenate([pad, off])) + np.abs(np.concatenate([off, pad]))
    diag = dom + rng.uniform(0.1, 2.0, size=n)
    return TridiagonalSymmetric(diag, off)


def random_pencil(rng, n):
    """Random SPD pencil (A, M) with M well conditioned."""
    return random_spd_tridiagonal(rng, n, 1.0), random_spd_tridiagonal(rng, n, 0.3)


def normal_cdf(t):
    return 0.5 * (1.0 + math.erf(t / math.sqrt(2.0)))


def _cdf_below(t, u):
    """Accurate predicate Phi(t) < u, via erfc on whichever tail is small.

    For u >= 1/2 the complement 1 - u is exact in doubles (both operands sit
    in [1/2, 2]), so comparing upper-tail masses avoids the cancellation that
    1 + erf(...) suffers for large |t|.
    """
    if u < 0.5:
        return 0.5 * math.erfc(-t / math.sqrt(2.0)) < u
    return 0.5 * math.erfc(t / math.sqrt(2.0)) > 1.0 - u


def inverse_normal_oracle(u, steps=200):
    """Independent quantile oracle: bisection on the erfc-based normal CDF."""
    lo, hi = -40.0, 40.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if _cdf_below(mid, u):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
