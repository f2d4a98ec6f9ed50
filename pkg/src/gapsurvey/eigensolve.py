"""Generalized symmetric tridiagonal eigensolver A u = lambda M u.

Eigenvalues are located by inertia-counting bisection: the number of
negative pivots of the LDL^T factorization of A - sigma*M equals the number
of pencil eigenvalues strictly below sigma, so each eigenvalue can be boxed
in by halving. Bisection is slower than a secular-equation solver but each
factorization is O(n) and the iteration is robust and bit-reproducible,
which the survey's determinism contract relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as kernels
from .discretization import TridiagonalSymmetric, UniformMesh
from .errors import BracketError, ClusterError, ConvergenceError

__all__ = [
    "ToleranceSpec",
    "EigenResult",
    "inertia",
    "gershgorin_bracket",
    "smallest_eigenvalues",
    "inverse_iteration",
    "discrete_laplacian_eigenvalue",
]


@dataclass(frozen=True)
class ToleranceSpec:
    """Bisection stops when the interval width drops below
    max(abs_tol, rel_tol * |midpoint|)."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_bisections: int = 200


@dataclass
class EigenResult:
    values: np.ndarray
    iterations: np.ndarray
    residuals: Optional[np.ndarray] = None


def inertia(A: TridiagonalSymmetric, M: TridiagonalSymmetric, sigma: float) -> int:
    """Number of eigenvalues of the pencil (A, M) strictly below ``sigma``.

    Counts negative pivots of the LDL^T recurrence on A - sigma*M. An exact
    zero pivot is replaced by the smallest normal double, which evaluates
    the count in the limit from below sigma: eigenvalues exactly at sigma
    stay excluded, deterministically on every platform.
    """
    if A.size != M.size:
        raise ValueError("A and M must have the same size")
    return kernels.pencil_inertia(A.diag, A.off, M.diag, M.off, float(sigma))


def gershgorin_bracket(A: TridiagonalSymmetric, M: TridiagonalSymmetric):
    """Interval certain to contain the whole spectrum of the pencil (A, M).

    Combines Gershgorin row bounds on A with Rayleigh-quotient bounds of the
    (positive definite) mass; cheap and loose, used when no analytic bracket
    is available.
    """
    ra = np.zeros(A.size)
    rm = np.zeros(M.size)
    if A.size > 1:
        ra[:-1] += np.abs(A.off)
        ra[1:] += np.abs(A.off)
        rm[:-1] += np.abs(M.off)
        rm[1:] += np.abs(M.off)
    a_lo = float(np.min(A.diag - ra))
    a_hi = float(np.max(A.diag + ra))
    m_lo = max(float(np.min(M.diag - rm)), 2.2250738585072014e-308)
    m_hi = float(np.max(M.diag + rm))
    lo = a_lo / m_lo if a_lo < 0.0 else a_lo / m_hi
    hi = a_hi / m_lo if a_hi > 0.0 else a_hi / m_hi
    return lo - 1e-9 * (1.0 + abs(lo)), hi + 1e-9 * (1.0 + abs(hi))


def _bisect(A, M, k_global, lo, hi, tol: ToleranceSpec):
    """Bisection for pencil eigenvalue number ``k_global`` (1-based).

    Mirrors the kernel's loop exactly (same midpoint/tolerance arithmetic),
    so values found here match the batched survey path bit for bit.
    """
    it = 0
    while True:
        mid = 0.5 * (lo + hi)
        width = hi - lo
        t = tol.rel_tol * abs(mid)
        if tol.abs_tol > t:
            t = tol.abs_tol
        if width <= t:
            return mid, it
        if it >= tol.max_bisections:
            raise ConvergenceError(
                f"bisection for eigenvalue {k_global} did not converge in "
                f"{tol.max_bisections} steps (interval width {width!r})")
        if kernels.pencil_inertia(A.diag, A.off, M.diag, M.off, mid) >= k_global:
            hi = mid
        else:
            lo = mid
        it += 1


def smallest_eigenvalues(A: TridiagonalSymmetric, M: TridiagonalSymmetric, k: int,
                         bracket=None, tol: ToleranceSpec = ToleranceSpec()) -> EigenResult:
    """The ``k`` smallest eigenvalues of A u = lambda M u, ascending.

    ``bracket`` is an interval (lo, hi) known to contain them; when omitted a
    Gershgorin bound is used. The bracket must satisfy
    inertia(hi) - inertia(lo) >= k, otherwise BracketError carries both
    counts. Adjacent values may coincide to within one tolerance when the
    pencil has a cluster; the returned array is sorted either way.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if bracket is None:
        lo, hi = gershgorin_bracket(A, M)
    else:
        lo, hi = float(bracket[0]), float(bracket[1])
    count_lo = inertia(A, M, lo)
    count_hi = inertia(A, M, hi)
    if count_hi - count_lo < k:
        raise BracketError(
            f"bracket [{lo!r}, {hi!r}] holds {count_hi - count_lo} eigenvalue(s), "
            f"need {k}", count_lo=count_lo, count_hi=count_hi)
    values = np.empty(k)
    iters = np.empty(k, dtype=np.int64)
    for i in range(1, k + 1):
        values[i - 1], iters[i - 1] = _bisect(A, M, count_lo + i, lo, hi, tol)
    values.sort()
    return EigenResult(values=values, iterations=iters)


def _solve_tridiagonal(sub, diag, sup, rhs):
    """Solve a general tridiagonal system by LU with partial pivoting.

    An exactly zero pivot is replaced by a tiny value: the only caller is
    inverse iteration, where a (near-)singular shifted matrix is the point
    and the solution direction is what matters.
    """
    n = len(diag)
    a = np.asarray(sub, dtype=np.float64).copy()
    b = np.asarray(diag, dtype=np.float64).copy()
    c = np.asarray(sup, dtype=np.float64).copy()
    c2 = np.zeros(n)
    r = np.asarray(rhs, dtype=np.float64).copy()
    for i in range(n - 1):
        if abs(b[i]) >= abs(a[i]):
            if b[i] == 0.0:
                b[i] = 1e-307
            m = a[i] / b[i]
            b[i + 1] -= m * c[i]
            r[i + 1] -= m * r[i]
            c2[i] = 0.0
        else:
            # swap rows i and i+1, then eliminate
            m = b[i] / a[i]
            b[i] = a[i]
            t = b[i + 1]
            b[i + 1] = c[i] - m * t
            c[i] = t
            if i < n - 2:
                c2[i] = c[i + 1]
                c[i + 1] = -m * c2[i]
            else:
                c2[i] = 0.0
            r[i], r[i + 1] = r[i + 1], r[i]
            r[i + 1] -= m * r[i]
    if b[n - 1] == 0.0:
        b[n - 1] = 1e-307
    x = np.zeros(n)
    x[n - 1] = r[n - 1] / b[n - 1]
    if n > 1:
        x[n - 2] = (r[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (r[i] - c[i] * x[i + 1] - c2[i] * x[i + 2]) / b[i]
    return x


def _m_norm(M: TridiagonalSymmetric, v: np.ndarray) -> float:
    return math.sqrt(float(v @ M.matvec(v)))


def inverse_iteration(A: TridiagonalSymmetric, M: TridiagonalSymmetric,
                      lambda_hat: float, tol: float = 1e-8,
                      max_iterations: int = 50):
    """Eigenvector for an isolated eigenvalue near ``lambda_hat``.

    Returns (u, residual) with ||u||_M = 1, the sign fixed so the first
    nonzero component is positive, and
    residual = ||A u - lambda_hat M u||_2 / ||u||_2 <= tol * ||A||_inf.

    Raises ClusterError when the residual stops decreasing for ten straight
    iterations (tell-tale of a tight cluster at lambda_hat), and
    ConvergenceError after ``max_iterations``.
    """
    n = A.size
    scale = A.norm_inf()
    target = tol * scale if scale > 0.0 else tol
    sub = A.off - lambda_hat * M.off if n > 1 else np.empty(0)
    dia = A.diag - lambda_hat * M.diag
    rng = np.random.default_rng(0x5EED)
    u = rng.standard_normal(n)
    u /= _m_norm(M, u)
    best = math.inf
    stagnant = 0
    for _ in range(max_iterations):
        w = _solve_tridiagonal(sub, dia, sub, M.matvec(u))
        winf = float(np.max(np.abs(w)))
        if winf == 0.0 or not math.isfinite(winf):
            raise ConvergenceError("inverse iteration produced a degenerate vector")
        w = w / winf  # exactly singular shifts blow w up to ~1/TINY; rescale
        nrm = _m_norm(M, w)
        if nrm == 0.0 or not math.isfinite(nrm):
            raise ConvergenceError("inverse iteration produced a degenerate vector")
        u = w / nrm
        for comp in u:
            if comp != 0.0:
                if comp < 0.0:
                    u = -u
                break
        res = float(np.linalg.norm(A.matvec(u) - lambda_hat * M.matvec(u)))
        res /= float(np.linalg.norm(u))
        if res <= target:
            return u, res
        if res >= best * (1.0 - 1e-3):
            stagnant += 1
            if stagnant >= 10:
                raise ClusterError(
                    f"inverse iteration stagnated at residual {res!r}; "
                    f"eigenvalue near {lambda_hat!r} looks clustered")
        else:
            stagnant = 0
        best = min(best, res)
    raise ConvergenceError(
        f"inverse iteration did not reach residual {target!r} in {max_iterations} steps")


def discrete_laplacian_eigenvalue(mesh: UniformMesh, k: int) -> float:
    """k-th eigenvalue of the P1 discretisation of -u'' with Dirichlet ends:
    (6/h^2) (1 - cos(k pi h)) / (2 + cos(k pi h)). Tends to (k pi)^2 as h -> 0."""
    if not 1 <= k <= mesh.dof:
        raise ValueError(f"k must be in 1..{mesh.dof}, got {k}")
    h = mesh.h
    c = math.cos(k * math.pi * h)
    return (6.0 / (h * h)) * (1.0 - c) / (2.0 + c)
