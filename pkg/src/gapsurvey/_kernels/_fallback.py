"""Pure NumPy / Python solver kernels.

This is the fallback backend selected when the compiled extension is not
available. The arithmetic here is ordered to match ``_native.pyx`` exactly:
identical operations in identical order on IEEE doubles, so both backends
return bit-identical results. Any change must be mirrored there.

Zero pivots: an exact 0.0 pivot in the LDL^T recurrence is replaced by
+TINY (smallest normal double). That evaluates the count in the limit from
below sigma, so eigenvalues exactly at sigma stay outside the strict count,
deterministically and without any retry loop.

Status codes returned by ``batch_gap`` (must match ``_native.pyx``):

    0  solved
    1  coefficient non-positive at a quadrature site
    2  no valid search bracket even after the Gershgorin fallback
    3  bisection did not converge within the iteration budget
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "fallback"

TINY = 2.2250738585072014e-308     # smallest normal double; zero-pivot stand-in
BRACKET_MARGIN = 1e-6              # widening of the spectral-sandwich bracket

STATUS_OK = 0
STATUS_NONPOSITIVE = 1
STATUS_BRACKET = 2
STATUS_NO_CONVERGENCE = 3


def pencil_inertia(ad, ao, md, mo, sigma):
    """Number of eigenvalues of the pencil (A, M) strictly below sigma.

    Counts negative pivots of the LDL^T recurrence applied to A - sigma*M;
    exact zero pivots are replaced by +TINY (limit from below sigma).
    """
    ad = [float(v) for v in np.asarray(ad).ravel()]
    ao = [float(v) for v in np.asarray(ao).ravel()]
    md = [float(v) for v in np.asarray(md).ravel()]
    mo = [float(v) for v in np.asarray(mo).ravel()]
    if len(ad) != len(md) or len(ao) != len(mo) or len(ao) != len(ad) - 1:
        raise ValueError("pencil arrays have inconsistent sizes")
    sigma = float(sigma)
    d = ad[0] - sigma * md[0]
    if d == 0.0:
        d = TINY
    count = 1 if d < 0.0 else 0
    for i in range(1, len(ad)):
        s = ao[i - 1] - sigma * mo[i - 1]
        d = (ad[i] - sigma * md[i]) - (s * s) / d
        if d == 0.0:
            d = TINY
        if d < 0.0:
            count += 1
    return count


def _inertia_const(ad, ao, md, mo, sigma):
    """Scalar-mass variant on plain Python floats (ad, ao are sequences)."""
    d = ad[0] - sigma * md
    if d == 0.0:
        d = TINY
    count = 1 if d < 0.0 else 0
    for i in range(1, len(ad)):
        s = ao[i - 1] - sigma * mo
        d = (ad[i] - sigma * md) - (s * s) / d
        if d == 0.0:
            d = TINY
        if d < 0.0:
            count += 1
    return count


def _batch_inertia(diag, off, md, mo, sigma):
    """Counts for a batch of pencils sharing a constant-coefficient mass.

    diag: (B, dof), off: (B, dof-1), sigma: (B,). Same recurrence as the
    scalar path, vectorized over the batch lane; the zero-pivot replacement
    is applied elementwise each step.
    """
    dof = diag.shape[1]
    with np.errstate(divide="ignore", over="ignore"):
        d = diag[:, 0] - sigma * md
        d = np.where(d == 0.0, TINY, d)
        count = (d < 0.0).astype(np.int64)
        for i in range(1, dof):
            s = off[:, i - 1] - sigma * mo
            d = (diag[:, i] - sigma * md) - (s * s) / d
            d = np.where(d == 0.0, TINY, d)
            count += d < 0.0
    return count


def _gershgorin_const(diag_b, off_b, md, mo):
    """Fallback search bracket from Gershgorin rows of A and the mass."""
    dof = len(diag_b)
    a_lo = a_hi = None
    m_lo = m_hi = None
    abs_mo = abs(mo)
    for i in range(dof):
        r = 0.0
        mr = 0.0
        if i > 0:
            r += abs(off_b[i - 1])
            mr += abs_mo
        if i < dof - 1:
            r += abs(off_b[i])
            mr += abs_mo
        lo_i = diag_b[i] - r
        hi_i = diag_b[i] + r
        mlo_i = md - mr
        mhi_i = md + mr
        if a_lo is None or lo_i < a_lo:
            a_lo = lo_i
        if a_hi is None or hi_i > a_hi:
            a_hi = hi_i
        if m_lo is None or mlo_i < m_lo:
            m_lo = mlo_i
        if m_hi is None or mhi_i > m_hi:
            m_hi = mhi_i
    if m_lo < TINY:  # mass must be positive definite; guard the division
        m_lo = TINY
    lo = a_lo / m_lo if a_lo < 0.0 else a_lo / m_hi
    hi = a_hi / m_lo if a_hi > 0.0 else a_hi / m_hi
    return lo - 1e-9 * (1.0 + abs(lo)), hi + 1e-9 * (1.0 + abs(hi))


def _batch_bisect(diag, off, md, mo, k, lo0, hi0, abs_tol, rel_tol, max_iter,
                  active0, status):
    """Lockstep bisection for eigenvalue number ``k`` (1-based, global).

    Each lane follows exactly the trajectory the scalar kernel would: the
    masks only decide which lanes still update, never what they compute.
    """
    B = diag.shape[0]
    lo = lo0.copy()
    hi = hi0.copy()
    result = np.full(B, np.nan)
    active = active0.copy()
    it = 0
    while active.any():
        mid = 0.5 * (lo + hi)
        width = hi - lo
        tol = np.maximum(abs_tol, rel_tol * np.abs(mid))
        done = active & (width <= tol)
        result[done] = mid[done]
        active &= ~done
        if not active.any():
            break
        if it >= max_iter:
            result[active] = mid[active]
            status[active] = STATUS_NO_CONVERGENCE
            break
        counts = _batch_inertia(diag, off, md, mo, mid)
        ge = counts >= k
        hi = np.where(active & ge, mid, hi)
        lo = np.where(active & ~ge, mid, lo)
        it += 1
    return result


def batch_gap(avals, ncells, nq, wq, inv_h, mass_d, mass_o, chi1h, chi2h,
              abs_tol, rel_tol, max_iter):
    """Assemble and solve one batch of realisations for the two smallest
    eigenvalues.

    avals: (B, ncells*nq) coefficient values at quadrature sites, element
    major. Returns (lam1, lam2, coeff_lo, coeff_hi, status); failed lanes
    carry NaN eigenvalues and a nonzero status code.
    """
    avals = np.ascontiguousarray(avals, dtype=np.float64)
    B = avals.shape[0]
    ncells = int(ncells)
    nq = int(nq)
    if avals.shape[1] != ncells * nq:
        raise ValueError(f"expected {ncells * nq} site values per row")
    wq = np.asarray(wq, dtype=np.float64)

    lo = avals.min(axis=1)
    hi = avals.max(axis=1)
    status = np.zeros(B, dtype=np.int8)
    ok = lo > 0.0
    status[~ok] = STATUS_NONPOSITIVE

    abar = wq[0] * avals[:, 0::nq]
    for q in range(1, nq):
        abar = abar + wq[q] * avals[:, q::nq]
    diag = (abar[:, :-1] + abar[:, 1:]) * inv_h
    off = -abar[:, 1:-1] * inv_h

    blo = lo * chi1h * (1.0 - BRACKET_MARGIN)
    bhi = hi * chi2h * (1.0 + BRACKET_MARGIN)

    c_lo = _batch_inertia(diag, off, mass_d, mass_o, blo)
    c_hi = _batch_inertia(diag, off, mass_d, mass_o, bhi)
    deficient = ok & ((c_lo != 0) | (c_hi < 2))
    for b in np.nonzero(deficient)[0]:
        g_lo, g_hi = _gershgorin_const(diag[b].tolist(), off[b].tolist(),
                                       mass_d, mass_o)
        cl = _inertia_const(diag[b].tolist(), off[b].tolist(), mass_d, mass_o, g_lo)
        ch = _inertia_const(diag[b].tolist(), off[b].tolist(), mass_d, mass_o, g_hi)
        if cl != 0 or ch < 2:
            status[b] = STATUS_BRACKET
            ok[b] = False
        else:
            blo[b] = g_lo
            bhi[b] = g_hi

    lam1 = _batch_bisect(diag, off, mass_d, mass_o, 1, blo, bhi,
                         abs_tol, rel_tol, max_iter, ok, status)
    # the scalar kernel stops after a failed first bisection, so only lanes
    # still clean after lam1 proceed to lam2
    ok2 = ok & (status == STATUS_OK)
    lam2 = _batch_bisect(diag, off, mass_d, mass_o, 2, blo, bhi,
                         abs_tol, rel_tol, max_iter, ok2, status)
    solved = status == STATUS_OK
    lam1[~solved] = np.nan
    lam2[~solved] = np.nan
    # successive bisections can land within one tolerance of each other in a
    # cluster; order the pair so the gap is never spuriously negative
    swap = solved & (lam2 < lam1)
    if swap.any():
        t = lam1[swap]
        lam1[swap] = lam2[swap]
        lam2[swap] = t
    return lam1, lam2, lo, hi, status
