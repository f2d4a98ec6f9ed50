"""Compiled solver kernels: pencil inertia counts, bisection, and the batched
per-realisation gap solve.

The arithmetic must stay exactly in lockstep with ``_fallback.py``: same
operations in the same order on IEEE doubles (setup.py disables FMA
contraction), so either backend produces bit-identical results. Zero-pivot
handling and status codes are documented in ``_fallback.py``.
"""

import numpy as np

from libc.math cimport fabs, NAN

BACKEND_NAME = "native"

cdef double TINY = 2.2250738585072014e-308
cdef double MARGIN = 1e-6

STATUS_OK = 0
STATUS_NONPOSITIVE = 1
STATUS_BRACKET = 2
STATUS_NO_CONVERGENCE = 3

cdef signed char S_OK = 0
cdef signed char S_NONPOS = 1
cdef signed char S_BRACKET = 2
cdef signed char S_NOCONV = 3

BRACKET_MARGIN = MARGIN


cdef int _inertia_general(const double* ad, const double* ao,
                          const double* md, const double* mo,
                          Py_ssize_t dof, double sigma) nogil:
    cdef double d, s
    cdef int count = 0
    cdef Py_ssize_t i
    d = ad[0] - sigma * md[0]
    if d == 0.0:
        d = TINY
    if d < 0.0:
        count += 1
    for i in range(1, dof):
        s = ao[i - 1] - sigma * mo[i - 1]
        d = (ad[i] - sigma * md[i]) - (s * s) / d
        if d == 0.0:
            d = TINY
        if d < 0.0:
            count += 1
    return count


cdef int _inertia_const(const double* ad, const double* ao, Py_ssize_t dof,
                        double md, double mo, double sigma) nogil:
    cdef double d, s
    cdef int count = 0
    cdef Py_ssize_t i
    d = ad[0] - sigma * md
    if d == 0.0:
        d = TINY
    if d < 0.0:
        count += 1
    for i in range(1, dof):
        s = ao[i - 1] - sigma * mo
        d = (ad[i] - sigma * md) - (s * s) / d
        if d == 0.0:
            d = TINY
        if d < 0.0:
            count += 1
    return count


def pencil_inertia(ad, ao, md, mo, double sigma):
    """Number of eigenvalues of the pencil (A, M) strictly below sigma."""
    cdef const double[::1] adv = np.ascontiguousarray(ad, dtype=np.float64).ravel()
    cdef const double[::1] aov = np.ascontiguousarray(ao, dtype=np.float64).ravel()
    cdef const double[::1] mdv = np.ascontiguousarray(md, dtype=np.float64).ravel()
    cdef const double[::1] mov = np.ascontiguousarray(mo, dtype=np.float64).ravel()
    cdef Py_ssize_t dof = adv.shape[0]
    if mdv.shape[0] != dof or aov.shape[0] != dof - 1 or mov.shape[0] != dof - 1:
        raise ValueError("pencil arrays have inconsistent sizes")
    cdef const double* aop = &aov[0] if dof > 1 else NULL
    cdef const double* mop = &mov[0] if dof > 1 else NULL
    return _inertia_general(&adv[0], aop, &mdv[0], mop, dof, sigma)


cdef void _gershgorin_const(const double* diag_b, const double* off_b,
                            Py_ssize_t dof, double md, double mo,
                            double* blo, double* bhi) nogil:
    cdef double a_lo = 0.0, a_hi = 0.0, m_lo = 0.0, m_hi = 0.0
    cdef double r, mr, lo_i, hi_i, mlo_i, mhi_i, lo, hi
    cdef double abs_mo = fabs(mo)
    cdef Py_ssize_t i
    for i in range(dof):
        r = 0.0
        mr = 0.0
        if i > 0:
            r += fabs(off_b[i - 1])
            mr += abs_mo
        if i < dof - 1:
            r += fabs(off_b[i])
            mr += abs_mo
        lo_i = diag_b[i] - r
        hi_i = diag_b[i] + r
        mlo_i = md - mr
        mhi_i = md + mr
        if i == 0 or lo_i < a_lo:
            a_lo = lo_i
        if i == 0 or hi_i > a_hi:
            a_hi = hi_i
        if i == 0 or mlo_i < m_lo:
            m_lo = mlo_i
        if i == 0 or mhi_i > m_hi:
            m_hi = mhi_i
    if m_lo < TINY:
        m_lo = TINY
    lo = a_lo / m_lo if a_lo < 0.0 else a_lo / m_hi
    hi = a_hi / m_lo if a_hi > 0.0 else a_hi / m_hi
    blo[0] = lo - 1e-9 * (1.0 + fabs(lo))
    bhi[0] = hi + 1e-9 * (1.0 + fabs(hi))


cdef double _bisect_const(const double* ad, const double* ao, Py_ssize_t dof,
                          double md, double mo, int k, double lo, double hi,
                          double abs_tol, double rel_tol, int max_iter,
                          signed char* status) nogil:
    cdef double mid, width, tol
    cdef int it = 0, cnt
    while True:
        mid = 0.5 * (lo + hi)
        width = hi - lo
        tol = rel_tol * fabs(mid)
        if abs_tol > tol:
            tol = abs_tol
        if width <= tol:
            return mid
        if it >= max_iter:
            status[0] = S_NOCONV
            return mid
        cnt = _inertia_const(ad, ao, dof, md, mo, mid)
        if cnt >= k:
            hi = mid
        else:
            lo = mid
        it += 1


cdef void _gap_one(const double* av, Py_ssize_t ncells, int nq, const double* wq,
                   double inv_h, double md, double mo, double chi1h, double chi2h,
                   double abs_tol, double rel_tol, int max_iter,
                   double* abar, double* diag, double* off,
                   double* lam1, double* lam2, double* lo_out, double* hi_out,
                   signed char* status) nogil:
    cdef Py_ssize_t nsites = ncells * nq
    cdef Py_ssize_t dof = ncells - 1
    cdef Py_ssize_t i, e
    cdef int q, c_lo, c_hi
    cdef double v, lo, hi, acc, blo, bhi, l1, l2, t

    lo = av[0]
    hi = av[0]
    for i in range(1, nsites):
        v = av[i]
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    lo_out[0] = lo
    hi_out[0] = hi
    lam1[0] = NAN
    lam2[0] = NAN
    status[0] = S_OK
    if not lo > 0.0:
        status[0] = S_NONPOS
        return

    for e in range(ncells):
        acc = 0.0
        for q in range(nq):
            acc += wq[q] * av[e * nq + q]
        abar[e] = acc
    for i in range(dof):
        diag[i] = (abar[i] + abar[i + 1]) * inv_h
    for i in range(dof - 1):
        off[i] = -abar[i + 1] * inv_h

    blo = lo * chi1h * (1.0 - MARGIN)
    bhi = hi * chi2h * (1.0 + MARGIN)
    c_lo = _inertia_const(diag, off, dof, md, mo, blo)
    c_hi = _inertia_const(diag, off, dof, md, mo, bhi)
    if c_lo != 0 or c_hi < 2:
        _gershgorin_const(diag, off, dof, md, mo, &blo, &bhi)
        c_lo = _inertia_const(diag, off, dof, md, mo, blo)
        c_hi = _inertia_const(diag, off, dof, md, mo, bhi)
        if c_lo != 0 or c_hi < 2:
            status[0] = S_BRACKET
            return

    l1 = _bisect_const(diag, off, dof, md, mo, 1, blo, bhi,
                       abs_tol, rel_tol, max_iter, status)
    if status[0] != S_OK:
        return
    l2 = _bisect_const(diag, off, dof, md, mo, 2, blo, bhi,
                       abs_tol, rel_tol, max_iter, status)
    if status[0] != S_OK:
        return
    if l2 < l1:
        t = l1
        l1 = l2
        l2 = t
    lam1[0] = l1
    lam2[0] = l2


def batch_gap(avals, ncells, nq, wq, double inv_h, double mass_d, double mass_o,
              double chi1h, double chi2h, double abs_tol, double rel_tol,
              int max_iter):
    """Assemble and solve a batch of realisations for the two smallest
    eigenvalues; see the fallback backend for the full contract."""
    cdef const double[:, ::1] av = np.ascontiguousarray(avals, dtype=np.float64)
    cdef Py_ssize_t B = av.shape[0]
    cdef Py_ssize_t nc = int(ncells)
    cdef int nqi = int(nq)
    if av.shape[1] != nc * nqi:
        raise ValueError(f"expected {nc * nqi} site values per row")
    cdef const double[::1] wqv = np.ascontiguousarray(wq, dtype=np.float64)
    cdef Py_ssize_t dof = nc - 1

    lam1_arr = np.empty(B, dtype=np.float64)
    lam2_arr = np.empty(B, dtype=np.float64)
    lo_arr = np.empty(B, dtype=np.float64)
    hi_arr = np.empty(B, dtype=np.float64)
    status_arr = np.zeros(B, dtype=np.int8)
    abar_arr = np.empty(nc, dtype=np.float64)
    diag_arr = np.empty(dof, dtype=np.float64)
    off_arr = np.empty(max(dof - 1, 1), dtype=np.float64)

    cdef double[::1] lam1 = lam1_arr
    cdef double[::1] lam2 = lam2_arr
    cdef double[::1] lo = lo_arr
    cdef double[::1] hi = hi_arr
    cdef signed char[::1] status = status_arr
    cdef double[::1] abar = abar_arr
    cdef double[::1] diag = diag_arr
    cdef double[::1] off = off_arr
    cdef Py_ssize_t b

    with nogil:
        for b in range(B):
            _gap_one(&av[b, 0], nc, nqi, &wqv[0], inv_h, mass_d, mass_o,
                     chi1h, chi2h, abs_tol, rel_tol, max_iter,
                     &abar[0], &diag[0], &off[0],
                     &lam1[b], &lam2[b], &lo[b], &hi[b], &status[b])
    return lam1_arr, lam2_arr, lo_arr, hi_arr, status_arr
