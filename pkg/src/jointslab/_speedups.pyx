# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_purepy``."""
from libc.math cimport exp, log
from libc.stdlib cimport malloc, free

import numpy as np
cimport numpy as cnp

cnp.import_array()

ctypedef long long i64


cdef inline i64 _inv_mod(i64 a, i64 p):
    cdef i64 t = 0, nt = 1, r = p, nr = a % p, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def rref_mod_p(rows, Py_ssize_t ncols, i64 p):
    cdef Py_ssize_t n = len(rows)
    if n == 0:
        return [], []
    cdef cnp.ndarray[i64, ndim=2] arr = np.array(rows, dtype=np.int64).reshape(n, ncols) % p
    cdef i64[:, ::1] M = arr
    cdef Py_ssize_t r = 0, c, k, i, j
    cdef i64 inv, f
    pivots = []
    for c in range(ncols):
        if r == n:
            break
        k = r
        while k < n and M[k, c] == 0:
            k += 1
        if k == n:
            continue
        if k != r:
            for j in range(ncols):
                f = M[r, j]
                M[r, j] = M[k, j]
                M[k, j] = f
        inv = _inv_mod(M[r, c], p)
        for j in range(c, ncols):
            M[r, j] = M[r, j] * inv % p
        for i in range(n):
            f = M[i, c]
            if i != r and f != 0:
                for j in range(c, ncols):
                    if M[r, j] != 0:
                        M[i, j] = (M[i, j] - f * M[r, j]) % p
                        if M[i, j] < 0:
                            M[i, j] += p
        pivots.append(c)
        r += 1
    return arr.tolist(), pivots


cdef bint _sdr(int m1, int m2, int m3):
    return ((m1 & 1 and m2 & 2 and m3 & 4) or (m1 & 1 and m2 & 4 and m3 & 2) or
            (m1 & 2 and m2 & 1 and m3 & 4) or (m1 & 2 and m2 & 4 and m3 & 1) or
            (m1 & 4 and m2 & 1 and m3 & 2) or (m1 & 4 and m2 & 2 and m3 & 1))


def rainbow_triangles(masks):
    cdef Py_ssize_t n = len(masks)
    if n == 0:
        return 0
    cdef unsigned char[:, ::1] M = np.array(masks, dtype=np.uint8).reshape(n, n)
    cdef Py_ssize_t u, v, w
    cdef i64 total = 0
    for u in range(n):
        for v in range(u + 1, n):
            if M[u, v] == 0:
                continue
            for w in range(v + 1, n):
                if M[v, w] and M[u, w] and _sdr(M[u, v], M[v, w], M[u, w]):
                    total += 1
    return total


cdef bint _log_products(const int[:, ::1] inc, const double[::1] cnt, double[::1] a,
                        double[::1] sa, double[::1] out):
    cdef Py_ssize_t J = inc.shape[0], d = inc.shape[1], L = cnt.shape[0], p, i, l
    cdef double acc, b
    for l in range(L):
        sa[l] = 0.0
    for p in range(J):
        for i in range(d):
            sa[inc[p, i]] += a[p]
    for l in range(L):
        sa[l] = (1.0 - sa[l]) / cnt[l]
    for p in range(J):
        acc = 0.0
        for i in range(d):
            b = sa[inc[p, i]] + a[p]
            if b <= 0.0:
                return False
            acc += log(b)
        out[p] = acc
    return True


def products_descent(inc, Py_ssize_t nlines, a, double tol, long max_iter):
    cdef int[:, ::1] I = np.ascontiguousarray(inc, dtype=np.intc)
    cdef Py_ssize_t J = I.shape[0], p
    cdef double[::1] cnt = np.zeros(nlines)
    for p in range(J):
        for l in I[p]:
            cnt[l] += 1.0
    cdef double[::1] A = np.array(a, dtype=np.float64)
    cdef double[::1] A2 = np.empty(J)
    cdef double[::1] lw = np.empty(J)
    cdef double[::1] lw2 = np.empty(J)
    cdef double[::1] g = np.empty(J)
    cdef double[::1] sa = np.empty(nlines)
    cdef double hi, lo, hi2, spread, e, eps = 1.0
    cdef long it = 0
    cdef bint ok
    if not _log_products(I, cnt, A, sa, lw):
        raise ValueError("starting point is infeasible")
    while True:
        hi = lw[0]
        lo = lw[0]
        for p in range(J):
            if lw[p] > hi:
                hi = lw[p]
            if lw[p] < lo:
                lo = lw[p]
        spread = 1.0 - exp(lo - hi)
        if spread <= tol or it >= max_iter:
            break
        for p in range(J):
            g[p] = lw[p] - lo
        e = eps
        while True:
            for p in range(J):
                A2[p] = A[p] - e * g[p]
            ok = _log_products(I, cnt, A2, sa, lw2)
            if ok:
                hi2 = lw2[0]
                for p in range(J):
                    if lw2[p] > hi2:
                        hi2 = lw2[p]
                if hi2 <= hi:
                    break
            e *= 0.5
            if e < 1e-300:
                return list(A), it, spread
        A[:] = A2
        lw[:] = lw2
        eps = min(2.0 * e, 1e3)
        it += 1
    return list(A), it, spread


def waterfill(values):
    cdef Py_ssize_t n = len(values), i
    cdef double[::1] order = np.sort(np.asarray(values, dtype=np.float64))[::-1].copy()
    cdef double acc = 0.0, t = 0.0
    for i in range(n):
        acc += order[i]
        t = (1.0 - acc) / (i + 1)
        if i + 1 == n or t + order[i + 1] <= 0.0:
            break
    return t


def waterfill_weights(line_joints, Py_ssize_t njoints, a):
    cdef double[::1] A = np.asarray(a, dtype=np.float64)
    cdef double[::1] sums = np.zeros(njoints)
    cdef double phi = 0.0, t, w
    weights = []
    for js in line_joints:
        vals = [A[p] for p in js]
        t = waterfill(vals)
        x = []
        for p in js:
            w = t + A[p]
            if w < 0.0:
                w = 0.0
            sums[p] += w
            phi += w * A[p] - 0.5 * w * w
            x.append(w)
        weights.append(x)
    return weights, list(sums), phi
