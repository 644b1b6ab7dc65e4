# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np

from libc.stdlib cimport malloc, free


cdef inline void _triangle(const double[::1] T, double* work, Py_ssize_t N,
                           Py_ssize_t mu, const double* x, int m) noexcept nogil:
    # work holds m rows of N values: coefficients mu-m+1 .. mu
    cdef int lev, j
    cdef Py_ssize_t J, c
    cdef double a, b, w
    for lev in range(1, m):
        for j in range(m - 1, lev - 1, -1):
            J = mu - (m - 1) + j
            a = T[J]
            b = T[J + m - lev]
            w = (x[lev - 1] - a) / (b - a)
            for c in range(N):
                work[j * N + c] = w * work[j * N + c] + (1.0 - w) * work[(j - 1) * N + c]


def blossom_rows(const double[::1] T, const double[:, ::1] C, mu_in, X_in, int m):
    cdef long long[::1] mu = np.ascontiguousarray(mu_in, dtype=np.int64)
    cdef Py_ssize_t P = mu.shape[0], N = C.shape[1]
    out = np.zeros((P, N))
    cdef double[:, ::1] o = out
    if P == 0:
        return out, 0
    cdef double[:, ::1] X = np.ascontiguousarray(
        X_in if m > 1 else np.zeros((P, 1)), dtype=np.float64)
    cdef double* work = <double*> malloc(m * N * sizeof(double))
    cdef double* xs = <double*> malloc(m * sizeof(double))
    cdef Py_ssize_t p, r, c, v
    cdef int lev
    try:
        for p in range(P):
            v = mu[p]
            for r in range(m):
                for c in range(N):
                    work[r * N + c] = C[v - m + 1 + r, c]
            for lev in range(m - 1):
                xs[lev] = X[p, lev]
            _triangle(T, work, N, v, xs, m)
            for c in range(N):
                o[p, c] = work[(m - 1) * N + c]
    finally:
        free(work)
        free(xs)
    return out, P * N * m * (m - 1) // 2


cdef inline double _knot(double[::1] T, Py_ssize_t j, Py_ssize_t r, Py_ssize_t s,
                         Py_ssize_t Lp, double period, bint periodic) noexcept nogil:
    cdef Py_ssize_t q
    cdef double shift = 0.0
    if periodic:
        q = j // Lp
        if j - q * Lp < 0:
            q -= 1
        j -= q * Lp
        shift = q * period
    elif j < 0:
        return T[0]
    elif j >= Lp:
        return T[Lp + s]
    if j < r:
        return T[j] + shift
    return T[j + 1 + s] + shift


cdef inline Py_ssize_t _pmod(Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    i = i % n
    if i < 0:
        i += n
    return i


def remove_knots(T_in, C_in, rem_in, int m, double period):
    cdef double[::1] T = np.array(T_in, dtype=np.float64)
    Carr = np.array(C_in, dtype=np.float64, order="C")
    cdef double[:, ::1] C = Carr
    cdef long long[::1] rem = np.ascontiguousarray(rem_in, dtype=np.int64)
    cdef Py_ssize_t L = T.shape[0], ncoef = C.shape[0], N = C.shape[1]
    cdef bint periodic = period > 0
    cdef Py_ssize_t s = 0, front = 0, r, Lp, ncur, ncur_new, j, i, q, lo, slot, ii, c, k
    cdef long long ops = 0
    cdef double t, a, b
    cdef double* bp = <double*> malloc(m * N * sizeof(double))
    cdef double* bn = <double*> malloc(m * N * sizeof(double))
    try:
        for k in range(rem.shape[0]):
            r = rem[k] - s
            ncur = ncoef - s
            for j in range(front, r + 1):
                T[j] = T[j + s]
                if j < ncur:
                    for c in range(N):
                        C[j, c] = C[j + s, c]
            front = r + 1
            t = T[r]
            Lp = L - s - 1
            lo = r - m + 1
            for q in range(m):
                i = lo + q
                if periodic:
                    i = _pmod(i, ncur)
                    slot = i if i < front else i + s
                elif i < 0 or i >= ncur:
                    slot = -1
                else:
                    slot = i if i < front else i + s
                for c in range(N):
                    bp[q * N + c] = C[slot, c] if slot >= 0 else 0.0
            if m >= 2:
                for c in range(N):
                    bn[(m - 2) * N + c] = bp[(m - 1) * N + c]
            for i in range(r - 2, lo - 1, -1):
                q = i - lo
                a = _knot(T, i + 1, r, s, Lp, period, periodic)
                b = _knot(T, i + m, r, s, Lp, period, periodic)
                for c in range(N):
                    bn[q * N + c] = ((b - a) * bp[(q + 1) * N + c]
                                     - (t - a) * bn[(q + 1) * N + c]) / (b - t)
                ops += N
            s += 1
            front = r
            ncur_new = ncur - 1
            for i in range(lo, r):
                q = i - lo
                if periodic:
                    ii = _pmod(i, ncur_new)
                elif i < 0 or i >= ncur_new:
                    continue
                else:
                    ii = i
                slot = ii if ii < front else ii + s
                for c in range(N):
                    C[slot, c] = bn[q * N + c]
        for j in range(front, L - s):
            T[j] = T[j + s]
        for j in range(front, ncoef - s):
            for c in range(N):
                C[j, c] = C[j + s, c]
    finally:
        free(bp)
        free(bn)
    Tout = np.asarray(T)[:L - s].copy()
    Cout = Carr[:ncoef - s].copy()
    return Tout, Cout, ops


cdef int _diff_small(double* u, int n, const double* xi, int q, double* out) noexcept nogil:
    cdef int k
    cdef double den, hi, lo
    for k in range(n + 1):
        den = xi[k + q - 1] - xi[k]
        out[k] = 0.0
        if den > 0.0:
            hi = u[k] if k < n else 0.0
            lo = u[k - 1] if k > 0 else 0.0
            out[k] = (q - 1) * (hi - lo) / den
    return n + 1


def wavelet_windows(const double[:, ::1] XI, pos_in, const double[::1] W, wptr_in,
                    int m, int mt):
    cdef long long[::1] pos = np.ascontiguousarray(pos_in, dtype=np.int64)
    cdef long long[::1] wptr = np.ascontiguousarray(wptr_in, dtype=np.int64)
    cdef Py_ssize_t K = XI.shape[0]
    cdef int M = m + mt
    cdef int pad = m + 1
    cdef int ntc = M + 1 + 2 * pad
    B_arr = np.zeros(wptr[K] - m * K)
    J_arr = np.zeros(K)
    cdef double[::1] B = B_arr
    cdef double[::1] jumps = J_arr
    cdef double* u = <double*> malloc((M + 2) * sizeof(double))
    cdef double* v = <double*> malloc((M + 2) * sizeof(double))
    cdef double* tc = <double*> malloc(ntc * sizeof(double))
    cdef double* cc = <double*> malloc(ntc * sizeof(double))
    cdef double* work = <double*> malloc(m * sizeof(double))
    cdef const double* xi
    cdef Py_ssize_t k, i, nb, w0, nu, mu, vv, boff
    cdef int n, q, j, lev, p, r, J
    cdef long long ops = 0
    cdef double a, b, wt, x
    try:
        for k in range(K):
            xi = &XI[k, 0]
            u[0] = 1.0
            n = 1
            for q in range(M, m, -1):
                n = _diff_small(u, n, xi, q, v)
                for j in range(n):
                    u[j] = v[j]
            # padded copy of the wavelet knots and order-m coefficients
            for j in range(ntc):
                if j < pad:
                    tc[j] = xi[0]
                elif j < pad + M + 1:
                    tc[j] = xi[j - pad]
                else:
                    tc[j] = xi[M]
                cc[j] = 0.0
            for j in range(n):
                cc[pad + j] = u[j]
            w0 = wptr[k]
            nb = wptr[k + 1] - w0 - m
            boff = w0 - m * k
            for i in range(nb):
                nu = -1
                for vv in range(i + m - 1, i - 1, -1):
                    if W[w0 + vv] < W[w0 + vv + 1]:
                        nu = vv
                        break
                if nu < 0 or W[w0 + nu] < xi[0] or W[w0 + nu + 1] > xi[M]:
                    continue
                # interval of the padded wavelet knots containing the fine interval
                mu = 0
                x = W[w0 + nu]
                for j in range(ntc):
                    if tc[j] <= x:
                        mu = j
                for r in range(m):
                    work[r] = cc[mu - m + 1 + r]
                for lev in range(1, m):
                    x = W[w0 + i + m - lev]
                    for j in range(m - 1, lev - 1, -1):
                        J = mu - (m - 1) + j
                        a = tc[J]
                        b = tc[J + m - lev]
                        wt = (x - a) / (b - a)
                        work[j] = wt * work[j] + (1.0 - wt) * work[j - 1]
                ops += m * (m - 1) // 2
                B[boff + i] = work[m - 1]
            for q in range(m, 1, -1):
                n = _diff_small(u, n, xi, q, v)
                for j in range(n):
                    u[j] = v[j]
            p = pos[k]
            jumps[k] = u[p] - u[p - 1]
            ops += M * M
    finally:
        free(u)
        free(v)
        free(tc)
        free(cc)
        free(work)
    return B_arr, J_arr, ops
