"""Pure-Python/NumPy kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors every
function here with the same signature and semantics.  All functions return
``(result..., ops)`` where ``ops`` counts the multiply-add style updates of
the innermost loop.

Index convention (shared with the compiled kernels): coefficient row ``j``
belongs to the B-spline on knots ``T[j], ..., T[j + m]``.
"""

import numpy as np


def blossom_rows(T, C, mu, X, m):
    """Run the de Boor triangle for many rows at once.

    Row ``p`` uses the polynomial piece on ``(T[mu[p]], T[mu[p] + 1]]`` and the
    argument ``X[p, l - 1]`` on level ``l``.  With all arguments equal this is
    point evaluation; with distinct fine knots it is the Oslo coefficient.
    Callers guarantee ``m - 1 <= mu[p] <= len(T) - m - 1``.
    """
    mu = np.asarray(mu, dtype=np.int64)
    P = mu.shape[0]
    N = C.shape[1]
    if m == 1 or P == 0:
        return np.array(C[mu], dtype=float).reshape(P, N), 0
    base = mu[:, None] - (m - 1) + np.arange(m)[None, :]
    work = C[base]  # (P, m, N)
    for lev in range(1, m):
        x = X[:, lev - 1]
        for j in range(m - 1, lev - 1, -1):
            J = mu - (m - 1) + j
            a = T[J]
            b = T[J + m - lev]
            w = ((x - a) / (b - a))[:, None]
            work[:, j] = w * work[:, j] + (1.0 - w) * work[:, j - 1]
    ops = P * N * m * (m - 1) // 2
    return work[:, m - 1].copy(), ops


def _cur_coef_slot(i, ncur, s, front, ncoef, periodic):
    """Storage slot of current coefficient ``i``, or -1 for a virtual zero."""
    if periodic:
        i %= ncur
    elif i < 0 or i >= ncur:
        return -1
    return i if i < front else i + s


def remove_knots(T, C, rem, m, period):
    """Remove the knots at original indices ``rem`` (ascending), left to right.

    Uses the right-to-left recursion of inverse knot insertion for every knot,
    which never reuses values produced by the previous removal.  ``period > 0``
    selects cyclic indexing, where ``T`` holds one period of knots and ``C``
    one coefficient per knot.  Out-of-range coefficients of non-periodic
    splines are virtual zeros; out-of-range knots repeat the end knots.
    """
    T = np.array(T, dtype=float)
    C = np.array(C, dtype=float)
    L = T.shape[0]
    ncoef = C.shape[0]
    periodic = period > 0
    s = 0
    front = 0
    ops = 0
    buf_p = np.empty((m, C.shape[1]))
    buf_n = np.empty((m, C.shape[1]))
    for R in rem:
        r = int(R) - s
        Lcur = L - s
        ncur = ncoef - s
        for j in range(front, r + 1):
            T[j] = T[j + s]
            if j < ncur:
                C[j] = C[j + s]
        front = r + 1
        t = T[r]
        Lp = Lcur - 1

        def knot(j):
            # knot j of the reduced sequence
            shift = 0.0
            if periodic:
                q, j = divmod(j, Lp)
                shift = q * period
            elif j < 0:
                return T[0]
            elif j >= Lp:
                return T[Lp + s]
            return (T[j] if j < r else T[j + 1 + s]) + shift

        lo = r - m + 1
        for q in range(m):
            slot = _cur_coef_slot(lo + q, ncur, s, front, ncoef, periodic)
            buf_p[q] = C[slot] if slot >= 0 else 0.0
        # buf index q <-> coefficient lo + q
        if m >= 2:
            buf_n[m - 2] = buf_p[m - 1]
        for i in range(r - 2, lo - 1, -1):
            q = i - lo
            a = knot(i + 1)
            b = knot(i + m)
            buf_n[q] = ((b - a) * buf_p[q + 1] - (t - a) * buf_n[q + 1]) / (b - t)
            ops += C.shape[1]
        s += 1
        front = r
        ncur_new = ncur - 1
        for i in range(lo, r):
            q = i - lo
            if periodic:
                ii = i % ncur_new
            elif i < 0 or i >= ncur_new:
                continue
            else:
                ii = i
            slot = ii if ii < front else ii + s
            C[slot] = buf_n[q]
    Lf = L - s
    nf = ncoef - s
    for j in range(front, Lf):
        T[j] = T[j + s]
    for j in range(front, nf):
        C[j] = C[j + s]
    return T[:Lf].copy(), C[:nf].copy(), ops


def _diff_small(u, xi, q):
    """Differentiate an order-``q`` expansion on knots ``xi`` (1-D)."""
    n = u.shape[0]
    out = np.zeros(n + 1)
    for k in range(n + 1):
        den = xi[k + q - 1] - xi[k]
        if den > 0.0:
            hi = u[k] if k < n else 0.0
            lo = u[k - 1] if k > 0 else 0.0
            out[k] = (q - 1) * (hi - lo) / den
    return out


def _oslo_small(xi, u, w, m):
    """Coefficients on knots ``w`` of the order-``m`` spline ``(xi, u)``."""
    nb = w.shape[0] - m
    out = np.zeros(nb)
    pad = m + 1
    Tc = np.concatenate([np.full(pad, xi[0]), xi, np.full(pad, xi[-1])])
    Cc = np.zeros((Tc.shape[0] - m, 1))
    Cc[pad:pad + u.shape[0], 0] = u
    ops = 0
    for i in range(nb):
        nu = -1
        for v in range(i + m - 1, i - 1, -1):
            if w[v] < w[v + 1]:
                nu = v
                break
        if nu < 0 or w[nu] < xi[0] or w[nu + 1] > xi[-1]:
            continue
        mu = int(np.searchsorted(Tc, w[nu], side="right")) - 1
        X = np.array([[w[i + m - lev] for lev in range(1, m)]]) if m > 1 else np.zeros((1, 0))
        val, o = blossom_rows(Tc, Cc, np.array([mu]), X, m)
        out[i] = val[0, 0]
        ops += o
    return out, ops


def wavelet_windows(XI, pos, W, wptr, m, mt):
    """Fine-grid coefficients and jump of every wavelet (unnormalized).

    ``XI[k]`` holds the ``m + mt + 1`` wavelet knots, ``pos[k]`` the position
    of the inserted knot inside them, and ``W[wptr[k]:wptr[k + 1]]`` the fine
    knots spanning the wavelet.  Returns the flat coefficient array (slot
    ``k`` occupies ``wptr[k] - m*k`` to ``wptr[k + 1] - m*(k + 1)``) and the
    jump of the ``(m-1)``-th derivative at the inserted knot.
    """
    K = XI.shape[0]
    M = m + mt
    nb_total = int(wptr[K]) - m * K
    B = np.zeros(nb_total)
    jumps = np.zeros(K)
    ops = 0
    for k in range(K):
        xi = XI[k]
        u = np.ones(1)
        for q in range(M, m, -1):
            u = _diff_small(u, xi, q)
        w = W[wptr[k]:wptr[k + 1]]
        b, o = _oslo_small(xi, u, w, m)
        ops += o
        B[wptr[k] - m * k:wptr[k + 1] - m * (k + 1)] = b
        rho = u
        for q in range(m, 1, -1):
            rho = _diff_small(rho, xi, q)
        p = int(pos[k])
        jumps[k] = rho[p] - rho[p - 1]
        ops += M * M
    return B, jumps, ops
