"""B-spline algorithms on arbitrary knot sequences.

Conventions used throughout the package:

* knots are a 1-D float array; coefficient row ``k`` belongs to the B-spline
  ``N_{m,k}`` supported on ``[t_k, t_{k+m}]``;
* on a non-periodic knot array of length ``L`` a spline has ``L - m``
  coefficients and vanishes outside ``[t_0, t_{L-1}]``;
* a periodic spline stores one period: ``n`` knots in ``[t_0, t_0 + P)`` and
  ``n`` coefficients, with ``t_{k+n} = t_k + P`` and ``c_{k+n} = c_k``;
* pieces are taken on half-open intervals ``(t_i, t_{i+1}]``, except that the
  left end of the span evaluates with the first nonempty interval.

Coefficients are dense ``(num_basis, N)`` matrices; every recursion acts on
whole rows so ``N`` channels cost one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import opcount
from ._backend import kernels
from .errors import (
    DecreasingKnots,
    ExcessMultiplicity,
    IndexOutOfRange,
    KnotOutOfRange,
    NotARefinement,
    OrderUnderflow,
    OutOfSupport,
    PeriodMismatch,
    SplineWaveError,
)


def validate_knots(knots, order: int, period: float | None = None) -> np.ndarray:
    """Check a knot sequence and return it as a float array.

    Interior knots may repeat at most ``order - 1`` times, the two end knots at
    most ``order`` times.  Periodic sequences must be strictly increasing and
    shorter than one period.
    """
    t = np.asarray(knots, dtype=float).ravel()
    if t.size == 0:
        raise SplineWaveError("knot sequence is empty")
    if not np.all(np.isfinite(t)):
        raise SplineWaveError("knots must be finite")
    if order < 1:
        raise OrderUnderflow(f"order must be >= 1, got {order}")
    bad = np.flatnonzero(np.diff(t) < 0)
    if bad.size:
        raise DecreasingKnots(int(bad[0]) + 1)
    if period is not None:
        if period <= 0:
            raise PeriodMismatch("period must be positive")
        if np.any(np.diff(t) <= 0):
            raise DecreasingKnots(int(np.flatnonzero(np.diff(t) <= 0)[0]) + 1,
                                  "periodic knots must be strictly increasing")
        if t[-1] >= t[0] + period:
            raise PeriodMismatch("periodic knots must lie within one period")
        return t
    starts = np.flatnonzero(np.r_[True, t[1:] != t[:-1]])
    counts = np.diff(np.r_[starts, t.size])
    for j, (i0, c) in enumerate(zip(starts, counts)):
        limit = order if j in (0, len(starts) - 1) else order - 1
        if c > max(limit, 1):
            raise ExcessMultiplicity(int(i0), int(c), max(limit, 1))
    return t


def num_basis(n_knots: int, order: int, period: float | None = None) -> int:
    return n_knots if period is not None else n_knots - order


@dataclass(frozen=True)
class Spline:
    """Vector-valued spline ``sum_k c_k N_{m,k}`` with ``c_k`` in ``R^N``."""

    order: int
    knots: np.ndarray
    coeffs: np.ndarray
    period: float | None = None
    labels: tuple = field(default=(), compare=False)

    def __post_init__(self):
        t = validate_knots(self.knots, self.order, self.period)
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2:
            raise SplineWaveError("coefficients must be a vector or a matrix")
        nb = num_basis(t.size, self.order, self.period)
        if nb < 1 or c.shape[0] != nb:
            raise SplineWaveError(
                f"{t.size} knots of order {self.order} need {nb} coefficient rows, "
                f"got {c.shape[0]}"
            )
        if not np.all(np.isfinite(c)):
            raise SplineWaveError("coefficients must be finite")
        t.setflags(write=False)
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "knots", t)
        object.__setattr__(self, "coeffs", c)

    @property
    def num_basis(self) -> int:
        return self.coeffs.shape[0]

    @property
    def channels(self) -> int:
        return self.coeffs.shape[1]

    @property
    def span(self) -> tuple[float, float]:
        if self.period is not None:
            return float(self.knots[0]), float(self.knots[0] + self.period)
        return float(self.knots[0]), float(self.knots[-1])

    def with_coeffs(self, coeffs) -> Spline:
        return Spline(self.order, self.knots, coeffs, self.period, self.labels)

    def __call__(self, t):
        return eval_spline(self, t)


@dataclass(frozen=True)
class TruncatedPowerCoeffs:
    """``s(t) = sum_k a_k (t - t_k)_+^{m-1}``; row ``k`` pairs with ``knots[k]``."""

    knots: np.ndarray
    a: np.ndarray
    order: int


def extend_knots(knots, period, lo: int, hi: int) -> np.ndarray:
    """Knots with indices ``lo .. hi-1``; periodic indices wrap, others clamp."""
    idx = np.arange(lo, hi)
    if period is None:
        return knots[np.clip(idx, 0, knots.size - 1)]
    n = knots.size
    return knots[idx % n] + (idx // n) * period


def _extend(s: Spline, halo: int):
    """Knots and coefficients padded by ``halo`` on both sides.

    Non-periodic padding repeats the end knots with zero coefficients, which
    leaves the function unchanged; periodic padding wraps.
    """
    t, c, m = s.knots, s.coeffs, s.order
    T = extend_knots(t, s.period, -halo, t.size + halo)
    if s.period is None:
        C = np.zeros((T.size - m, c.shape[1]))
        C[halo:halo + c.shape[0]] = c
    else:
        C = c[np.arange(-halo, t.size + halo - m) % t.size]
    return np.ascontiguousarray(T), np.ascontiguousarray(C)


def eval_spline(s: Spline, t):
    """Evaluate ``s`` by the de Boor recursion.

    Scalar ``t`` returns a length-``N`` vector, array ``t`` a ``(len(t), N)``
    matrix.  Raises :class:`OutOfSupport` outside the knot span of a
    non-periodic spline.
    """
    scalar = np.ndim(t) == 0
    x = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    m = s.order
    halo = m + 1
    lo, hi = s.span
    if s.period is not None:
        x = lo + np.mod(x - lo, s.period)
        x = np.where(x <= lo, lo + s.period, x)
    elif np.any((x < lo) | (x > hi)) or not np.all(np.isfinite(x)):
        bad = x[(x < lo) | (x > hi) | ~np.isfinite(x)][0]
        raise OutOfSupport(f"t={bad!r} outside the spline span [{lo}, {hi}]")
    T, C = _extend(s, halo)
    nu = np.searchsorted(T, x, side="left") - 1
    at_left = x <= lo
    if np.any(at_left):
        nu[at_left] = np.searchsorted(T, lo, side="right") - 1
    X = np.repeat(x[:, None], max(m - 1, 1), axis=1)
    out, ops = kernels().blossom_rows(T, C, nu, X, m)
    opcount.add("eval", ops)
    return out[0] if scalar else out


def _diff_coeffs(knots, C, m, period):
    """Coefficients of the derivative, order ``m - 1`` on the same knots."""
    if period is None:
        L = knots.size
        z = np.zeros((1, C.shape[1]))
        dc = np.diff(C, axis=0, prepend=z, append=z)
        den = knots[m - 1:L] - knots[:L - m + 1]
    else:
        dc = C - np.roll(C, 1, axis=0)
        den = extend_knots(knots, period, m - 1, knots.size + m - 1) - knots
    out = np.zeros_like(dc)
    ok = den > 0
    out[ok] = (m - 1) * dc[ok] / den[ok, None]
    opcount.add("differentiate", 3 * dc.size)
    return out


def differentiate(s: Spline) -> Spline:
    """Derivative as a spline of order ``m - 1`` on the same knots."""
    if s.order < 2:
        raise OrderUnderflow("cannot differentiate a spline of order 1")
    d = _diff_coeffs(s.knots, s.coeffs, s.order, s.period)
    if s.period is None:
        # the derivative may carry (legal) order-(m-1) boundary multiplicity m
        return _unchecked_spline(s.order - 1, s.knots, d, None, s.labels)
    return Spline(s.order - 1, s.knots, d, s.period, s.labels)


def _unchecked_spline(order, knots, coeffs, period, labels=()):
    obj = object.__new__(Spline)
    object.__setattr__(obj, "order", order)
    object.__setattr__(obj, "knots", np.asarray(knots, dtype=float))
    object.__setattr__(obj, "coeffs", np.ascontiguousarray(coeffs, dtype=float))
    object.__setattr__(obj, "period", period)
    object.__setattr__(obj, "labels", labels)
    return obj


def top_jumps(knots, C, m, period) -> np.ndarray:
    """Jumps ``beta_k - beta_{k-1}`` of the ``(m-1)``-th derivative at each knot.

    Equals ``(m-1)! a_k`` in the truncated power representation.
    """
    beta = C
    for q in range(m, 1, -1):
        beta = _diff_coeffs(knots, beta, q, period)
    if period is None:
        z = np.zeros((1, beta.shape[1]))
        return np.diff(beta, axis=0, prepend=z, append=z)
    return beta - np.roll(beta, 1, axis=0)


def truncated_power_coeffs(s: Spline) -> TruncatedPowerCoeffs:
    a = top_jumps(s.knots, s.coeffs, s.order, s.period) / math.factorial(s.order - 1)
    return TruncatedPowerCoeffs(s.knots, a, s.order)


def _check_submultiset(coarse, fine, what="knot"):
    cu, cc = np.unique(coarse, return_counts=True)
    fu, fc = np.unique(fine, return_counts=True)
    pos = np.searchsorted(fu, cu)
    pos = np.minimum(pos, fu.size - 1)
    ok = (fu[pos] == cu) & (fc[pos] >= cc)
    if not np.all(ok):
        raise NotARefinement(f"{what} {cu[~ok][0]!r} of the coarse grid is missing")


def oslo_refine(s: Spline, fine) -> Spline:
    """Represent ``s`` on the refined knot sequence ``fine`` (Oslo algorithm).

    Coefficient ``i`` on the fine grid is the blossom of ``s`` at the ``m - 1``
    interior knots of the fine B-spline ``i``, computed with the triangle of
    the coarse polynomial piece covering a nonempty interval of its support.
    """
    m = s.order
    fine = validate_knots(fine, m, s.period)
    _check_submultiset(s.knots, fine)
    if s.period is not None and (fine[0] < s.knots[0] or fine[-1] >= s.knots[0] + s.period):
        raise NotARefinement("periodic refinement must use the same period window")
    Hc = 2 * m + 2
    Tc, Cc = _extend(s, Hc)
    Hf = m + 1
    nbf = num_basis(fine.size, m, s.period)
    Tf = extend_knots(fine, s.period, -Hf, fine.size + Hf)
    i = np.arange(nbf) + Hf
    ne = np.where(Tf[1:] > Tf[:-1], np.arange(Tf.size - 1), -1)
    last = np.maximum.accumulate(ne)
    v = last[i + m - 1]
    valid = v >= i
    x0 = Tf[v]
    x1 = Tf[np.minimum(v + 1, Tf.size - 1)]
    if s.period is None:
        valid &= (x0 >= s.knots[0]) & (x1 <= s.knots[-1])
    mu = np.searchsorted(Tc, x0, side="right") - 1
    lev = np.arange(1, max(m, 2))
    X = Tf[np.minimum(i[:, None] + m - lev[None, :], Tf.size - 1)]
    out = np.zeros((nbf, s.channels))
    if np.any(valid):
        vals, ops = kernels().blossom_rows(
            Tc, Cc, mu[valid], np.ascontiguousarray(X[valid]), m)
        out[valid] = vals
        opcount.add("oslo", ops)
    if s.period is None:
        return Spline(m, fine, out, None, s.labels)
    return Spline(m, fine, out, s.period, s.labels)


def boehm_insert(s: Spline, t: float) -> Spline:
    """Insert one knot by Boehm's algorithm.

    With ``tau_j <= t < tau_{j+1}`` the coefficients ``i <= j-m+1`` stay,
    ``j-m+2 <= i <= j`` become convex combinations of their neighbors, and the
    rest shift by one.
    """
    if s.period is not None:
        k = validate_knots(s.knots, s.order, s.period)
        x = s.knots[0] + (t - s.knots[0]) % s.period
        return oslo_refine(s, np.sort(np.r_[k, x]))
    tau, c, m = s.knots, s.coeffs, s.order
    if not tau[0] < t < tau[-1]:
        raise KnotOutOfRange(f"t={t!r} not strictly inside [{tau[0]}, {tau[-1]}]")
    j = int(np.searchsorted(tau, t, side="right")) - 1
    nb = c.shape[0]

    def coef(i):
        return c[i] if 0 <= i < nb else np.zeros(c.shape[1])

    new = np.empty((nb + 1, c.shape[1]))
    for i in range(nb + 1):
        if i <= j - m + 1:
            new[i] = coef(i)
        elif i <= j:
            a = (t - tau[i]) / (tau[i + m - 1] - tau[i])
            new[i] = (1.0 - a) * coef(i - 1) + a * coef(i)
        else:
            new[i] = coef(i - 1)
    return Spline(m, np.insert(tau, j + 1, t), new, None, s.labels)


def _check_removal_index(s: Spline, knot_index: int):
    n = s.knots.size
    if s.period is None:
        if not 0 < knot_index < n - 1:
            raise IndexOutOfRange(f"knot index {knot_index} is not interior (0 < i < {n - 1})")
    elif not 0 <= knot_index < n:
        raise IndexOutOfRange(f"knot index {knot_index} outside 0..{n - 1}")


def remove_knot_backward(s: Spline, knot_index: int) -> Spline:
    """Remove one knot with the stable right-to-left recursion.

    The caller is responsible for ``s`` being representable without the knot;
    otherwise the result is a different spline and no error is raised.
    """
    _check_removal_index(s, knot_index)
    T, C, ops = kernels().remove_knots(
        s.knots, s.coeffs, np.array([knot_index]), s.order, s.period or 0.0)
    opcount.add("remove", ops)
    return Spline(s.order, T, C, s.period, s.labels)


def remove_knot_forward(s: Spline, knot_index: int) -> Spline:
    """Left-to-right variant of knot removal.  Numerically unstable in chains."""
    _check_removal_index(s, knot_index)
    if s.period is not None:
        raise SplineWaveError("forward removal is provided for non-periodic splines only")
    knots, coeffs = remove_step(list(s.knots), [list(r) for r in s.coeffs], knot_index,
                                s.order, backward=False)
    return Spline(s.order, np.array(knots, dtype=float), np.array(coeffs, dtype=float),
                  None, s.labels)


def remove_step(knots, coeffs, r, m, backward=True):
    """One knot removal on plain sequences; works for any field (e.g. Fraction).

    ``coeffs`` is a list of rows.  Returns the reduced ``(knots, coeffs)``.
    """
    t = knots[r]
    kp = knots[:r] + knots[r + 1:]
    nb = len(coeffs)
    width = len(coeffs[0]) if nb else 1
    zero = [t * 0] * width

    def th(j):
        return kp[min(max(j, 0), len(kp) - 1)]

    def p(i):
        return coeffs[i] if 0 <= i < nb else zero

    val = {r - 1: p(r), r - m: p(r - m)}
    if backward:
        for i in range(r - 2, r - m, -1):
            a, b = th(i + 1), th(i + m)
            val[i] = [((b - a) * x - (t - a) * y) / (b - t)
                      for x, y in zip(p(i + 1), val[i + 1])]
    else:
        for i in range(r - m + 1, r - 1):
            a, b = th(i), th(i + m - 1)
            val[i] = [((b - a) * x - (b - t) * y) / (t - a)
                      for x, y in zip(p(i), val[i - 1])]
    out = []
    for i in range(nb - 1):
        if i <= r - m:
            out.append(list(p(i)))
        elif i >= r - 1:
            out.append(list(p(i + 1)))
        else:
            out.append(list(val[i]))
    return kp, out


def greville(knots, order: int, period: float | None = None) -> np.ndarray:
    """Knot averages ``(t_{k+1} + ... + t_{k+m-1}) / (m-1)``."""
    m = order
    nb = num_basis(len(knots), m, period)
    if m == 1:
        T = extend_knots(np.asarray(knots, float), period, 0, nb + 1)
        return 0.5 * (T[:-1] + T[1:])
    T = extend_knots(np.asarray(knots, float), period, 0, nb + m)
    # windowed sums stay exact at repeated end knots, unlike differenced cumsums
    win = np.lib.stride_tricks.sliding_window_view(T[1:nb + m - 1], m - 1)
    g = win.sum(axis=1) / (m - 1)
    return np.clip(g, T[1:nb + 1], T[m - 1:nb + m - 1])
