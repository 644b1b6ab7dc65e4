"""Nonuniform biorthogonal spline wavelets.

The wavelet attached to an inserted knot is the ``mt``-th derivative of the
order ``m + mt`` B-spline on ``m + mt + 1`` knots: the ``l1`` coarse knots at
and left of the new knot, the new knot itself and ``l2`` coarse knots on its
right, ``l1 = floor((m + mt)/2)``, ``l2 = ceil((m + mt)/2)``.  Near the ends of
an interval grid that window is shifted so that it never holds more than
``m - 1`` copies of a boundary knot.

Per wavelet we store its fine-grid B-spline coefficients ``b`` (normalized so
``max |b| = 1``) and the jump ``gamma`` of its ``(m-1)``-th derivative at the
new knot, divided by ``(m-1)!``.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np

from . import opcount
from ._backend import kernels
from .bspline import Spline, extend_knots, num_basis, validate_knots
from .errors import (
    DegenerateKnots,
    GridTooSmall,
    IndexOutOfRange,
    NotNested,
    PeriodMismatch,
    SplineWaveError,
    ZeroGamma,
)

MODES = ("line", "interval", "periodic")
_ALIASES = {"whole-line": "line", "whole_line": "line"}


@dataclass(frozen=True)
class WaveletParams:
    m: int = 4
    m_tilde: int = 2
    boundary_mode: str = "line"

    def __post_init__(self):
        mode = _ALIASES.get(self.boundary_mode, self.boundary_mode)
        if mode not in MODES:
            raise SplineWaveError(f"unknown boundary mode {self.boundary_mode!r}")
        object.__setattr__(self, "boundary_mode", mode)
        if self.m < 1 or self.m_tilde < 1:
            raise SplineWaveError("need m >= 1 and m_tilde >= 1")
        if mode == "interval" and self.m < 2:
            raise SplineWaveError("interval wavelets need m >= 2")

    @property
    def l1(self) -> int:
        return (self.m + self.m_tilde) // 2

    @property
    def l2(self) -> int:
        return (self.m + self.m_tilde + 1) // 2

    @property
    def order(self) -> int:
        return self.m + self.m_tilde


@dataclass(frozen=True)
class WaveletSlot:
    k: int
    xi: np.ndarray
    position: int
    l1: int
    l2: int
    b: np.ndarray
    b_start: int
    gamma: float
    alpha: float
    new_knot: float

    @property
    def support(self) -> tuple[float, float]:
        return float(self.xi[0]), float(self.xi[-1])


class _SlotTable:
    """All wavelets of one level, built in one kernel call."""

    def __init__(self, level: LevelGrids):
        p = level.params
        m, mt = p.m, p.m_tilde
        K = level.num_wavelets
        w0 = level.window_start
        w1 = level.window_stop
        wptr = np.zeros(K + 1, dtype=np.int64)
        wptr[1:] = np.cumsum(w1 - w0 + 1)
        W = np.concatenate([extend_knots(level.fine, level.period, a, b + 1)
                            for a, b in zip(w0, w1)]) if K else np.zeros(0)
        XI = np.ascontiguousarray(level.xi) if K else np.zeros((0, p.order + 1))
        B, jumps, ops = kernels().wavelet_windows(
            XI, level.xi_pos, np.ascontiguousarray(W), wptr, m, mt)
        opcount.add("wavelets", ops)
        bptr = wptr - m * np.arange(K + 1)
        owner = np.repeat(np.arange(K), np.diff(bptr))
        peak = np.zeros(K)
        np.maximum.at(peak, owner, np.abs(B))
        if K and (np.any(peak == 0) or not np.all(np.isfinite(B))):
            raise DegenerateKnots("wavelet with vanishing fine-grid coefficients")
        alpha = 1.0 / peak if K else peak
        # divide rather than scale by alpha so the peak is exactly one
        B = B / peak[owner]
        jumps = jumps / peak
        bad = ~np.isfinite(jumps) | (jumps == 0)
        if np.any(bad):
            raise ZeroGamma(f"wavelet {int(np.flatnonzero(bad)[0])} has no jump at its knot")
        self.B = B
        self.bptr = bptr
        self.owner = owner
        self.b_start = w0.astype(np.int64)
        self.jumps = jumps
        self.alpha = alpha
        nbf = num_basis(level.fine.size, m, level.period)
        idx = self.b_start[owner] + (np.arange(B.size) - bptr[owner])
        self.index = idx % nbf if level.period is not None else idx
        self.num_fine = nbf

    def add_to(self, C: np.ndarray, d: np.ndarray, sign: float = 1.0, mask=None) -> np.ndarray:
        """``C + sign * sum_k d_k b_k`` over the wavelets in ``mask``."""
        w = self.B if mask is None else self.B * mask[self.owner]
        out = np.array(C, dtype=float, copy=True)
        for ch in range(out.shape[1]):
            out[:, ch] += sign * np.bincount(
                self.index, weights=w * d[self.owner, ch], minlength=self.num_fine)
        opcount.add("combine", 2 * self.B.size * out.shape[1])
        return out


@dataclass
class LevelGrids:
    """A coarse grid, a refinement of it, and the wavelet bookkeeping.

    Knot indices are positions in ``fine``/``coarse``; for periodic grids
    larger or negative indices wrap with the period.
    """

    coarse: np.ndarray
    fine: np.ndarray
    params: WaveletParams
    period: float | None
    coarse_pos: np.ndarray
    new_pos: np.ndarray
    left: np.ndarray
    xi_start: np.ndarray
    xi_pos: np.ndarray
    xi: np.ndarray
    window_start: np.ndarray
    window_stop: np.ndarray
    misfit: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    _table: _SlotTable | None = field(default=None, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    @property
    def num_wavelets(self) -> int:
        return int(self.new_pos.size)

    @property
    def new_knots(self) -> np.ndarray:
        return self.fine[self.new_pos]

    @property
    def window(self) -> tuple[int, int]:
        """Coarse indices ``(n1, n2)`` bracketing the refined region."""
        if not self.num_wavelets:
            return (0, 0)
        return int(self.left[0]), int(self.left[-1]) + 1

    def check_fit(self, k: int | None = None):
        """Raise :class:`GridTooSmall` if a whole-line wavelet leaves the grid."""
        bad = self.misfit if k is None else self.misfit[self.misfit == k]
        if bad.size:
            raise GridTooSmall(
                f"new knot {self.fine[self.new_pos[bad[0]]]!r} is too close to the grid end "
                f"for a whole-line wavelet; it needs {self.params.l1} coarse knots at or left "
                f"of it and {self.params.l2} right of it")

    def slots(self) -> _SlotTable:
        self.check_fit()
        if self._table is None:
            with self._lock:
                if self._table is None:
                    self._table = _SlotTable(self)
        return self._table


def _clamped(t: np.ndarray, m: int) -> bool:
    return t.size >= 2 * m and np.all(t[:m] == t[0]) and np.all(t[-m:] == t[-1]) \
        and t[m] > t[0] and t[-m - 1] < t[-1]


def build_level(coarse, fine, params: WaveletParams, period: float | None = None) -> LevelGrids:
    """Identify the inserted knots of ``fine`` over ``coarse`` and their wavelets."""
    m, M = params.m, params.order
    mode = params.boundary_mode
    if (mode == "periodic") != (period is not None):
        raise PeriodMismatch("periodic mode needs a period, other modes must not have one")
    coarse = validate_knots(coarse, m, period)
    fine = validate_knots(fine, m, period)
    if mode == "interval" and not (_clamped(coarse, m) and _clamped(fine, m)):
        raise SplineWaveError(f"interval grids need exactly {m}-fold end knots")
    if mode == "periodic":
        if fine.size < 2 * M:
            raise GridTooSmall(
                f"periodic grid with {fine.size} knots is below 2(m+m_tilde)={2 * M}")
        if coarse[0] != fine[0]:
            raise NotNested("periodic grids must share their first knot")
    # position of every coarse knot (with multiplicity) inside fine
    coarse_pos = np.empty(coarse.size, dtype=np.int64)
    j = 0
    for i, x in enumerate(coarse):
        while j < fine.size and fine[j] != x:
            j += 1
        if j == fine.size:
            raise NotNested(f"coarse knot {x!r} (index {i}) is not in the fine grid")
        coarse_pos[i] = j
        j += 1
    is_new = np.ones(fine.size, dtype=bool)
    is_new[coarse_pos] = False
    new_pos = np.flatnonzero(is_new)
    Fx = extend_knots(fine, period, -1, fine.size + 1)
    for r in new_pos:
        if not Fx[r] < Fx[r + 1] < Fx[r + 2]:
            raise NotNested(f"inserted knot at fine index {r} is not a simple interior knot")
    left = np.searchsorted(coarse_pos, new_pos) - 1
    if mode != "periodic" and np.any(left < 0):
        raise NotNested("inserted knot left of the coarse grid")
    if left.size > 1 and np.any(np.diff(left) == 0):
        i = int(np.flatnonzero(np.diff(left) == 0)[0])
        raise NotNested(f"coarse interval {left[i]} receives more than one new knot")
    nc = coarse.size
    s = left + 1 - params.l1
    e = left + params.l2
    misfit = np.zeros(left.size, dtype=bool)
    if mode == "line":
        misfit = (s < 0) | (e > nc - 1)
        s = np.clip(s, 0, nc - 1)
        e = np.clip(e, 0, nc - 1)
    elif mode == "interval":
        lo, hi = 1, nc - 2
        s = np.where(s < lo, lo, s)
        e = s + M - 1
        over = e > hi
        e = np.where(over, hi, e)
        s = np.where(over, hi - M + 1, s)
        if left.size and (np.any(s < lo) or np.any(s > left) or np.any(e < left + 1)):
            raise GridTooSmall("interval grid too small for the requested wavelets")
    K = new_pos.size
    xi = np.empty((K, M + 1))
    xi_pos = (left - s + 1).astype(np.int64)
    for k in range(K):
        if misfit[k]:
            xi[k] = np.nan
            continue
        cw = extend_knots(coarse, period, int(s[k]), int(e[k]) + 1)
        xi[k] = np.insert(cw, xi_pos[k], fine[new_pos[k]])
    if K and np.any(xi[~misfit, -1] <= xi[~misfit, 0]):
        raise DegenerateKnots("wavelet knot window has zero length")

    def fine_index(cidx):
        if period is None:
            return coarse_pos[cidx]
        q, r = np.divmod(cidx, nc)
        return coarse_pos[r] + q * fine.size

    return LevelGrids(
        coarse=coarse, fine=fine, params=params, period=period,
        coarse_pos=coarse_pos, new_pos=new_pos, left=left.astype(np.int64),
        xi_start=s.astype(np.int64), xi_pos=xi_pos, xi=xi,
        window_start=np.asarray(fine_index(s), dtype=np.int64),
        window_stop=np.asarray(fine_index(e), dtype=np.int64),
        misfit=np.flatnonzero(misfit),
    )


def wavelet_knots(level: LevelGrids, k: int, params: WaveletParams | None = None) -> np.ndarray:
    """The ``m + mt + 1`` knots of wavelet ``k``."""
    if not 0 <= k < level.num_wavelets:
        raise IndexOutOfRange(f"wavelet index {k} outside 0..{level.num_wavelets - 1}")
    level.check_fit(k)
    return level.xi[k].copy()


def build_wavelet_slot(level: LevelGrids, k: int, params: WaveletParams | None = None) -> WaveletSlot:
    if not 0 <= k < level.num_wavelets:
        raise IndexOutOfRange(f"wavelet index {k} outside 0..{level.num_wavelets - 1}")
    tab = level.slots()
    p = level.params
    b = tab.B[tab.bptr[k]:tab.bptr[k + 1]].copy()
    return WaveletSlot(
        k=k, xi=level.xi[k].copy(), position=int(level.xi_pos[k]), l1=p.l1, l2=p.l2,
        b=b, b_start=int(tab.b_start[k]),
        gamma=float(tab.jumps[k]) / math.factorial(p.m - 1),
        alpha=float(tab.alpha[k]), new_knot=float(level.fine[level.new_pos[k]]),
    )


def wavelet_spline(slot: WaveletSlot, level: LevelGrids) -> Spline:
    """The wavelet as a spline on the fine grid."""
    nbf = num_basis(level.fine.size, level.params.m, level.period)
    c = np.zeros(nbf)
    idx = slot.b_start + np.arange(slot.b.size)
    if level.period is not None:
        idx %= nbf
    np.add.at(c, idx, slot.b)
    return Spline(level.params.m, level.fine, c, level.period)


def eval_wavelet(slot: WaveletSlot, level: LevelGrids, params=None, t=None):
    if t is None:
        t, params = params, None
    out = wavelet_spline(slot, level)(t)
    return out[..., 0]


# -- grid chains --------------------------------------------------------------

def dyadic_coarsen(fine) -> np.ndarray:
    """Keep the knots at even positions; an even count also keeps the last knot."""
    t = np.asarray(fine, dtype=float)
    if t.size < 2:
        raise GridTooSmall("need at least two knots")
    keep = t[::2]
    if t.size % 2 == 0:
        keep = np.r_[keep, t[-1]]
    return keep


def line_coarsen(fine, params: WaveletParams) -> np.ndarray:
    """Dyadic coarsening restricted to knots whose wavelet fits inside the grid."""
    t = np.asarray(fine, dtype=float)
    L = t.size
    odd = np.arange(1, L - 1, 2)
    k = (odd - 1) // 2
    removable = (k >= params.l1 - 1) & (2 * (k + params.l2) <= L - 1)
    keep = np.ones(L, dtype=bool)
    keep[odd[removable]] = False
    return t[keep]


def interval_coarsen(fine, m: int) -> np.ndarray:
    """``n_j = ceil(n_{j+1} / 2)`` interval coarsening of a clamped grid."""
    t = np.asarray(fine, dtype=float)
    interior = t[m:t.size - m]  # t_1 .. t_{n-1}
    n = interior.size + 1
    if n < 2:
        raise GridTooSmall("interval grid has no interior knot to remove")
    nj = (n + 1) // 2
    kept = interior[1::2][:nj - 1]  # fine t_2, t_4, ..., t_{2(nj-1)}
    return np.concatenate([t[:m], kept, t[t.size - m:]])


def periodic_coarsen(fine) -> np.ndarray:
    return np.asarray(fine, dtype=float)[::2].copy()


def coarsen_grid(fine, params: WaveletParams) -> np.ndarray:
    mode = params.boundary_mode
    if mode == "line":
        return line_coarsen(fine, params)
    if mode == "interval":
        return interval_coarsen(fine, params.m)
    return periodic_coarsen(fine)


def grid_chain(finest, levels: int, params: WaveletParams) -> list[np.ndarray]:
    """``levels + 1`` nested grids, coarsest first, ending with ``finest``."""
    grids = [np.asarray(finest, dtype=float)]
    for _ in range(levels):
        nxt = coarsen_grid(grids[-1], params)
        if nxt.size == grids[-1].size:
            raise GridTooSmall(f"grid of {grids[-1].size} knots cannot be coarsened further")
        grids.append(nxt)
    return grids[::-1]
