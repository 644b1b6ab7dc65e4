"""Grid adaptation driven by wavelet coefficients.

``coarsen`` drops the knots whose details are below a threshold and keeps
the others, with the sup-norm deviation bounded by ``(m + mt - 1) * eps``
per pass.  ``refine_loop`` goes the other way: it inserts knots next to large
details and re-approximates until successive approximations agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np
from scipy.interpolate import BSpline
from scipy.linalg import LinAlgError, solve, solve_banded

from ._backend import kernels
from .bspline import Spline, eval_spline, greville, oslo_refine
from .errors import GridTooSmall, NoConvergence, SingularSystem, SplineWaveError
from .transform import wavelet_coefficients
from .wavelets import LevelGrids, WaveletParams, build_level, coarsen_grid
from . import opcount

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoarsenReport:
    result: Spline
    removed_knots: np.ndarray
    kept_details: list
    error_bound: float
    threshold: float
    passes: int

    @property
    def knots_before(self) -> int:
        return self.result.knots.size + self.removed_knots.size


def _detail_size(d: np.ndarray) -> np.ndarray:
    return np.abs(d).max(axis=1) if d.size else np.zeros(d.shape[0])


def coarsen(s: Spline, level: LevelGrids, params: WaveletParams | None = None,
            epsilon: float = 0.0) -> CoarsenReport:
    """Remove every new knot of ``level`` whose detail satisfies ``|d_k| < epsilon``.

    For several channels ``|d_k|`` is the largest magnitude over channels, so
    a knot stays if any channel needs it.
    """
    if epsilon < 0:
        raise SplineWaveError("threshold must be nonnegative")
    p = level.params
    d = np.asarray(wavelet_coefficients(s, level, params))
    drop = _detail_size(d) < epsilon
    tab = level.slots()
    c = tab.add_to(s.coeffs, d, -1.0, mask=drop.astype(float))
    T, cc, ops = kernels().remove_knots(level.fine, c, level.new_pos[drop], p.m,
                                        level.period or 0.0)
    opcount.add("remove", ops)
    kept = [(int(k), d[k].copy()) for k in np.flatnonzero(~drop)]
    return CoarsenReport(
        result=Spline(p.m, T, cc, level.period, s.labels),
        removed_knots=level.fine[level.new_pos[drop]].copy(),
        kept_details=kept,
        error_bound=(p.m + p.m_tilde - 1) * epsilon,
        threshold=epsilon,
        passes=1,
    )


def coarsen_repeated(s: Spline, params: WaveletParams, epsilon: float, passes: int,
                     coarsen_fn: Callable | None = None) -> CoarsenReport:
    """Apply :func:`coarsen` ``passes`` times, each against a coarsening of the current grid.

    Stops early once the grid cannot be coarsened any further; the reported
    bound counts only the passes performed.
    """
    coarsen_fn = coarsen_fn or (lambda t: coarsen_grid(t, params))
    removed = []
    cur = s
    done = 0
    kept: list = []
    for _ in range(passes):
        try:
            coarse = coarsen_fn(cur.knots)
            if coarse.size == cur.knots.size:
                break
            level = build_level(coarse, cur.knots, params, cur.period)
        except GridTooSmall:
            break
        rep = coarsen(cur, level, params, epsilon)
        done += 1
        removed.append(rep.removed_knots)
        kept = rep.kept_details
        cur = rep.result
        if rep.removed_knots.size == 0:
            break
    return CoarsenReport(
        result=cur,
        removed_knots=np.concatenate(removed) if removed else np.zeros(0),
        kept_details=kept,
        error_bound=(params.m + params.m_tilde - 1) * done * epsilon,
        threshold=epsilon,
        passes=done,
    )


def refine_grid(level: LevelGrids, details, alpha: float, rel_floor: float = 1e-13) -> np.ndarray:
    """Insert ``n_k = floor(|d_k| alpha / max|d|)`` equidistant knots on both sides of each new knot.

    ``details`` has one row (or value) per wavelet.  Details all below
    ``rel_floor`` times the fine coefficient scale count as zero and leave the
    grid unchanged.
    """
    d = np.asarray(details, dtype=float)
    mag = _detail_size(d.reshape(d.shape[0], -1))
    fine = level.fine
    top = mag.max() if mag.size else 0.0
    if top <= rel_floor:
        return fine.copy()
    nk = np.floor(mag * alpha / top).astype(int)
    ext = np.r_[fine, fine[0] + level.period] if level.period is not None else fine
    extra = []
    for r, n in zip(level.new_pos, nk):
        if n <= 0:
            continue
        for a, b in ((ext[r - 1], ext[r]), (ext[r], ext[r + 1])):
            if b > a:
                extra.append(a + (b - a) * np.arange(1, n + 1) / (n + 1))
    if not extra:
        return fine.copy()
    return np.sort(np.concatenate([fine] + extra))


# -- approximation methods ----------------------------------------------------

class ApproximationMethod(Protocol):
    def __call__(self, f: Callable, grid: np.ndarray, initial_guess: Spline | None,
                 tolerance: float) -> Spline: ...


def interpolate(f: Callable, grid, order: int, period: float | None = None) -> Spline:
    """Spline interpolant of ``f`` at the Greville sites of ``grid``."""
    t = np.asarray(grid, dtype=float)
    m = order
    x = greville(t, m, period)
    y = np.asarray(f(x), dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    try:
        if period is None:
            c = _banded_interp(t, m, x, y)
        else:
            eye = np.eye(t.size)
            A = eval_spline(Spline(m, t, eye, period), x)
            c = solve(A, y)
    except LinAlgError as exc:
        raise SingularSystem(f"interpolation system is singular: {exc}") from None
    if not np.all(np.isfinite(c)):
        raise SingularSystem("interpolation system is singular")
    return Spline(m, t, c, period)


def _banded_interp(t, m, x, y):
    # padding the ends to multiplicity m leaves the original basis untouched
    left = m - int(np.sum(t == t[0]))
    right = m - int(np.sum(t == t[-1]))
    T = np.r_[np.full(left, t[0]), t, np.full(right, t[-1])]
    nb = t.size - m
    A = BSpline.design_matrix(x, T, m - 1).tocoo()
    j = A.col - left
    keep = (j >= 0) & (j < nb)
    i, j, v = A.row[keep], j[keep], A.data[keep]
    nz = v != 0
    i, j, v = i[nz], j[nz], v[nz]
    lo = int(max(0, (i - j).max())) if i.size else 0
    up = int(max(0, (j - i).max())) if i.size else 0
    ab = np.zeros((lo + up + 1, nb))
    ab[up + i - j, j] = v
    return solve_banded((lo, up), ab, y)


@dataclass(frozen=True)
class InterpolationMethod:
    """Greville-site interpolation as an :class:`ApproximationMethod` (ignores the guess)."""

    order: int
    period: float | None = None

    def __call__(self, f, grid, initial_guess=None, tolerance=0.0) -> Spline:
        return interpolate(f, grid, self.order, self.period)


@dataclass(frozen=True)
class RefineConfig:
    alpha: float = 2.5
    epsilon: float = 1e-3
    max_iters: int = 20
    samples: int = 1024
    final_coarsen: bool = False
    coarsen_threshold: float | None = None

    def __post_init__(self):
        if not self.alpha > 1:
            raise SplineWaveError(f"alpha must exceed 1, got {self.alpha}")
        if not self.epsilon > 0:
            raise SplineWaveError("epsilon must be positive")
        if self.max_iters < 1 or self.samples < 2:
            raise SplineWaveError("max_iters must be >= 1 and samples >= 2")


@dataclass
class RefineResult:
    grid: np.ndarray
    spline: Spline
    history: list = field(default_factory=list)
    converged: bool = False


def sample_points(s: Spline, n: int) -> np.ndarray:
    lo, hi = s.span
    if s.period is not None:
        return lo + (hi - lo) * np.arange(n) / n
    return np.linspace(lo, hi, n)


def refine_loop(f: Callable, method: ApproximationMethod, initial_grid, params: WaveletParams,
                config: RefineConfig = RefineConfig(), period: float | None = None,
                strict: bool = False) -> RefineResult:
    """Wavelet-guided grid refinement.

    Every iteration computes the details of the current approximation against
    a coarsening of its grid, refines around the large ones and
    re-approximates, handing the Oslo-refined previous approximation to
    ``method`` as a starting guess.  Stops once the sampled sup-norm change
    drops below ``config.epsilon``.  Without convergence the last iterate is
    returned with ``converged=False``, or :class:`NoConvergence` is raised
    when ``strict``.
    """
    grid = np.asarray(initial_grid, dtype=float)
    cur = method(f, grid, None, config.epsilon)
    x = sample_points(cur, config.samples)
    fx = np.asarray(f(x), dtype=float).reshape(x.size, -1)
    history = []
    converged = False
    for it in range(1, config.max_iters + 1):
        level = build_level(coarsen_grid(cur.knots, params), cur.knots, params, period)
        d = wavelet_coefficients(cur, level)
        new_grid = refine_grid(level, d, config.alpha)
        guess = oslo_refine(cur, new_grid)
        nxt = method(f, new_grid, guess, config.epsilon)
        vals = eval_spline(nxt, x)
        change = float(np.abs(vals - eval_spline(cur, x)).max())
        err = float(np.abs(vals - fx).max())
        history.append({"iteration": it, "knots": int(new_grid.size),
                        "change": change, "error": err})
        log.info("refine iteration %d: %d knots, change %.3e, error %.3e",
                 it, new_grid.size, change, err)
        cur = nxt
        if change < config.epsilon:
            converged = True
            break
    if config.final_coarsen:
        thr = config.coarsen_threshold if config.coarsen_threshold is not None \
            else config.epsilon / 10
        try:
            level = build_level(coarsen_grid(cur.knots, params), cur.knots, params, period)
            cur = coarsen(cur, level, params, thr).result
        except GridTooSmall:
            pass
    if not converged and strict:
        raise NoConvergence(f"no convergence after {config.max_iters} iterations")
    return RefineResult(cur.knots.copy(), cur, history, converged)
