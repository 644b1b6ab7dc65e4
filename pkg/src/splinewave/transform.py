"""Fast wavelet decomposition and reconstruction, single level and pyramid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import opcount
from ._backend import kernels
from .bspline import Spline, oslo_refine, top_jumps
from .errors import GridMismatch
from .wavelets import LevelGrids, WaveletParams, build_level


@dataclass(frozen=True)
class DecompositionLevel:
    level: LevelGrids
    coarse_coeffs: np.ndarray
    detail_coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coarse_coeffs, dtype=float))
        d = np.asarray(self.detail_coeffs, dtype=float).reshape(-1, c.shape[1])
        lv = self.level
        nbc = lv.coarse.size if lv.period is not None else lv.coarse.size - lv.params.m
        if c.shape[0] != nbc or d.shape[0] != lv.num_wavelets:
            raise GridMismatch(
                f"level expects {nbc} coarse and {lv.num_wavelets} detail rows, "
                f"got {c.shape[0]} and {d.shape[0]}")
        object.__setattr__(self, "coarse_coeffs", c)
        object.__setattr__(self, "detail_coeffs", d)

    @property
    def coarse_spline(self) -> Spline:
        lv = self.level
        return Spline(lv.params.m, lv.coarse, self.coarse_coeffs, lv.period)


@dataclass(frozen=True)
class MultiscaleDecomposition:
    """Base spline on the coarsest grid and details ordered coarsest first."""

    base: Spline
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        for a, b in zip(self.levels, self.levels[1:]):
            if not np.array_equal(a.level.fine, b.level.coarse):
                raise GridMismatch("consecutive levels do not share a grid")

    @property
    def grids(self) -> list[np.ndarray]:
        if not self.levels:
            return [self.base.knots]
        return [self.levels[0].level.coarse] + [lv.level.fine for lv in self.levels]

    def num_details(self) -> int:
        return sum(lv.level.num_wavelets for lv in self.levels)


def _check_input(s: Spline, level: LevelGrids, params: WaveletParams | None):
    if params is not None and params != level.params:
        raise GridMismatch("parameters differ from the ones the level was built with")
    if s.order != level.params.m:
        raise GridMismatch(f"spline order {s.order} but level built for m={level.params.m}")
    if s.period != level.period:
        raise GridMismatch("spline and level disagree on periodicity")
    if s.knots.shape != level.fine.shape or not np.array_equal(s.knots, level.fine):
        raise GridMismatch("spline knots differ from the level's fine grid")


def wavelet_coefficients(s: Spline, level: LevelGrids, params: WaveletParams | None = None) -> np.ndarray:
    """Detail coefficients only: ``d_k = a_k / gamma_k`` at every new knot.

    The shared ``(m-1)!`` factor of ``a_k`` and ``gamma_k`` cancels and is
    never applied.
    """
    _check_input(s, level, params)
    tab = level.slots()
    jumps = top_jumps(s.knots, s.coeffs, s.order, s.period)[level.new_pos]
    opcount.add("details", jumps.size)
    return jumps / tab.jumps[:, None]


def decompose(s: Spline, level: LevelGrids, params: WaveletParams | None = None) -> DecompositionLevel:
    """Split a fine-grid spline into its coarse part and wavelet details."""
    d = wavelet_coefficients(s, level, params)
    tab = level.slots()
    c = tab.add_to(s.coeffs, d, -1.0)
    T, cc, ops = kernels().remove_knots(
        level.fine, c, level.new_pos, level.params.m, level.period or 0.0)
    opcount.add("remove", ops)
    return DecompositionLevel(level, cc, d)


def reconstruct(dl: DecompositionLevel, params: WaveletParams | None = None,
                coarse_coeffs=None) -> Spline:
    """Fine-grid spline from a coarse part and details.

    ``coarse_coeffs`` overrides the stored coarse coefficients, which is how
    the pyramid feeds each level with the output of the level below.
    """
    lv = dl.level
    if params is not None and params != lv.params:
        raise GridMismatch("parameters differ from the ones the level was built with")
    cc = dl.coarse_coeffs if coarse_coeffs is None else coarse_coeffs
    coarse = Spline(lv.params.m, lv.coarse, cc, lv.period)
    if coarse.channels != dl.detail_coeffs.shape[1]:
        raise GridMismatch("coarse and detail channel counts differ")
    fine = oslo_refine(coarse, lv.fine)
    c = lv.slots().add_to(fine.coeffs, dl.detail_coeffs, 1.0)
    return fine.with_coeffs(c)


def build_levels(grids, params: WaveletParams, period: float | None = None) -> list[LevelGrids]:
    """Level objects for a coarsest-first chain of nested grids."""
    return [build_level(a, b, params, period) for a, b in zip(grids, grids[1:])]


def pyramid_decompose(s: Spline, grids, params: WaveletParams, levels=None) -> MultiscaleDecomposition:
    """Repeated decomposition over ``grids`` (coarsest first, finest = ``s.knots``).

    ``levels`` may pass prebuilt :class:`LevelGrids` for the same chain so
    their cached wavelets are reused.
    """
    if levels is None:
        grids = [np.asarray(g, dtype=float) for g in grids]
        if not grids or not np.array_equal(grids[-1], s.knots):
            raise GridMismatch("the finest grid of the chain must be the spline's knots")
        levels = build_levels(grids, params, s.period)
    out = []
    cur = s
    for lv in reversed(levels):
        dl = decompose(cur, lv, params)
        out.append(dl)
        cur = dl.coarse_spline
    return MultiscaleDecomposition(cur, out[::-1])


def pyramid_reconstruct(md: MultiscaleDecomposition, params: WaveletParams | None = None) -> Spline:
    cur = md.base
    for dl in md.levels:
        cur = reconstruct(dl, params, coarse_coeffs=cur.coeffs)
    return cur
