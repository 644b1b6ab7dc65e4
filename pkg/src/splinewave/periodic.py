"""Periodic and interval adapters over the core transforms.

Periodic grids store one period of knots; every wrap is index arithmetic
``k = k1 + n*k2`` with ``t_k = t_{k1} + k2*P``.  Interval grids carry
``m``-fold end knots, and the wavelets next to an end are shifted inward so
that their knot sets hold at most ``m - 1`` copies of the end point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bspline import Spline, validate_knots
from .errors import GridTooSmall, PeriodMismatch, SplineWaveError
from .transform import DecompositionLevel, decompose, reconstruct
from .wavelets import (
    LevelGrids,
    WaveletParams,
    build_level,
    interval_coarsen,
    periodic_coarsen,
    wavelet_knots,
)


def periodic_index_map(k: int, n: int) -> tuple[int, int]:
    if n < 1:
        raise SplineWaveError("period length must be at least one knot")
    q, r = divmod(int(k), int(n))
    return r, q


@dataclass(frozen=True)
class PeriodicGrid:
    base_knots: np.ndarray
    period: float

    def __post_init__(self):
        if not self.period > 0:
            raise PeriodMismatch("period must be positive")
        t = np.asarray(self.base_knots, dtype=float)
        if t.ndim != 1 or t.size < 1 or np.any(np.diff(t) <= 0):
            raise SplineWaveError("periodic base knots must be strictly increasing")
        if t[-1] - t[0] >= self.period:
            raise PeriodMismatch("base knots must fit inside one period")
        t.setflags(write=False)
        object.__setattr__(self, "base_knots", t)

    @property
    def n(self) -> int:
        return self.base_knots.size

    def knot(self, k: int) -> float:
        r, q = periodic_index_map(k, self.n)
        return float(self.base_knots[r] + q * self.period)

    def coarsen(self) -> PeriodicGrid:
        return PeriodicGrid(periodic_coarsen(self.base_knots), self.period)

    def level(self, params: WaveletParams) -> LevelGrids:
        """Level from the dyadic coarsening of this grid to this grid."""
        if self.n < 2 * params.order:
            raise GridTooSmall(
                f"periodic grid with {self.n} knots is below 2(m+m_tilde)={2 * params.order}")
        return build_level(self.coarsen().base_knots, self.base_knots, params, self.period)


@dataclass(frozen=True)
class IntervalGrid:
    """Strictly increasing knots ``a = t_0 < ... < t_n = b`` of an order-``m`` space."""

    interior_knots: np.ndarray
    order: int

    def __post_init__(self):
        t = np.asarray(self.interior_knots, dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise SplineWaveError("interval knots must be strictly increasing with a < b")
        t.setflags(write=False)
        object.__setattr__(self, "interior_knots", t)

    @classmethod
    def from_knots(cls, knots, order: int) -> IntervalGrid:
        k = validate_knots(knots, order)
        return cls(k[order - 1:k.size - order + 1], order)

    @property
    def n(self) -> int:
        return self.interior_knots.size - 1

    @property
    def knots(self) -> np.ndarray:
        t, m = self.interior_knots, self.order
        return np.concatenate([np.full(m - 1, t[0]), t, np.full(m - 1, t[-1])])

    def coarsen(self) -> IntervalGrid:
        return IntervalGrid.from_knots(interval_coarsen(self.knots, self.order), self.order)

    def level(self, params: WaveletParams) -> LevelGrids:
        if params.m != self.order or params.boundary_mode != "interval":
            raise SplineWaveError("interval grids need interval-mode parameters of the same order")
        return build_level(self.coarsen().knots, self.knots, params)


def _periodic_params(params: WaveletParams) -> WaveletParams:
    if params.boundary_mode != "periodic":
        return WaveletParams(params.m, params.m_tilde, "periodic")
    return params


def periodic_decompose(coeffs, grid: PeriodicGrid, params: WaveletParams,
                       level: LevelGrids | None = None) -> DecompositionLevel:
    """One decomposition step of a periodic spline given by one period of coefficients."""
    params = _periodic_params(params)
    c = np.asarray(coeffs, dtype=float)
    if c.shape[0] != grid.n:
        raise PeriodMismatch(f"{c.shape[0]} coefficients for a period of {grid.n} knots")
    lv = grid.level(params) if level is None else level
    if lv.period != grid.period:
        raise PeriodMismatch("level and grid periods differ")
    return decompose(Spline(params.m, grid.base_knots, c, grid.period), lv, params)


def periodic_reconstruct(dl: DecompositionLevel, grid: PeriodicGrid, params: WaveletParams) -> np.ndarray:
    params = _periodic_params(params)
    lv = dl.level
    if lv.period != grid.period or not np.array_equal(lv.fine, grid.base_knots):
        raise PeriodMismatch("decomposition does not belong to this periodic grid")
    return reconstruct(dl, params).coeffs


def interval_wavelet_knots(grid: IntervalGrid, k: int, params: WaveletParams) -> np.ndarray:
    """Knots of wavelet ``k`` between ``grid.coarsen()`` and ``grid``."""
    return wavelet_knots(grid.level(params), k)
