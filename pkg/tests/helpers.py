"""Grid and spline generators shared by the tests."""

import itertools

import numpy as np

from splinewave.bspline import Spline
from splinewave.wavelets import MODES, WaveletParams, build_level, coarsen_grid

ORDERS = (2, 3, 4)
MOMENTS = (1, 2, 3)
MATRIX = list(itertools.product(ORDERS, MOMENTS, MODES))


def strict_points(rng, n, lo=0.0, hi=1.0, ratio=5.0):
    """``n + 1`` increasing points from ``lo`` to ``hi``, neighbor spacings within ``ratio``."""
    h = rng.uniform(1.0, ratio, n)
    x = lo + (hi - lo) * np.r_[0.0, np.cumsum(h)] / h.sum()
    x[-1] = hi
    return x


def random_grid(rng, mode, n, m, ratio=5.0):
    """A fine grid with ``n`` intervals for the given boundary mode (period 1 if periodic)."""
    x = strict_points(rng, n, ratio=ratio)
    if mode == "interval":
        return np.r_[np.zeros(m - 1), x, np.ones(m - 1)]
    if mode == "periodic":
        return x[:-1]
    return x


def period_of(mode):
    return 1.0 if mode == "periodic" else None


def random_spline(rng, knots, m, period=None, channels=1):
    nb = knots.size if period is not None else knots.size - m
    return Spline(m, knots, rng.standard_normal((nb, channels)), period)


def random_level(rng, m, mt, mode, n):
    p = WaveletParams(m, mt, mode)
    fine = random_grid(rng, mode, n, m)
    per = period_of(mode)
    return p, build_level(coarsen_grid(fine, p), fine, p, per)


def coarse_spline(rng, level, channels=1):
    return random_spline(rng, level.coarse, level.params.m, level.period, channels)
