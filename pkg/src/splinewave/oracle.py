"""Slow reference computations used to cross-check the fast transforms.

Everything here is dense (``O(n^3)`` for the least-squares solve) and built
on ``scipy.interpolate.BSpline`` rather than on the package's own kernels, so
agreement between the two is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .bspline import Spline, extend_knots, num_basis
from .errors import NotTranslationInvariant, RankDeficient, SplineWaveError
from .wavelets import (
    LevelGrids,
    WaveletParams,
    WaveletSlot,
    build_level,
    build_wavelet_slot,
    line_coarsen,
    wavelet_spline,
)


@dataclass(frozen=True)
class DenseBasisMatrix:
    """Samples of the coarse B-splines followed by the (unnormalized) wavelets."""

    samples: np.ndarray
    matrix: np.ndarray
    num_coarse: int


def chebyshev_samples(knots, period=None, per_interval: int = 4) -> np.ndarray:
    """First-kind Chebyshev points inside every nonempty knot interval."""
    t = np.asarray(knots, dtype=float)
    if period is not None:
        t = np.r_[t, t[0] + period]
    a, b = t[:-1], t[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    j = np.arange(per_interval)
    u = -np.cos((2 * j + 1) * np.pi / (2 * per_interval))
    return (0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * u[None, :]).ravel()


def _eval_basis(knots, x, deriv: int = 0, period=None) -> np.ndarray:
    """One basis function on ``knots`` (length ``order + 1``) at ``x``, wrapped if periodic."""
    f = BSpline.basis_element(np.asarray(knots, dtype=float), extrapolate=False)
    if deriv:
        f = f.derivative(deriv)
    shifts = [0.0] if period is None else [q * period for q in range(-2, 3)]
    out = np.zeros_like(x)
    for sh in shifts:
        v = f(x + sh)
        out += np.nan_to_num(v, nan=0.0)
    return out


def _basis_columns(knots, m, period, x) -> np.ndarray:
    nb = num_basis(len(knots), m, period)
    T = extend_knots(np.asarray(knots, float), period, 0, nb + m)
    cols = np.zeros((x.size, nb))
    for k in range(nb):
        seg = T[k:k + m + 1]
        if seg[-1] > seg[0]:
            cols[:, k] = _eval_basis(seg, x, 0, period)
    return cols


def _scipy_eval(s: Spline, x) -> np.ndarray:
    m = s.order
    if s.period is None:
        # clamp the ends so scipy evaluates over the whole knot span
        T = np.r_[np.full(m, s.knots[0]), s.knots, np.full(m, s.knots[-1])]
        z = np.zeros((m, s.channels))
        return BSpline(T, np.vstack([z, s.coeffs, z]), m - 1, extrapolate=False)(x)
    n = s.knots.size
    h = m + 1
    T = extend_knots(s.knots, s.period, -h, n + h + 1)
    C = s.coeffs[np.arange(-h, n + h + 1 - m) % n]
    return BSpline(T, C, m - 1, extrapolate=False)(x)


def dense_basis(level: LevelGrids, per_interval: int = 4) -> DenseBasisMatrix:
    p = level.params
    x = chebyshev_samples(level.fine, level.period, per_interval)
    phi = _basis_columns(level.coarse, p.m, level.period, x)
    psi = np.zeros((x.size, level.num_wavelets))
    for k in range(level.num_wavelets):
        psi[:, k] = _eval_basis(level.xi[k], x, p.m_tilde, level.period)
    return DenseBasisMatrix(x, np.hstack([phi, psi]), phi.shape[1])


def _lstsq(A, Y, what):
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    sol, _, rank, _ = np.linalg.lstsq(A / scale, Y, rcond=None)
    if rank < A.shape[1]:
        raise RankDeficient(f"{what}: rank {rank} < {A.shape[1]} columns")
    return sol / scale[:, None]


def oracle_wavelet_coeffs(level: LevelGrids) -> np.ndarray:
    """Fine-grid coefficients of every unnormalized wavelet, one column each."""
    p = level.params
    x = chebyshev_samples(level.fine, level.period)
    F = _basis_columns(level.fine, p.m, level.period, x)
    psi = np.column_stack([_eval_basis(level.xi[k], x, p.m_tilde, level.period)
                           for k in range(level.num_wavelets)]) \
        if level.num_wavelets else np.zeros((x.size, 0))
    return _lstsq(F, psi, "fine basis")


def oracle_decompose(s: Spline, level: LevelGrids, params: WaveletParams | None = None,
                     tol: float = 1e-9):
    """Coarse and detail coefficients of ``s`` from a dense least-squares solve.

    Wavelets are normalized the same way as the fast transform (largest
    fine-grid coefficient of magnitude one), but that factor is computed here
    from an independent projection onto the fine basis.
    """
    D = dense_basis(level)
    y = _scipy_eval(s, D.samples)
    if y.ndim == 1:
        y = y[:, None]
    sol = _lstsq(D.matrix, y, "coarse B-splines plus wavelets")
    res = np.abs(D.matrix @ sol - y).max()
    scale = max(np.abs(y).max(), 1.0)
    if res > tol * scale:
        raise RankDeficient(f"residual {res:.3e} exceeds {tol:g} x scale {scale:.3e}")
    nc = D.num_coarse
    peak = np.abs(oracle_wavelet_coeffs(level)).max(axis=0) if level.num_wavelets else np.ones(0)
    return sol[:nc], sol[nc:] * peak[:, None]


def moment_quadrature(slot: WaveletSlot, level: LevelGrids, params=None, ell: int = 0,
                      center: float = 0.0, scale: float = 1.0) -> float:
    """``int psi(t) ((t - center) / scale)^ell dt`` by piecewise Gauss-Legendre.

    The quadrature is exact for the polynomial pieces of ``psi``.  Centering
    and scaling do not change which moments vanish and keep the value free
    of cancellation for short supports.
    """
    if ell < 0:
        raise SplineWaveError("moment order must be nonnegative")
    m = level.params.m
    nq = math.ceil((m + ell + 1) / 2) + 1
    u, w = np.polynomial.legendre.leggauss(nq)
    edges = np.unique(slot.xi)
    a, b = edges[:-1], edges[1:]
    x = (0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * u).ravel()
    wt = (0.5 * (b - a)[:, None] * w).ravel()
    vals = wavelet_spline(slot, level)(x)[:, 0]
    return float(np.sum(wt * vals * ((x - center) / scale) ** ell))


def scaled_moment(slot: WaveletSlot, level: LevelGrids, ell: int) -> float:
    """Moment on the support mapped to unit length, divided by that length."""
    lo, hi = slot.support
    h = hi - lo
    return moment_quadrature(slot, level, None, ell, 0.5 * (lo + hi), h) / h


def uniform_filter_extract(params: WaveletParams, n: int, tol: float = 1e-12) -> np.ndarray:
    """The interior ``b`` window on the uniform grid ``0, 1, ..., n``.

    Interior wavelets are those whose coarse knots are evenly spaced by 2
    (near the ends the coarse grid keeps some odd knots).  Each is compared
    with the first; a mismatch beyond ``tol`` raises
    :class:`NotTranslationInvariant`.
    """
    p = WaveletParams(params.m, params.m_tilde, "line")
    fine = np.arange(n + 1, dtype=float)
    level = build_level(line_coarsen(fine, p), fine, p)
    interior = [k for k in range(level.num_wavelets)
                if np.all(np.diff(np.delete(level.xi[k], level.xi_pos[k])) == 2.0)]
    if not interior:
        raise SplineWaveError(f"uniform grid with n={n} has no interior wavelets")
    ref = build_wavelet_slot(level, interior[0]).b
    for k in interior[1:]:
        b = build_wavelet_slot(level, k).b
        if b.shape != ref.shape or np.abs(b - ref).max() > tol:
            raise NotTranslationInvariant(f"wavelet {k} differs from wavelet 0")
    return ref
