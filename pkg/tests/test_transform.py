import numpy as np
import pytest

from splinewave import opcount
from splinewave.bspline import eval_spline, oslo_refine
from splinewave.errors import GridMismatch
from splinewave.transform import (
    DecompositionLevel,
    MultiscaleDecomposition,
    decompose,
    pyramid_decompose,
    pyramid_reconstruct,
    reconstruct,
    wavelet_coefficients,
)
from splinewave.wavelets import (
    WaveletParams,
    build_wavelet_slot,
    eval_wavelet,
    grid_chain,
)

from helpers import MATRIX, coarse_spline, random_grid, random_level, random_spline


def rel_err(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


class TestSingleLevel:
    @pytest.mark.parametrize("m,mt,mode", MATRIX)
    def test_roundtrip(self, rng, backend, m, mt, mode):
        _, lv = random_level(rng, m, mt, mode, 128)
        s = random_spline(rng, lv.fine, m, lv.period, channels=4)
        back = reconstruct(decompose(s, lv))
        assert rel_err(back.coeffs, s.coeffs) < 1e-11

    @pytest.mark.parametrize("m,mt,mode", MATRIX)
    def test_coarse_space_annihilated(self, rng, m, mt, mode):
        _, lv = random_level(rng, m, mt, mode, 64)
        c = coarse_spline(rng, lv, channels=2)
        s = oslo_refine(c, lv.fine)
        dl = decompose(s, lv)
        assert np.abs(dl.detail_coeffs).max() < 1e-12 * np.abs(c.coeffs).max()
        assert np.abs(dl.coarse_coeffs - c.coeffs).max() < 1e-11

    def test_zero_details_is_oslo(self, rng):
        _, lv = random_level(rng, 3, 2, "interval", 48)
        c = coarse_spline(rng, lv)
        dl = DecompositionLevel(lv, c.coeffs, np.zeros((lv.num_wavelets, 1)))
        assert np.abs(reconstruct(dl).coeffs - oslo_refine(c, lv.fine).coeffs).max() < 1e-14

    @pytest.mark.parametrize("mode", ["line", "periodic"])
    def test_unit_detail_gives_wavelet(self, rng, mode):
        _, lv = random_level(rng, 4, 2, mode, 40)
        k = lv.num_wavelets // 2
        d = np.zeros((lv.num_wavelets, 1))
        d[k] = 1.0
        zero = np.zeros((lv.coarse.size - (0 if lv.period else 4), 1))
        s = reconstruct(DecompositionLevel(lv, zero, d))
        sl = build_wavelet_slot(lv, k)
        x = np.linspace(*sl.support, 97)
        assert np.abs(eval_spline(s, x)[:, 0] - eval_wavelet(sl, lv, x)).max() < 1e-13

    def test_decompose_then_reconstruct_is_identity_on_details(self, rng):
        _, lv = random_level(rng, 3, 3, "periodic", 64)
        c = coarse_spline(rng, lv, channels=2)
        d = rng.standard_normal((lv.num_wavelets, 2))
        dl = decompose(reconstruct(DecompositionLevel(lv, c.coeffs, d)), lv)
        assert np.abs(dl.detail_coeffs - d).max() < 1e-11
        assert np.abs(dl.coarse_coeffs - c.coeffs).max() < 1e-11

    def test_two_scale_identity_pointwise(self, rng):
        _, lv = random_level(rng, 4, 2, "interval", 64)
        s = random_spline(rng, lv.fine, 4)
        dl = decompose(s, lv)
        x = np.linspace(0, 1, 500)
        total = eval_spline(dl.coarse_spline, x)[:, 0]
        for k in range(lv.num_wavelets):
            total += dl.detail_coeffs[k, 0] * eval_wavelet(build_wavelet_slot(lv, k), lv, x)
        assert np.abs(total - eval_spline(s, x)[:, 0]).max() < 1e-11

    def test_channels_independent(self, rng):
        _, lv = random_level(rng, 3, 1, "line", 80)
        s = random_spline(rng, lv.fine, 3, channels=3)
        joint = decompose(s, lv)
        for j in range(3):
            one = decompose(s.with_coeffs(s.coeffs[:, j:j + 1]), lv)
            assert np.array_equal(one.detail_coeffs[:, 0], joint.detail_coeffs[:, j])
            assert np.array_equal(one.coarse_coeffs[:, 0], joint.coarse_coeffs[:, j])

    def test_wavelet_coefficients_matches_decompose(self, rng):
        _, lv = random_level(rng, 2, 2, "interval", 32)
        s = random_spline(rng, lv.fine, 2)
        assert np.array_equal(wavelet_coefficients(s, lv), decompose(s, lv).detail_coeffs)


class TestErrors:
    def test_wrong_grid(self, rng):
        _, lv = random_level(rng, 3, 2, "line", 32)
        s = random_spline(rng, lv.coarse, 3)
        with pytest.raises(GridMismatch):
            decompose(s, lv)

    def test_wrong_order(self, rng):
        _, lv = random_level(rng, 3, 2, "line", 32)
        with pytest.raises(GridMismatch):
            decompose(random_spline(rng, lv.fine, 2), lv)

    def test_wrong_params(self, rng):
        _, lv = random_level(rng, 3, 2, "line", 32)
        with pytest.raises(GridMismatch):
            decompose(random_spline(rng, lv.fine, 3), lv, WaveletParams(3, 1))

    def test_detail_shape(self, rng):
        _, lv = random_level(rng, 3, 2, "line", 32)
        c = coarse_spline(rng, lv)
        with pytest.raises(GridMismatch):
            DecompositionLevel(lv, c.coeffs, np.zeros((lv.num_wavelets + 1, 1)))

    def test_chain_must_be_nested(self, rng):
        _, a = random_level(rng, 3, 2, "line", 32)
        _, b = random_level(rng, 3, 2, "line", 32)
        da = decompose(random_spline(rng, a.fine, 3), a)
        db = decompose(random_spline(rng, b.fine, 3), b)
        with pytest.raises(GridMismatch):
            MultiscaleDecomposition(da.coarse_spline, [da, db])


class TestPyramid:
    @pytest.mark.parametrize("mode", ["line", "interval", "periodic"])
    def test_three_levels(self, rng, mode):
        p = WaveletParams(4, 2, mode)
        fine = random_grid(rng, mode, 256, 4)
        per = 1.0 if mode == "periodic" else None
        grids = grid_chain(fine, 3, p)
        assert len(grids) == 4
        s = random_spline(rng, fine, 4, per, channels=2)
        md = pyramid_decompose(s, grids, p)
        assert len(md.levels) == 3
        assert np.array_equal(md.base.knots, grids[0])
        assert all(np.array_equal(a, b) for a, b in zip(md.grids, grids))
        assert rel_err(pyramid_reconstruct(md).coeffs, s.coeffs) < 1e-10

    def test_no_levels(self, rng):
        p = WaveletParams(3, 1)
        s = random_spline(rng, random_grid(rng, "line", 20, 3), 3)
        md = pyramid_decompose(s, [s.knots], p)
        assert md.levels == () and md.num_details() == 0
        assert np.array_equal(pyramid_reconstruct(md).coeffs, s.coeffs)

    def test_finest_grid_checked(self, rng):
        p = WaveletParams(3, 1)
        s = random_spline(rng, random_grid(rng, "line", 40, 3), 3)
        grids = grid_chain(s.knots, 2, p)
        with pytest.raises(GridMismatch):
            pyramid_decompose(s, grids[:-1], p)

    def test_detail_count(self, rng):
        p = WaveletParams(2, 2, "periodic")
        fine = random_grid(rng, "periodic", 64, 2)
        md = pyramid_decompose(random_spline(rng, fine, 2, 1.0), grid_chain(fine, 2, p), p)
        assert md.num_details() == fine.size - md.base.knots.size


class TestCost:
    def test_operations_scale_linearly(self, rng):
        counts = []
        for n in (1024, 2048):
            _, lv = random_level(rng, 4, 2, "periodic", n)
            s = random_spline(rng, lv.fine, 4, 1.0)
            lv.slots()
            with opcount.OpCounter() as oc:
                decompose(s, lv)
            counts.append(oc.total)
        assert 1.5 <= counts[1] / counts[0] <= 3.0

    def test_counter_nesting(self, rng):
        _, lv = random_level(rng, 3, 1, "line", 64)
        s = random_spline(rng, lv.fine, 3)
        with opcount.OpCounter() as outer:
            with opcount.OpCounter() as inner:
                decompose(s, lv)
        assert outer.total == inner.total > 0
        assert set(inner.by_stage) >= {"details", "remove"}

