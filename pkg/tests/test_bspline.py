from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from splinewave.bspline import (
    Spline,
    boehm_insert,
    differentiate,
    eval_spline,
    greville,
    oslo_refine,
    remove_knot_backward,
    remove_knot_forward,
    remove_step,
    truncated_power_coeffs,
    validate_knots,
)
from splinewave.errors import (
    DecreasingKnots,
    ExcessMultiplicity,
    IndexOutOfRange,
    KnotOutOfRange,
    NotARefinement,
    OrderUnderflow,
    OutOfSupport,
    SplineWaveError,
)

from helpers import strict_points


def hat():
    return Spline(2, [0.0, 1.0, 2.0], [1.0])


class TestValidateKnots:
    def test_strict(self):
        assert np.array_equal(validate_knots([0, 1, 2, 3], 2), [0, 1, 2, 3])

    def test_boundary_triples(self):
        validate_knots([0, 0, 0, 1, 2, 2, 2], 3)

    def test_decreasing(self):
        with pytest.raises(DecreasingKnots) as ei:
            validate_knots([0, 2, 1], 3)
        assert ei.value.index == 2

    def test_interior_multiplicity(self):
        validate_knots([0, 1, 1, 2], 3)
        with pytest.raises(ExcessMultiplicity):
            validate_knots([0, 1, 1, 1, 2], 3)

    def test_boundary_excess(self):
        with pytest.raises(ExcessMultiplicity):
            validate_knots([0, 0, 0, 0, 1], 3)

    def test_periodic_window(self):
        validate_knots([0.0, 0.3, 0.9], 3, period=1.0)
        with pytest.raises(SplineWaveError):
            validate_knots([0.0, 0.3, 1.0], 3, period=1.0)

    def test_nonfinite(self):
        with pytest.raises(SplineWaveError):
            validate_knots([0.0, np.nan, 1.0], 2)


class TestEval:
    def test_hat_peak(self):
        assert eval_spline(hat(), 1.0)[0] == 1.0
        assert np.allclose(eval_spline(hat(), [0.0, 0.5, 2.0])[:, 0], [0.0, 0.5, 0.0])

    def test_uniform_cubic(self):
        s = Spline(4, np.arange(5.0), [1.0])
        assert eval_spline(s, 2.0)[0] == pytest.approx(2.0 / 3.0, abs=1e-15)

    @pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
    def test_partition_of_unity(self, rng, m):
        t = strict_points(rng, 30)
        s = Spline(m, t, np.ones(t.size - m))
        x = rng.uniform(t[m - 1], t[-m], 200)
        assert np.abs(s(x) - 1.0).max() < 1e-13

    def test_local_support(self, rng):
        t = strict_points(rng, 12)
        c = np.zeros(t.size - 3)
        c[4] = 1.0
        s = Spline(3, t, c)
        x = np.linspace(t[0], t[-1], 500)
        out = (x <= t[4]) | (x > t[7])
        assert np.all(s(x)[out, 0] == 0.0)
        assert np.all(s(x)[~out, 0] > 0.0)

    def test_right_continuity(self):
        # piecewise constant: value at a knot comes from the left interval
        s = Spline(1, [0.0, 1.0, 2.0], [3.0, 5.0])
        assert eval_spline(s, 1.0)[0] == 3.0
        assert eval_spline(s, 0.0)[0] == 3.0

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            eval_spline(hat(), 2.5)

    def test_channels(self, rng):
        t = strict_points(rng, 10)
        c = rng.standard_normal((t.size - 3, 4))
        x = rng.uniform(0, 1, 17)
        full = Spline(3, t, c)(x)
        for j in range(4):
            assert np.abs(Spline(3, t, c[:, j])(x)[:, 0] - full[:, j]).max() < 1e-15

    def test_periodic_wraps(self, rng):
        t = np.sort(rng.uniform(0, 1, 9))
        t[0] = 0.0
        s = Spline(4, t, rng.standard_normal(9), period=1.0)
        x = rng.uniform(0, 1, 50)
        assert np.abs(s(x) - s(x + 1.0)).max() < 1e-13
        assert np.abs(s(x) - s(x - 3.0)).max() < 1e-13


class TestDifferentiate:
    def test_hat(self):
        d = differentiate(hat())
        assert d.order == 1
        assert np.array_equal(d.coeffs[:, 0], [1.0, -1.0])

    def test_constant(self, rng):
        t = np.r_[0, 0, 0, strict_points(rng, 8), 1, 1, 1]
        d = differentiate(Spline(4, t, np.full(t.size - 4, 2.5)))
        assert np.all(d.coeffs == 0.0)

    def test_finite_differences(self, rng):
        t = strict_points(rng, 15)
        s = Spline(3, t, rng.standard_normal(t.size - 3))
        ds = differentiate(s)
        h = 1e-6
        x = rng.uniform(t[2] + 2 * h, t[-3] - 2 * h, 100)
        fd = (s(x + h) - s(x - h)) / (2 * h)
        scale = np.abs(s.coeffs).max() / np.diff(t).min()
        assert np.abs(ds(x) - fd).max() < 1e-5 * scale

    def test_order_one(self):
        with pytest.raises(OrderUnderflow):
            differentiate(Spline(1, [0.0, 1.0], [1.0]))


class TestOslo:
    def test_identity(self, rng):
        t = strict_points(rng, 10)
        s = Spline(4, t, rng.standard_normal(t.size - 4))
        assert np.abs(oslo_refine(s, t).coeffs - s.coeffs).max() < 1e-15

    def test_hat_midpoint(self):
        r = oslo_refine(hat(), [0.0, 0.5, 1.0, 2.0])
        assert np.allclose(r.coeffs[:, 0], [0.5, 1.0])

    def test_values_preserved(self, rng, backend):
        t = strict_points(rng, 20)
        s = Spline(4, t, rng.standard_normal((t.size - 4, 2)))
        fine = np.sort(np.r_[t, rng.uniform(0, 1, 5)])
        x = rng.uniform(0, 1, 200)
        r = oslo_refine(s, fine)
        assert np.abs(r(x) - s(x)).max() < 1e-12 * np.abs(s.coeffs).max()

    def test_not_a_refinement(self):
        with pytest.raises(NotARefinement):
            oslo_refine(hat(), [0.0, 0.5, 2.0])

    def test_periodic(self, rng):
        t = np.r_[0.0, np.sort(rng.uniform(0, 1, 7))]
        s = Spline(3, t, rng.standard_normal(8), period=1.0)
        fine = np.sort(np.r_[t, rng.uniform(0, 1, 6)])
        x = rng.uniform(0, 1, 100)
        assert np.abs(oslo_refine(s, fine)(x) - s(x)).max() < 1e-12

    @settings(max_examples=30, deadline=None)
    @given(st.integers(2, 5), st.integers(5, 25), st.integers(0, 2**31))
    def test_property_values(self, m, n, seed):
        g = np.random.default_rng(seed)
        t = strict_points(g, n)
        s = Spline(m, t, g.standard_normal(t.size - m))
        fine = np.unique(np.r_[t, g.uniform(0, 1, 4)])
        x = g.uniform(0, 1, 40)
        assert np.abs(oslo_refine(s, fine)(x) - s(x)).max() < 1e-11


class TestBoehm:
    def test_matches_oslo(self):
        assert np.allclose(boehm_insert(hat(), 0.5).coeffs, [[0.5], [1.0]])

    def test_existing_knot(self, rng):
        t = strict_points(rng, 8)
        s = Spline(4, t, rng.standard_normal(t.size - 4))
        r = boehm_insert(s, t[4])
        assert np.sum(r.knots == t[4]) == 2
        x = rng.uniform(0, 1, 100)
        assert np.abs(r(x) - s(x)).max() < 1e-13

    def test_cubic_values(self, rng):
        t = strict_points(rng, 10)
        s = Spline(3, t, rng.standard_normal(t.size - 3))
        x = rng.uniform(0, 1, 100)
        assert np.abs(boehm_insert(s, 0.4321)(x) - s(x)).max() < 1e-13

    def test_out_of_range(self):
        with pytest.raises(KnotOutOfRange):
            boehm_insert(hat(), 2.0)


class TestRemoval:
    def setup_spline(self, rng, m=4):
        t = strict_points(rng, 12)
        return Spline(m, t, rng.standard_normal((t.size - m, 2)))

    def test_inverse_of_boehm(self, rng, backend):
        s = self.setup_spline(rng)
        r = boehm_insert(s, 0.37)
        j = int(np.searchsorted(r.knots, 0.37))
        back = remove_knot_backward(r, j)
        assert np.array_equal(back.knots, s.knots)
        assert np.abs(back.coeffs - s.coeffs).max() < 1e-13

    def test_not_representable_changes_function(self, rng):
        s = self.setup_spline(rng)
        r = remove_knot_backward(s, 6)
        x = np.linspace(0, 1, 50)
        assert np.abs(r(x) - s(x)).max() > 1e-6

    def test_forward_single_step(self, rng):
        s = self.setup_spline(rng)
        r = boehm_insert(s, 0.61)
        j = int(np.searchsorted(r.knots, 0.61))
        f = remove_knot_forward(r, j)
        b = remove_knot_backward(r, j)
        assert np.abs(f.coeffs - b.coeffs).max() < 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            remove_knot_backward(hat(), 0)
        with pytest.raises(IndexOutOfRange):
            remove_knot_forward(hat(), 2)

    def test_exact_rational(self):
        # in exact arithmetic the two recursions agree exactly
        m = 4
        t = [Fraction(i, 7) for i in range(12)]
        c = [[Fraction((-1) ** i * (i * i + 1), 3)] for i in range(len(t) - m)]
        x = Fraction(5, 11)
        r = next(i for i, v in enumerate(t) if v > x)
        # Boehm insertion in exact arithmetic
        tt = t[:r] + [x] + t[r:]
        cc = []
        for i in range(len(c) + 1):
            if i <= r - m:
                cc.append(c[i])
            elif i >= r:
                cc.append(c[i - 1])
            else:
                w = (x - t[i]) / (t[i + m - 1] - t[i])
                cc.append([w * a + (1 - w) * b for a, b in zip(c[i], c[i - 1])])
        kb, cb = remove_step(tt, cc, r, m, backward=True)
        kf, cf = remove_step(tt, cc, r, m, backward=False)
        assert kb == kf == t
        assert cb == cf == c

    def test_periodic_roundtrip(self, rng, backend):
        t = np.r_[0.0, np.sort(rng.uniform(0, 1, 9))]
        s = Spline(3, t, rng.standard_normal(10), period=1.0)
        x = 0.5 * (t[-1] + 1.0)  # between the last knot and the wrap
        r = oslo_refine(s, np.r_[t, x])
        back = remove_knot_backward(r, r.knots.size - 1)
        assert np.abs(back.coeffs - s.coeffs).max() < 1e-12


class TestTruncatedPower:
    def test_hat(self):
        tp = truncated_power_coeffs(hat())
        assert np.allclose(tp.a[:, 0], [1.0, -2.0, 1.0])

    def test_no_jump(self, rng):
        t = strict_points(rng, 10)
        s = Spline(3, t, rng.standard_normal(t.size - 3))
        xi = 0.5 * (t[4] + t[5])
        tp = truncated_power_coeffs(oslo_refine(s, np.sort(np.r_[t, xi])))
        j = int(np.searchsorted(tp.knots, xi))
        assert abs(tp.a[j, 0]) < 1e-10 * np.abs(tp.a).max()

    def test_reproduces_function(self, rng):
        m = 3
        t = strict_points(rng, 14)
        s = Spline(m, t, rng.standard_normal(t.size - m))
        tp = truncated_power_coeffs(s)
        x = rng.uniform(0, 1, 100)
        direct = (np.maximum(x[:, None] - t[None, :], 0.0) ** (m - 1)) @ tp.a[:, 0]
        assert np.abs(direct - s(x)[:, 0]).max() < 1e-10 * np.abs(s.coeffs).max()


class TestGreville:
    def test_clamped_ends(self):
        t = np.r_[0, 0, 0, np.linspace(0, 1, 7), 1, 1, 1] / 3.0
        g = greville(t, 4)
        assert g[0] == t[0] and g[-1] == t[-1]
        assert np.all(np.diff(g) > 0)
