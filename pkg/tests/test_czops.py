import numpy as np
import pytest

from analysis.czops import (KernelOp, bmo_norm, commutator_apply, commutator_kernel_form, cz_apply,
                            disjoint_partner, dual1_ratio, jones_extend, neccond_testfn,
                            sparse_domination_constant)
from analysis.exceptions import ArgumentError, GridRangeError, PreconditionError
from analysis.grid import DYADIC, Grid, IntervalRef, StepFn

# Whitney mirror averages keep the extension within a small multiple of the local BMO norm
JONES_RATIO_CAP = 10.0


class TestKernel:
    def test_direct_summation(self, grid4, rng):
        f = StepFn(grid4, rng.normal(size=16), signed=True)
        idx = np.arange(16)
        expected = [sum(f.values[j] / (i - j) for j in idx if j != i) for i in idx]
        np.testing.assert_allclose(cz_apply(KernelOp(grid4), f).values, expected, rtol=1e-12, atol=1e-12)

    def test_nondegeneracy(self, grid6):
        assert KernelOp(grid6).nondegeneracy_constant() == pytest.approx(1.0)

    def test_unknown_kernel(self, grid4):
        with pytest.raises(ArgumentError):
            KernelOp(grid4, kind="riesz")


class TestCommutators:
    def test_linear_symbol_first_order(self, grid6, rng):
        # (x − y)/(x − y) = 1 off the diagonal
        f = StepFn(grid6, rng.random(64))
        b = StepFn.from_function(grid6, lambda x: x)
        h = grid6.cell_width
        expected = f.values.sum() * h - f.values * h
        out = commutator_apply(KernelOp(grid6), b, f, 1)
        np.testing.assert_allclose(out.values, expected, rtol=1e-9, atol=1e-10)

    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_recursion_matches_kernel_form(self, grid6, rng, m):
        T = KernelOp(grid6)
        b = StepFn(grid6, rng.normal(size=64), signed=True)
        f = StepFn(grid6, rng.random(64))
        rec = commutator_apply(T, b, f, m).values
        ker = commutator_kernel_form(T, b, f, m)
        scale = np.abs(ker).max()
        np.testing.assert_allclose(rec, ker, rtol=1e-8, atol=1e-8 * scale)

    def test_negative_order(self, grid4):
        one = StepFn.constant(grid4, 1.0)
        with pytest.raises(ArgumentError):
            commutator_apply(KernelOp(grid4), one, one, -1)

    def test_constant_symbol_vanishes(self, grid6, rng):
        f = StepFn(grid6, rng.random(64))
        b = StepFn.constant(grid6, 4.0)
        np.testing.assert_allclose(commutator_apply(KernelOp(grid6), b, f, 2).values, 0.0, atol=1e-12)


class TestBmo:
    def test_constant_has_zero_norm(self, grid4):
        assert bmo_norm(StepFn.constant(grid4, 3.0)).norm == 0.0

    @pytest.mark.parametrize("mode", ["dyadic", "all_aligned"])
    def test_half_indicator(self, grid6, mode):
        b = StepFn.indicator(grid6, IntervalRef(32, 32))
        report = bmo_norm(b, mode=mode)
        assert report.norm == pytest.approx(0.5)
        assert report.maximizer == grid6.whole()

    def test_weight_must_be_positive(self, grid4):
        b = StepFn.constant(grid4, 1.0)
        with pytest.raises(PreconditionError):
            bmo_norm(b, eta=StepFn.constant(grid4, 0.0))


class TestJonesExtension:
    def test_extension_shape(self, grid6, rng):
        R = IntervalRef(16, 16)
        values = np.zeros(64)
        local = rng.normal(size=16)
        values[16:32] = local - local.mean()
        ext = jones_extend(StepFn(grid6, values, signed=True), R)
        np.testing.assert_allclose(ext.phi.values[16:32], values[16:32])
        assert np.all(ext.phi.values[:8] == 0) and np.all(ext.phi.values[40:] == 0)
        assert np.isfinite(ext.ratio) and ext.ratio > 0

    def test_requires_mean_zero(self, grid6):
        f = StepFn.constant(grid6, 1.0)
        with pytest.raises(PreconditionError):
            jones_extend(f, IntervalRef(16, 16))

    def test_double_must_fit(self, grid6):
        with pytest.raises(GridRangeError):
            jones_extend(StepFn.constant(grid6, 0.0), IntervalRef(0, 16))

    def test_power_of_two_length(self, grid6):
        with pytest.raises(PreconditionError):
            jones_extend(StepFn.constant(grid6, 0.0), IntervalRef(16, 3))

    @pytest.mark.parametrize("seed", range(25))
    def test_random_cubes(self, grid6, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.choice([4, 8, 16]))
        R = IntervalRef(n * int(rng.integers(1, 64 // n - 1)), n)
        values = rng.normal(size=64)
        values[R.start:R.stop] -= values[R.start:R.stop].mean()
        ext = jones_extend(StepFn(grid6, values, signed=True), R)
        np.testing.assert_allclose(ext.phi.values[R.start:R.stop], values[R.start:R.stop])
        assert np.all(ext.phi.values[:R.start - n // 2] == 0)
        assert np.all(ext.phi.values[R.stop + n // 2:] == 0)
        assert np.isfinite(ext.ratio) and 0 < ext.ratio <= JONES_RATIO_CAP


class TestNecessityTools:
    def test_flat_weight_gives_zero_test_function(self, grid6):
        v = StepFn.constant(grid6, 1.0)
        test_fn = neccond_testfn(v, IntervalRef(16, 16), 2.0)
        np.testing.assert_allclose(test_fn.g.values, 0.0)
        assert test_fn.mean_on_q == 0.0

    def test_test_function_rejects_zero_weight(self, grid4):
        with pytest.raises(PreconditionError):
            neccond_testfn(StepFn.constant(grid4, 0.0), IntervalRef(0, 4), 2.0)

    def test_partner_placement(self):
        grid = Grid(8)
        report = disjoint_partner(IntervalRef(16, 4), 8.0, grid)
        assert report.interval == IntervalRef(52, 4)
        assert report.eps > 0

    def test_partner_needs_separation(self):
        with pytest.raises(ArgumentError):
            disjoint_partner(IntervalRef(16, 4), 2.0, Grid(8))


class TestSparseDomination:
    def test_domination_constant_finite(self, rng):
        grid = Grid(5)
        b = StepFn(grid, rng.normal(size=32), signed=True)
        f = StepFn(grid, rng.random(32))
        value = sparse_domination_constant(KernelOp(grid), b, f, 1, DYADIC)
        assert np.isfinite(value) and value > 0

    def test_dual1_ratio_finite(self, rng):
        grid = Grid(5)
        b = StepFn(grid, rng.normal(size=32), signed=True)
        f = StepFn(grid, rng.random(32))
        g = StepFn(grid, rng.random(32))
        value = dual1_ratio(KernelOp(grid), b, f, g, 1)
        assert np.isfinite(value) and value >= 0

    @pytest.mark.parametrize("m", [1, 2])
    @pytest.mark.parametrize("seed", range(5))
    def test_constant_steady_under_refinement(self, m, seed):
        rng = np.random.default_rng(seed)
        phase, shift = rng.uniform(0.0, 2 * np.pi, 2)
        b_fn = lambda x: np.sin(2 * np.pi * x + phase) + 0.5 * np.cos(6 * np.pi * x + shift)
        f_fn = lambda x: 1.5 + 0.5 * np.sin(2 * np.pi * x + shift)
        values = []
        for grid in (Grid(5), Grid(7)):
            b = StepFn.from_function(grid, b_fn, signed=True)
            f = StepFn.from_function(grid, f_fn)
            values.append(sparse_domination_constant(KernelOp(grid), b, f, m, DYADIC))
        assert all(np.isfinite(values)) and min(values) > 0
        assert max(values) <= 1.5 * min(values)
