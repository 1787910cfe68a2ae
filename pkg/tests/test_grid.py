import numpy as np
import pytest

from analysis.exceptions import ArgumentError, GridRangeError, PreconditionError
from analysis.grid import (ALL_ALIGNED, DYADIC, Grid, IntervalRef, StepFn, average, enumerate_intervals,
                           integrate, interval_arrays, inner, load_stepfn, lp_norm, save_stepfn)


class TestGrid:
    def test_cells_and_width(self):
        grid = Grid(4)
        assert grid.cells == 16
        assert grid.cell_width == 1 / 16
        assert grid.measure == 1.0

    def test_span_extends_domain(self):
        grid = Grid(3, span=1)
        assert grid.cells == 16
        assert grid.measure == 2.0
        assert grid.centers()[-1] == pytest.approx(2.0 - 1 / 16)

    def test_invalid_levels(self):
        with pytest.raises(ArgumentError):
            Grid(0)


class TestIntervalRef:
    def test_empty_interval_rejected(self):
        with pytest.raises(GridRangeError):
            IntervalRef(0, 0)

    def test_out_of_grid(self):
        with pytest.raises(GridRangeError):
            IntervalRef(12, 8).check(Grid(4))

    def test_children_and_dyadic(self):
        left, right = IntervalRef(8, 8).children()
        assert (left, right) == (IntervalRef(8, 4), IntervalRef(12, 4))
        assert left.is_dyadic()
        assert not IntervalRef(2, 4).is_dyadic()

    def test_intersect(self):
        assert IntervalRef(0, 8).intersect(IntervalRef(4, 8)) == IntervalRef(4, 4)
        assert IntervalRef(0, 4).intersect(IntervalRef(4, 4)) is None


class TestStepFn:
    def test_negative_unsigned_rejected(self, grid4):
        with pytest.raises(PreconditionError):
            StepFn(grid4, -np.ones(16))

    def test_non_finite_rejected(self, grid4):
        values = np.ones(16)
        values[3] = np.nan
        with pytest.raises(PreconditionError):
            StepFn(grid4, values)

    def test_wrong_size(self, grid4):
        with pytest.raises(ArgumentError):
            StepFn(grid4, np.ones(15))

    def test_power_keeps_zeros(self, grid4):
        values = np.arange(16, dtype=float)
        out = StepFn(grid4, values).power(2.0)
        np.testing.assert_allclose(out.values, values ** 2)

    def test_negative_power_of_zero_fails(self, grid4):
        with pytest.raises(PreconditionError):
            StepFn(grid4, np.arange(16, dtype=float)).power(-1.0)

    def test_interval_sums_match_direct(self, grid6, rng):
        f = StepFn(grid6, rng.random(64))
        starts, lengths = interval_arrays(grid6, ALL_ALIGNED)
        expected = [f.values[s:s + n].sum() / 64 for s, n in zip(starts, lengths)]
        np.testing.assert_allclose(f.interval_sums(starts, lengths), expected, rtol=1e-12)

    def test_restricted(self, grid4):
        f = StepFn.constant(grid4, 2.0).restricted(IntervalRef(4, 4))
        assert integrate(f, grid4.whole()) == pytest.approx(0.5)
        assert average(f, IntervalRef(4, 4)) == pytest.approx(2.0)


class TestNorms:
    def test_lp_norm_of_ones(self, grid4):
        assert lp_norm(StepFn.constant(grid4, 1.0), 3.0) == pytest.approx(1.0)

    def test_weighted_norm(self, grid4):
        f = StepFn.constant(grid4, 1.0)
        w = StepFn.constant(grid4, 4.0)
        assert lp_norm(f, 2.0, w) == pytest.approx(2.0)

    def test_inner(self, grid4, rng):
        f, g = StepFn(grid4, rng.random(16)), StepFn(grid4, rng.random(16))
        assert inner(f, g) == pytest.approx(np.dot(f.values, g.values) / 16)


class TestEnumeration:
    def test_dyadic_count(self, grid4):
        starts, lengths = interval_arrays(grid4, DYADIC)
        assert starts.size == 31
        assert lengths[0] == 16
        assert np.all(np.diff(lengths) <= 0)

    def test_all_aligned_count(self, grid4):
        starts, _ = interval_arrays(grid4, ALL_ALIGNED)
        assert starts.size == 54

    def test_dyadic_budget_too_small(self, grid4):
        with pytest.raises(PreconditionError):
            interval_arrays(grid4, DYADIC, budget=10)

    def test_aligned_budget_truncates(self, grid4):
        starts, lengths = interval_arrays(grid4, ALL_ALIGNED, budget=10)
        assert starts.size == 10
        assert lengths[0] == 16

    def test_within_window(self, grid4):
        intervals = enumerate_intervals(grid4, DYADIC, within=IntervalRef(8, 8))
        assert len(intervals) == 15
        assert all(IntervalRef(8, 8).contains(i) for i in intervals)

    def test_unknown_mode(self, grid4):
        with pytest.raises(ArgumentError):
            interval_arrays(grid4, "everything")


class TestSerialization:
    def test_save_and_load(self, tmp_path, rng):
        grid = Grid(3, span=1)
        f = StepFn(grid, rng.random(16))
        path = save_stepfn(f, str(tmp_path / "f.csv"))
        loaded = load_stepfn(str(path))
        assert loaded.grid == grid
        np.testing.assert_allclose(loaded.values, f.values)
