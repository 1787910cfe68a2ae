import numpy as np
import pytest

from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import Grid, IntervalRef, StepFn, inner
from analysis.sparse import (CoefSeq, SparseFamily, apply_ALlogLm, apply_AS, apply_AS_eta_iter, apply_Tm,
                             apply_TStau, assign_witnesses, augment_family, build_sparse_cz, carleson_power_sum,
                             counting_function, cov_ratio, dual2_ratio, family_from_cubes, pointwise_tm_ratio,
                             random_sparse_family, verify_sparsity)


@pytest.fixture
def small_family():
    """Whole grid, its left half, right half and left quarter on 8 cells"""
    grid = Grid(3)
    cubes = [IntervalRef(0, 8), IntervalRef(0, 4), IntervalRef(4, 4), IntervalRef(0, 2)]
    return family_from_cubes(grid, cubes, 0.25)


@pytest.fixture
def random_family(grid6):
    return random_sparse_family(grid6, 4, 0.5, np.random.default_rng(11))


class TestFamilies:
    def test_hand_family_structure(self, small_family):
        assert verify_sparsity(small_family)
        assert small_family.cubes[0] == IntervalRef(0, 8)
        np.testing.assert_array_equal(small_family.parent, [-1, 0, 0, 1])

    def test_tree_sums(self, small_family):
        ones = np.ones(4)
        np.testing.assert_allclose(small_family.subtree_sums(ones), [4, 2, 1, 1])
        np.testing.assert_allclose(small_family.path_sums(ones), [1, 2, 2, 3])

    def test_counting_function(self, small_family):
        np.testing.assert_allclose(counting_function(small_family), [3, 3, 2, 2, 2, 2, 2, 2])

    def test_half_density_infeasible(self):
        cubes = [IntervalRef(0, 8), IntervalRef(0, 4), IntervalRef(4, 4), IntervalRef(0, 2)]
        assert assign_witnesses(Grid(3), cubes, 0.5) is None

    def test_full_witness_nested_fails(self):
        assert family_from_cubes(Grid(3), [IntervalRef(0, 8), IntervalRef(0, 4)], 1.0) is None

    def test_random_family_is_sparse(self, random_family, grid6):
        assert verify_sparsity(random_family)
        assert random_family.cubes[0] == grid6.whole()
        assert all(q.is_dyadic() for q in random_family.cubes)

    def test_overlapping_witnesses_rejected(self):
        grid = Grid(3)
        family = SparseFamily(grid, (IntervalRef(0, 8), IntervalRef(0, 4)), (((0, 4),), ((0, 2),)), 0.5)
        assert not verify_sparsity(family)

    def test_non_dyadic_root(self, grid6):
        with pytest.raises(PreconditionError):
            random_sparse_family(grid6, 2, 0.5, np.random.default_rng(0), root=IntervalRef(1, 8))

    def test_cz_family_is_sparse(self, grid6, rng):
        f = StepFn(grid6, rng.lognormal(0.0, 1.5, 64))
        family = build_sparse_cz(f)
        assert family.alpha == pytest.approx(0.5)
        assert verify_sparsity(family)

    def test_json_roundtrip(self, random_family):
        restored = SparseFamily.from_json(random_family.to_json())
        assert restored.cubes == random_family.cubes
        assert restored.witnesses == random_family.witnesses


class TestAugmentation:
    def test_keeps_original_cubes(self, random_family, rng):
        b = StepFn(random_family.grid, rng.normal(size=64), signed=True)
        augmented = augment_family(random_family, b)
        assert set(random_family.cubes) <= set(augmented.cubes)
        assert augmented.alpha <= random_family.alpha / 2 + 1e-12 or augmented is random_family

    def test_constant_symbol_adds_nothing(self, random_family):
        b = StepFn.constant(random_family.grid, 3.0)
        assert augment_family(random_family, b) is random_family


class TestCoefficients:
    def test_negative_rejected(self, small_family):
        with pytest.raises(ArgumentError):
            CoefSeq({small_family.cubes[0]: -1.0})

    def test_stray_cube_rejected(self, small_family):
        tau = CoefSeq({IntervalRef(6, 2): 1.0})
        with pytest.raises(ArgumentError):
            tau.aligned(small_family)


class TestOperators:
    def test_AS_of_ones_counts(self, random_family):
        f = StepFn.constant(random_family.grid, 1.0)
        np.testing.assert_allclose(apply_AS(random_family, f).values, counting_function(random_family))

    def test_TStau_unit_is_AS(self, random_family, rng):
        f = StepFn(random_family.grid, rng.random(64))
        tau = CoefSeq.constant(random_family, 1.0)
        np.testing.assert_allclose(apply_TStau(random_family, tau, f).values, apply_AS(random_family, f).values)

    def test_TStau_localized(self, small_family):
        f = StepFn.constant(small_family.grid, 1.0)
        tau = CoefSeq.constant(small_family, 2.0)
        out = apply_TStau(small_family, tau, f, R=IntervalRef(0, 4))
        np.testing.assert_allclose(out.values, [4, 4, 2, 2, 0, 0, 0, 0])
        with pytest.raises(ArgumentError):
            apply_TStau(small_family, tau, f, R=IntervalRef(6, 2))

    def test_eta_iteration(self, random_family, rng):
        f = StepFn(random_family.grid, rng.random(64))
        eta = StepFn.constant(random_family.grid, 1.0)
        twice = apply_AS(random_family, apply_AS(random_family, f))
        np.testing.assert_allclose(apply_AS_eta_iter(random_family, eta, f, 2).values, twice.values)
        with pytest.raises(PreconditionError):
            apply_AS_eta_iter(random_family, StepFn.constant(random_family.grid, 0.0), f, 1)

    def test_llogl_dominates_average(self, random_family, rng):
        f = StepFn(random_family.grid, rng.lognormal(0.0, 1.0, 64))
        plain = apply_AS(random_family, f).values
        bumped = apply_ALlogLm(random_family, f, 1).values
        assert np.all(bumped >= plain * (1 - 1e-9))
        np.testing.assert_allclose(apply_ALlogLm(random_family, f, 0).values, plain)

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_Tm_adjointness(self, random_family, rng, m):
        f = StepFn(random_family.grid, rng.random(64))
        g = StepFn(random_family.grid, rng.random(64))
        lhs = inner(apply_Tm(random_family, f, m), g)
        rhs = inner(f, apply_Tm(random_family, g, m, adjoint=True))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_Tm_needs_positive_m(self, random_family):
        with pytest.raises(ArgumentError):
            apply_Tm(random_family, StepFn.constant(random_family.grid, 1.0), 0)


class TestInequalities:
    def test_single_cube_dual2(self, grid4, rng):
        family = family_from_cubes(grid4, [grid4.whole()], 0.5)
        f = StepFn(grid4, rng.random(16))
        g = StepFn(grid4, rng.random(16))
        assert dual2_ratio(family, f, g, 1) == pytest.approx(0.5)

    def test_dual2_zero_input(self, random_family):
        zero = StepFn.constant(random_family.grid, 0.0)
        assert dual2_ratio(random_family, zero, zero, 1) == 0.0

    def test_dual2_m1_bound(self, grid6):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            family = random_sparse_family(grid6, 5, 0.6, rng)
            f = StepFn(grid6, rng.lognormal(0.0, 1.0, 64))
            g = StepFn(grid6, rng.lognormal(0.0, 1.0, 64))
            assert dual2_ratio(family, f, g, 1) <= 2.0

    def test_pointwise_ratio(self, random_family, rng):
        f = StepFn(random_family.grid, rng.lognormal(0.0, 1.0, 64))
        ratio = pointwise_tm_ratio(random_family, f, 1)
        assert np.isfinite(ratio) and ratio > 0

    def test_carleson_sum(self, random_family):
        w = StepFn.constant(random_family.grid, 1.0)
        total = carleson_power_sum(random_family, w, random_family.cubes[0], 0.5)
        assert 1.0 <= total <= 2.0 + 1e-12
        with pytest.raises(ArgumentError):
            carleson_power_sum(random_family, w, random_family.cubes[0], 1.0)

    def test_cov_ratio(self, random_family, rng):
        w = StepFn(random_family.grid, rng.lognormal(0.0, 1.0, 64))
        coef = rng.random(len(random_family))
        ratio = cov_ratio(random_family, coef, w, 2.0)
        assert np.isfinite(ratio) and ratio > 0
