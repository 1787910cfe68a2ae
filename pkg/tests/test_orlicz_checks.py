import numpy as np
import pytest

from analysis.bump import EQLOG_BAND
from analysis.grid import Grid, StepFn
from analysis.orlicz import ComplementaryFn, bp_integral, maximal_lp_ratio, power_log, power_over_log
from experiments.orlicz_checks import (EQLOG_ALPHAS, MAX_K, POWER_TRIPLES, bp_families, eqlog_rows, holder_rows,
                                       lp_rows, maxlog_rows, run_orlicz_checks, sandwich_rows, singular_profile,
                                       young_families)
from experiments.report import FAIL, PASS

PROFILES = [(0.37, 0.4), (0.71, 0.2), (0.5, 0.0)]
LEVELS = (8, 10, 12)


def _by_level(rows, key, value):
    out = {}
    for r in rows:
        if r[key] == value:
            out[r["levels"]] = max(out.get(r["levels"], 0.0), r["ratio"])
    return out


class TestHolderNorms:
    @pytest.mark.parametrize("index", range(7))
    def test_complementary_pair_within_two(self, index):
        phi = young_families()[index]
        rows = holder_rows([phi], [ComplementaryFn(phi)], 6, np.random.default_rng(index))
        general = [r["factor"] for r in rows if r["check"] == "holder"]
        assert len(general) == 6
        assert all(0 < factor <= 2.0 * (1 + 1e-4) for factor in general)

    def test_power_triples_within_one(self):
        rows = holder_rows([], [], 5, np.random.default_rng(3))
        assert len(rows) == 5 * len(POWER_TRIPLES)
        assert all(r["pointwise"] for r in rows)
        assert all(0 < r["factor"] <= 1.0 + 1e-8 for r in rows)


class TestDualitySandwich:
    @pytest.mark.parametrize("index", range(7))
    def test_every_family_in_band(self, index):
        phi = young_families()[index]
        row = sandwich_rows([phi], [ComplementaryFn(phi)])[0]
        assert row["min"] >= 1.0 - 1e-6
        assert row["max"] <= 2.0 * (1 + 1e-4)

    def test_square_touches_upper_edge(self):
        phi = power_log(2.0)
        row = sandwich_rows([phi], [ComplementaryFn(phi)])[0]
        assert row["min"] == pytest.approx(2.0, rel=1e-4)


class TestLogAverages:
    def test_eqlog_ratios_in_band(self):
        rows = eqlog_rows(PROFILES, LEVELS)
        assert len(rows) == len(PROFILES) * len(LEVELS) * len(EQLOG_ALPHAS)
        for r in rows:
            assert EQLOG_BAND[0] <= r["ratio"] <= EQLOG_BAND[1]
            if r["alpha"] == 0:
                assert r["ratio"] == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("alpha", EQLOG_ALPHAS)
    def test_eqlog_steady_over_resolutions(self, alpha):
        by_level = _by_level(eqlog_rows(PROFILES, LEVELS), "alpha", alpha)
        values = [by_level[L] for L in LEVELS]
        assert max(values) <= 1.5 * min(values)

    @pytest.mark.parametrize("k", range(MAX_K + 1))
    def test_maxlog_steady_over_resolutions(self, k):
        by_level = _by_level(maxlog_rows(PROFILES, LEVELS), "k", k)
        values = [by_level[L] for L in LEVELS]
        assert all(np.isfinite(values)) and min(values) > 0
        assert max(values) <= 1.5 * min(values)

    def test_maxlog_without_iteration_is_one(self):
        rows = maxlog_rows(PROFILES, (8,))
        for r in rows:
            if r["k"] == 0:
                assert r["ratio"] == pytest.approx(1.0, rel=1e-12)

    def test_singular_profile_is_resolution_free(self):
        profile = singular_profile(0.3, 0.4)
        coarse = StepFn.from_function(Grid(4), profile)
        fine = StepFn.from_function(Grid(6), profile)
        np.testing.assert_allclose(coarse.values, profile(Grid(4).centers()))
        assert np.all(fine.values > 0) and fine.values.max() > coarse.values.max()


class TestMaximalLp:
    def test_linear_young_on_constant(self, grid6):
        f = StepFn.constant(grid6, 2.0)
        assert maximal_lp_ratio(f, power_log(1.0), 2.0) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_bp_families_certified(self, p):
        for phi in bp_families(p):
            assert bp_integral(phi, p).is_bp

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_bp_bumps_stay_bounded_under_refinement(self, p):
        rows = lp_rows([p], LEVELS, np.random.default_rng(11))
        assert len(rows) == 2 * len(LEVELS)
        for label in {r["young"] for r in rows}:
            values = [r["ratio"] for r in rows if r["young"] == label]
            assert all(np.isfinite(values)) and min(values) > 0
            assert max(values) <= 1.5 * min(values)

    def test_damped_power_bump_direct(self):
        phi = power_over_log(2.0, 1.0)
        profile = singular_profile(0.6, 0.25)
        coarse = maximal_lp_ratio(StepFn.from_function(Grid(8), profile), phi, 2.0)
        fine = maximal_lp_ratio(StepFn.from_function(Grid(11), profile), phi, 2.0)
        assert fine <= 1.5 * coarse and coarse <= 1.5 * fine


class TestOrliczChecksRun:
    def test_small_run_passes(self):
        report = run_orlicz_checks(count=2, profiles=2, levels=(8, 10), p_list=(2.0,), seed=5)
        assert report.verdicts["holder"] == PASS
        assert report.verdicts["holder_power"] == PASS
        assert report.verdicts["sandwich"] == PASS
        assert report.verdicts["eqlog_band"] == PASS
        for k in range(MAX_K + 1):
            assert report.verdicts[f"maxlog_k{k}"] == PASS
            assert {f"maxlog_k{k}_L8", f"maxlog_k{k}_L10"} <= set(report.constants)
        assert report.constants["maxlog_k0"] == pytest.approx(1.0)
        assert report.constants["sandwich_max"] <= 2.0 * (1 + 1e-4)
        assert any(k.startswith("lp_") for k in report.verdicts)
        assert report.overall == PASS

    def test_rows_carry_every_check(self):
        report = run_orlicz_checks(count=1, profiles=1, levels=(8,), p_list=(3.0,), seed=0)
        checks = set(report.table()["check"])
        assert checks == {"holder", "holder_power", "sandwich", "eqlog", "maxlog", "lp"}
        assert FAIL not in report.verdicts.values()
