import numpy as np
import pytest

from analysis.czops import disjoint_partner
from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import Grid, StepFn
from experiments.dual2 import run_dual2_sweep, smooth_profile
from experiments.instances import (LOCALIZED_A, LOCALIZED_U_FLOOR, make_instance, make_instances, refine,
                                   run_parallel)
from experiments.lsu import lsu_instance, run_lsu_sweep
from experiments.neccond import (PARTNER_GAP, doubling_constant, probe_interval, run_neccond_probe,
                                 sigma_profile)
from experiments.report import FAIL, PASS, RECORDED, VERDICTS
from experiments.sufficiency import DEFAULT_M_LIST, DEFAULT_P_LIST, run_sufficiency_sweep


class TestInstances:
    @pytest.mark.parametrize("kind", ["ones", "power", "localized"])
    def test_weights_positive_at_two_resolutions(self, kind):
        grid = Grid(5)
        inst = make_instance(kind, 0, np.random.default_rng(1), 2.0, grid, 3)
        for g in (grid, refine(grid)):
            u, v = inst.weights(g)
            assert np.all(u.values > 0) and np.all(v.values > 0)
            family = inst.family(g)
            assert len(family) == len(inst.cubes)
            assert inst.coefficients(family).aligned(family).shape == (len(family),)

    def test_localized_u_takes_three_levels(self):
        inst = make_instance("localized", 0, np.random.default_rng(2), 2.0, Grid(10), 3)
        u, _ = inst.weights(Grid(10))
        levels = [1.0 / LOCALIZED_A, LOCALIZED_A, LOCALIZED_U_FLOOR]
        assert np.all(np.isin(u.values, levels))
        for level in levels:
            assert np.any(u.values == level)

    def test_unknown_generator(self):
        with pytest.raises(ArgumentError):
            make_instance("uniform", 0, np.random.default_rng(0), 2.0, Grid(4), 2)

    def test_seeded_draws_repeat(self):
        first = make_instances("power", 3, 5, 2.0, Grid(5), 3)
        second = make_instances("power", 3, 5, 2.0, Grid(5), 3)
        assert [i.params for i in first] == [i.params for i in second]
        assert [i.cubes for i in first] == [i.cubes for i in second]

    def test_parallel_keeps_order(self):
        items = list(range(20))
        assert run_parallel(lambda x: x * x, items, jobs=4) == [x * x for x in items]
        assert run_parallel(lambda x: x + 1, items, jobs=1) == [x + 1 for x in items]


class TestDual2Sweep:
    def test_small_sweep(self):
        report = run_dual2_sweep(m_max=2, count=5, depth=4, levels=6, seed=3)
        table = report.table()
        assert len(report.rows) == 10
        assert set(table["levels"]) == {6, 8}
        assert report.verdicts["m1_bound"] == PASS
        assert report.verdicts["m2"] == RECORDED
        assert report.verdicts["resolution_m1"] == PASS
        assert report.verdicts["resolution_m2"] == PASS
        assert report.verdicts["adjoint"] == PASS
        assert report.constants["adjoint_residual"] <= 1e-10
        assert report.constants["C_m1"] == max(report.constants["C_m1_L6"], report.constants["C_m1_L8"])
        assert report.constants["C_m1"] <= 2.0
        assert report.overall == PASS

    def test_ratios_agree_across_resolutions(self):
        report = run_dual2_sweep(m_max=2, count=3, depth=3, levels=6, seed=8)
        table = report.table()
        for _, pair in table.groupby("seed"):
            coarse, fine = pair.sort_values("levels")[["ratio_m1", "ratio_m2"]].to_numpy()
            np.testing.assert_allclose(coarse, fine, rtol=0.05)

    def test_jobs_do_not_change_results(self):
        serial = run_dual2_sweep(m_max=1, count=4, depth=3, levels=5, seed=1, jobs=1)
        threaded = run_dual2_sweep(m_max=1, count=4, depth=3, levels=5, seed=1, jobs=2)
        assert serial.rows == threaded.rows

    def test_smooth_profile_is_positive(self):
        profile = smooth_profile(np.random.default_rng(0))
        x = np.linspace(0.0, 1.0, 101)
        assert np.all(profile(x) > 0)
        assert profile(0.25) == pytest.approx(profile(np.array([0.25]))[0])


class TestSufficiencySweep:
    def test_m0_terms_coincide(self):
        report = run_sufficiency_sweep("extbctbm", p_list=[2.0], m_list=[0], kind="ones", count=2, levels=5,
                                       depth=2, seed=0, budget=20)
        assert report.verdicts["m0_coincide"] == PASS
        assert report.constants["m0_term_gap"] == 0.0
        assert len(report.rows) == 4

    def test_power_instances(self):
        report = run_sufficiency_sweep("corpc", p_list=[2.0], m_list=[1], kind="power", count=2, levels=5,
                                       depth=2, seed=4, budget=20)
        table = report.table()
        assert set(table["levels"]) == {5, 7}
        assert np.all(table["lhs"] >= table[["lhs_primal", "lhs_mirror"]].max(axis=1))
        assert np.isfinite(report.constants["C_slack"]) and report.constants["C_slack"] > 0
        assert report.verdicts["resolution_p2_m1"] in VERDICTS

    def test_sweeps_every_exponent_and_order(self):
        report = run_sufficiency_sweep("extbctbm", p_list=[1.5, 3.0], m_list=[0, 1], kind="ones", count=1,
                                       levels=4, depth=2, seed=1, budget=10)
        table = report.table()
        assert len(report.rows) == 8
        assert set(zip(table["p"], table["m"])) == {(1.5, 0), (1.5, 1), (3.0, 0), (3.0, 1)}
        for tag in ("p1.5_m0", "p1.5_m1", "p3_m0", "p3_m1"):
            assert report.verdicts[f"resolution_{tag}"] in VERDICTS
            assert {f"C_slack_{tag}_L4", f"C_slack_{tag}_L6"} <= set(report.constants)
        per_pair = [v for k, v in report.constants.items() if k.count("_") == 3 and k.startswith("C_slack_p")]
        assert report.constants["C_slack"] == max(per_pair)
        assert report.verdicts["m0_coincide"] == PASS

    def test_defaults_cover_three_exponents_and_orders(self):
        assert DEFAULT_P_LIST == (1.5, 2.0, 3.0)
        assert DEFAULT_M_LIST == (0, 1, 2)

    def test_unknown_theorem(self):
        with pytest.raises(ArgumentError):
            run_sufficiency_sweep("extbctbm_A", count=1)

    def test_empty_lists(self):
        with pytest.raises(ArgumentError):
            run_sufficiency_sweep("corpc", p_list=[], count=1)


class TestNeccondProbe:
    def test_doubling_of_flat_weight(self, grid6):
        assert doubling_constant(StepFn.constant(grid6, 1.0)) == pytest.approx(2.0)

    def test_probe_needs_fine_grid(self):
        with pytest.raises(PreconditionError):
            probe_interval(Grid(7))

    def test_unknown_family(self):
        grid = Grid(8)
        with pytest.raises(ArgumentError):
            sigma_profile("cusp", 1, grid, probe_interval(grid))
        with pytest.raises(ArgumentError):
            run_neccond_probe(family="cusp")

    def test_spike_co_growth(self):
        report = run_neccond_probe(p=2.0, m=1, family="spike", levels=8, scales=4)
        table = report.table()
        assert np.all(np.diff(table["necessary"]) > 0)
        assert np.all(np.diff(table["probe"]) > 0)
        assert report.constants["rank_correlation"] == pytest.approx(1.0)
        assert report.verdicts["co_growth"] == PASS

    def test_flat_family_bounded(self):
        report = run_neccond_probe(p=2.0, m=1, family="ones", levels=8, scales=3)
        assert report.verdicts["bounded"] == PASS
        assert report.constants["probe_max"] == 0.0

    def test_flat_sigma_with_power_u_stays_level(self):
        report = run_neccond_probe(p=2.0, m=0, family="ones", levels=8, scales=3, u_spec="power:0.5")
        table = report.table()
        assert report.constants["probe_max"] > 0
        np.testing.assert_allclose(table["probe"], table["probe"].iloc[0], rtol=1e-12)
        np.testing.assert_allclose(table["necessary"], table["necessary"].iloc[0], rtol=1e-12)
        assert report.verdicts["bounded"] == PASS

    def test_spike_co_growth_under_power_u(self):
        flat = run_neccond_probe(p=2.0, m=1, family="spike", levels=8, scales=4)
        tilted = run_neccond_probe(p=2.0, m=1, family="spike", levels=8, scales=4, u_spec="power:0.5")
        grid = Grid(8)
        partner = disjoint_partner(probe_interval(grid), PARTNER_GAP, grid).interval
        u_tilde = np.mean(grid.centers()[partner.start:partner.stop] ** 0.5)
        np.testing.assert_allclose(tilted.table()["u_tilde"], u_tilde, rtol=1e-12)
        np.testing.assert_allclose(tilted.table()["probe"], flat.table()["probe"] * np.sqrt(u_tilde), rtol=1e-10)
        assert not np.allclose(tilted.table()["necessary"], flat.table()["necessary"])
        assert np.all(np.diff(tilted.table()["necessary"]) > 0)
        assert tilted.constants["rank_correlation"] >= 0.9
        assert tilted.verdicts["co_growth"] == PASS

    def test_u_must_be_positive(self):
        with pytest.raises(PreconditionError):
            run_neccond_probe(family="ones", levels=10, scales=1, u_spec="appendix:0.005:2")


class TestLsuSweep:
    def test_easy_direction_holds(self):
        report = run_lsu_sweep(p_list=[2.0], count=2, depth=3, levels=4, seed=2, budget=20)
        assert report.verdicts["easy"] == PASS
        assert report.constants["easy_failures"] == 0
        assert {"C_L4", "C_L6", "C"} <= set(report.constants)
        assert len(report.rows) == 4

    def test_single_instance(self):
        row = lsu_instance(Grid(4), 3, 7, 1.5, 20)
        assert row["easy_ok"]
        assert row["C"] > 0
        assert row["T_out"] > 0 and row["T_in"] > 0

    def test_verdict_values(self):
        report = run_lsu_sweep(p_list=[3.0], count=1, depth=2, levels=4, seed=0, budget=10)
        assert report.verdicts["hard_stability"] in (PASS, FAIL, "INCONCLUSIVE")
