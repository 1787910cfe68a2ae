import json

import numpy as np
import pytest

from experiments.report import (FAIL, INCONCLUSIVE, PASS, RECORDED, ExperimentReport, Stopwatch, combine,
                                fit_slope, load_report, load_table, resolution_verdict, slope_verdict)


class TestSlopes:
    def test_exact_line(self):
        x = np.linspace(0.0, 3.0, 7)
        fit = fit_slope(x, 2.0 * x + 1.0)
        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.r2 == pytest.approx(1.0)
        np.testing.assert_allclose(fit.residuals, 0.0, atol=1e-12)

    def test_close_slope_passes(self):
        x = np.arange(6.0)
        assert slope_verdict(fit_slope(x, 0.5 * x), 0.5, 0.15) == PASS

    def test_far_slope_fails(self):
        x = np.arange(6.0)
        assert slope_verdict(fit_slope(x, 2.0 * x), 0.5, 0.15) == FAIL

    def test_noisy_fit_inconclusive(self):
        x = np.arange(6.0)
        y = np.array([0.0, 3.0, -2.0, 4.0, -1.0, 2.0])
        assert slope_verdict(fit_slope(x, y), 2.0, 0.15) == INCONCLUSIVE

    def test_flat_target_ignores_r2(self):
        x = np.arange(6.0)
        y = 1.0 + 0.01 * np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
        fit = fit_slope(x, y)
        assert fit.r2 < 0.8
        assert slope_verdict(fit, 0.0, 0.15) == PASS


class TestVerdicts:
    @pytest.mark.parametrize("coarse, fine, expected", [
        (1.0, 1.5, PASS),
        (1.0, 3.0, FAIL),
        (float("nan"), 1.0, FAIL),
        (0.0, 0.0, PASS),
        (0.0, 1.0, INCONCLUSIVE),
    ])
    def test_resolution(self, coarse, fine, expected):
        assert resolution_verdict(coarse, fine) == expected

    def test_combine(self):
        assert combine({"a": PASS, "b": FAIL, "c": INCONCLUSIVE}) == FAIL
        assert combine({"a": PASS, "b": INCONCLUSIVE}) == INCONCLUSIVE
        assert combine({"a": PASS, "b": RECORDED}) == PASS
        assert combine({"a": RECORDED}) == RECORDED
        assert combine({}) == RECORDED


class TestExperimentReport:
    @pytest.fixture
    def report(self):
        report = ExperimentReport("demo", {"p": 2.0}, seed=3)
        report.rows = [{"a": 0.1, "value": 1.0 / 3.0}, {"a": 0.01, "value": 2.0}]
        report.constants = {"C": 2.0, "count": 2, "profile": [1, 2]}
        report.verdicts = {"bound": PASS}
        report.fits["slope"] = fit_slope([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
        return report

    def test_write_and_load(self, report, tmp_path):
        json_path, csv_path = report.write(str(tmp_path / "out"))
        data = load_report(str(json_path))
        assert data["overall"] == PASS
        assert data["parameters"] == {"p": 2.0}
        assert data["fits"]["slope"]["slope"] == pytest.approx(1.0)
        table = load_table(str(csv_path))
        assert list(table.columns) == ["a", "value"]
        assert len(table) == 2

    def test_rewrite_is_byte_identical(self, report, tmp_path):
        _, first = report.write(str(tmp_path / "one"))
        _, second = report.write(str(tmp_path / "two"))
        assert first.read_bytes() == second.read_bytes()

    def test_json_is_sorted(self, report, tmp_path):
        json_path, _ = report.write(str(tmp_path))
        keys = list(json.loads(json_path.read_text()).keys())
        assert keys == sorted(keys)

    def test_summary_skips_lists(self, report):
        assert report.summary() == "demo: PASS (C=2, count=2)"

    def test_stopwatch(self, report):
        with Stopwatch(report):
            sum(range(1000))
        assert report.wall_time >= 0.0

    def test_missing_files(self, tmp_path):
        assert load_report(str(tmp_path / "missing.json")) is None
        assert load_table(str(tmp_path / "missing.csv")) is None
