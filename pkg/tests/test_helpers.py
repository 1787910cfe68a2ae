from datetime import datetime, timedelta

import numpy as np
import pytest

from analysis.exceptions import ArgumentError
from analysis.grid import Grid, StepFn, save_stepfn
from utils.helpers import get_time_ago, parse_weight, report_summary, verdict_badge


class TestParseWeight:
    def test_ones(self, grid4):
        np.testing.assert_array_equal(parse_weight("ones", grid4).values, 1.0)

    def test_power(self, grid4):
        w = parse_weight("power:1", grid4)
        np.testing.assert_allclose(w.values, grid4.centers())

    def test_spike(self, grid4):
        w = parse_weight("spike:5:0.25", grid4)
        np.testing.assert_array_equal(w.values[6:10], 5.0)
        assert np.count_nonzero(w.values == 1.0) == 12

    def test_file(self, grid4, tmp_path):
        path = str(tmp_path / "w.csv")
        save_stepfn(StepFn(grid4, np.arange(1.0, 17.0)), path)
        np.testing.assert_array_equal(parse_weight(f"file:{path}", grid4).values, np.arange(1.0, 17.0))

    def test_file_on_other_grid(self, grid4, tmp_path):
        path = str(tmp_path / "w.csv")
        save_stepfn(StepFn.constant(Grid(5), 1.0), path)
        with pytest.raises(ArgumentError):
            parse_weight(f"file:{path}", grid4)

    @pytest.mark.parametrize("text", ["cusp", "ones:2", "power", "power:x", "spike:5"])
    def test_rejects(self, grid4, text):
        with pytest.raises(ArgumentError):
            parse_weight(text, grid4)


class TestDisplayHelpers:
    def test_badges(self):
        assert verdict_badge("PASS") == "🟢 PASS"
        assert verdict_badge(None) == "❔ UNKNOWN"

    def test_report_summary(self):
        report = {"name": "lsu", "overall": "FAIL", "verdicts": {"easy": "PASS", "hard": "FAIL"}}
        assert report_summary(report) == "lsu: FAIL with 2 verdicts (hard not passing)"

    def test_time_ago(self):
        now = datetime.now()
        assert get_time_ago(now) == "just now"
        assert get_time_ago(now - timedelta(minutes=5)) == "5 minutes ago"
        assert get_time_ago(now - timedelta(hours=1, minutes=1)) == "1 hour ago"
        assert get_time_ago(now - timedelta(days=3)) == "3 days ago"


class TestConstantsFrame:
    def test_sorted_and_formatted(self):
        from ui.components import constants_frame
        frame = constants_frame({"value": 1.0 / 3.0, "count": 4})
        assert list(frame["name"]) == ["count", "value"]
        assert list(frame["value"]) == ["4", "0.333333"]

    def test_empty(self):
        from ui.components import constants_frame
        assert constants_frame({}).empty
