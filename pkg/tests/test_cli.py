import json

import pytest

import config
from cli import main, resolve_config
from database.operations import load_runs


def _bump_args(tmp_path, *extra):
    return ["bump", "--preset", "ap", "--p", "2", "--u", "ones", "--v", "ones", "--levels", "4",
            "--output-dir", str(tmp_path), *extra]


class TestUsage:
    def test_no_command(self):
        assert main([]) == config.EXIT_USAGE

    def test_unknown_command(self):
        assert main(["plot"]) == config.EXIT_USAGE

    def test_bump_needs_p(self, tmp_path):
        assert main(["bump", "--preset", "ap", "--output-dir", str(tmp_path)]) == config.EXIT_USAGE

    def test_p_out_of_range(self, tmp_path):
        assert main(["bump", "--preset", "ap", "--p", "0.5", "--output-dir", str(tmp_path)]) == config.EXIT_USAGE

    def test_config_file_fills_flags(self, tmp_path):
        conf = tmp_path / "bump.conf"
        conf.write_text("p = 3\nlevels = 5\npreset = ap\n")
        cfg = resolve_config(["bump", "--config", str(conf), "--levels", "6"])
        assert cfg.p == 3.0
        assert cfg.levels == 6
        assert cfg.preset == "ap"


class TestCommands:
    def test_bump_flat_pair(self, tmp_path, capsys):
        assert main(_bump_args(tmp_path)) == config.EXIT_PASS
        out = capsys.readouterr().out
        assert out.startswith("bump: RECORDED")
        assert "value=1" in out
        report = json.loads((tmp_path / "bump.report.json").read_text())
        assert report["parameters"]["command"] == "bump"
        assert (tmp_path / "bump.table.csv").exists()

    def test_bump_is_not_recorded(self, tmp_path, ledger):
        main(_bump_args(tmp_path))
        assert load_runs() == []

    def test_experiment_is_recorded(self, tmp_path, ledger):
        code = main(["experiment", "dual2", "--m", "2", "--count", "5", "--levels", "5", "--depth", "3",
                     "--output-dir", str(tmp_path)])
        assert report["verdicts"]["holder"] == report["verdicts"]["sandwich"] == "PASS"
        assert (tmp_path / "dual2.report.json").exists()
        runs = load_runs()
        assert len(runs) == 1
        assert runs[0].name == "dual2"
        assert runs[0].verdict == "PASS"

    def test_no_ledger_flag(self, tmp_path, ledger):
        main(["experiment", "dual2", "--m", "1", "--count", "2", "--levels", "4", "--depth", "2",
              "--output-dir", str(tmp_path), "--no-ledger"])
        assert load_runs() == []

    def test_ledger_export(self, tmp_path, ledger, capsys):
        target = tmp_path / "ledger.json"
        assert main(["ledger", "export", "--path", str(target)]) == config.EXIT_PASS
        assert json.loads(target.read_text())["runs_count"] == 0


class TestWeightFlags:
    @pytest.mark.parametrize("weight", ["power:2", "spike:5:0.25"])
    def test_weight_specs_accepted(self, tmp_path, weight):
        args = _bump_args(tmp_path)
        args[args.index("--u") + 1] = weight
        assert main(args) == config.EXIT_PASS

    def test_unknown_weight_fails(self, tmp_path):
        args = _bump_args(tmp_path)
        args[args.index("--u") + 1] = "cusp:1"
        assert main(args) == config.EXIT_FAIL


class TestSweepLists:
    def test_list_flags_parse(self):
        cfg = resolve_config(["experiment", "sufficiency", "--p-list", "1.5,3", "--m-list", "0,2"])
        assert cfg.p_list == [1.5, 3.0]
        assert cfg.m_list == [0, 2]

    def test_bad_order_list(self):
        assert main(["experiment", "sufficiency", "--m-list", "0,x"]) == config.EXIT_USAGE
        assert main(["experiment", "sufficiency", "--m-list", "1,7"]) == config.EXIT_USAGE

    def test_sufficiency_runs_every_pair(self, tmp_path):
        main(["experiment", "sufficiency", "--kind", "ones", "--p-list", "2", "--m-list", "0,1", "--count", "1",
              "--levels", "4", "--depth", "2", "--budget", "10", "--output-dir", str(tmp_path), "--no-ledger"])
        report = json.loads((tmp_path / "sufficiency.report.json").read_text())
        assert {"resolution_p2_m0", "resolution_p2_m1", "m0_coincide"} <= set(report["verdicts"])

    def test_orlicz_checks_three_resolutions(self, tmp_path):
        main(["experiment", "orlicz", "--count", "1", "--levels", "6", "--p-list", "2", "--seed", "3",
              "--output-dir", str(tmp_path), "--no-ledger"])
        report = json.loads((tmp_path / "orlicz.report.json").read_text())
        assert report["parameters"]["levels"] == 6
        assert {"maxlog_k3_L6", "maxlog_k3_L8", "maxlog_k3_L10"} <= set(report["constants"])
        assert report["verdicts"]["holder"] == report["verdicts"]["sandwich"] == "PASS"
