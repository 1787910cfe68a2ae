# File: bumpwall/cli.py
# ===========================
# COMMAND-LINE ENTRY POINT
# ===========================

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

# Add the current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

import config
from analysis.bump import BumpSpec, weight_pair_bump
from analysis.exceptions import WorkbenchError
from analysis.grid import Grid
from analysis.normest import allogl_op, identity_op, opnorm_lower, sparse_op
from analysis.orlicz import luxemburg_norm, parse_young
from analysis.sparse import random_sparse_family
from experiments.report import FAIL, INCONCLUSIVE, RECORDED, ExperimentReport, Stopwatch
from utils.helpers import parse_weight

logger = logging.getLogger(__name__)

OPERATORS = ("identity", "sparse", "allogl")


class UsageError(Exception):
    pass


class WorkbenchParser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2"""

    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", dest="config_file", help="key = value configuration file")
    common.add_argument("--p", type=float)
    common.add_argument("--m", type=int)
    common.add_argument("--levels", type=int)
    common.add_argument("--span", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--mode", choices=["dyadic", "all_aligned"])
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--jobs", type=int)
    common.add_argument("--no-ledger", dest="ledger", action="store_const", const=False)
    common.add_argument("--log-level", dest="log_level", default="WARNING")
    return common


def build_parser() -> WorkbenchParser:
    common = _common_flags()
    parser = WorkbenchParser(prog="bumpwall", description="Two-weight bump-condition workbench")
    sub = parser.add_subparsers(dest="command", parser_class=WorkbenchParser)

    norm = sub.add_parser("orlicz-norm", parents=[common], help="Luxemburg norm of a weight on the whole grid")
    norm.add_argument("--young", required=True, help="plog:p:alpha, poverlog:p:mu or linlog:alpha")
    norm.add_argument("--f")

    bump = sub.add_parser("bump", parents=[common], help="bump constant of a weight pair")
    bump.add_argument("--preset")
    bump.add_argument("--A", dest="young_a")
    bump.add_argument("--B", dest="young_b")
    bump.add_argument("--u")
    bump.add_argument("--v")
    bump.add_argument("--delta", type=float)
    bump.add_argument("--eps", type=float)

    opnorm = sub.add_parser("opnorm", parents=[common], help="certified operator-norm lower bound")
    opnorm.add_argument("--op", choices=OPERATORS)
    opnorm.add_argument("--u")
    opnorm.add_argument("--v")
    opnorm.add_argument("--depth", type=int)
    opnorm.add_argument("--budget", type=int)

    exp = sub.add_parser("experiment", parents=[common], help="named experiment driver")
    exp.add_argument("target", choices=config.EXPERIMENTS)
    exp.add_argument("--a-list", dest="a_list", type=_float_list)
    exp.add_argument("--p-list", dest="p_list", type=_float_list)
    exp.add_argument("--N", type=int)
    exp.add_argument("--N1", type=int)
    exp.add_argument("--theorem")
    exp.add_argument("--kind")
    exp.add_argument("--family")
    exp.add_argument("--u")
    exp.add_argument("--count", type=int)
    exp.add_argument("--depth", type=int)
    exp.add_argument("--budget", type=int)
    exp.add_argument("--m-max", dest="m_max", type=int)
    exp.add_argument("--m-list", dest="m_list", type=_int_list)
    exp.add_argument("--resolution-factor", dest="resolution_factor", type=float)

    ledger = sub.add_parser("ledger", parents=[common], help="run ledger maintenance")
    ledger.add_argument("target", choices=config.LEDGER_ACTIONS)
    ledger.add_argument("--path")
    return parser


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'")


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def resolve_config(argv: Optional[List[str]] = None) -> config.RunConfig:
    """Flags merged over an optional config file, validated"""
    args = vars(build_parser().parse_args(argv))
    if not args.get("command"):
        raise UsageError("a command is required")
    config.setup_logging(args.pop("log_level"))
    file_values = config.load_config_file(args["config_file"]) if args.get("config_file") else {}
    args.pop("config_file", None)
    return config.merge(file_values, args)


# ============ COMMANDS ============

def _grid(cfg: config.RunConfig) -> Grid:
    return Grid(cfg.levels, cfg.span)


def _require_p(cfg: config.RunConfig) -> float:
    if cfg.p is None:
        raise UsageError(f"--p is required for {cfg.command}")
    return cfg.p


def run_orlicz_norm(cfg: config.RunConfig) -> ExperimentReport:
    report = ExperimentReport("orlicz-norm", cfg.to_dict(), seed=cfg.seed)
    with Stopwatch(report):
        if not cfg.young:
            raise UsageError("--young is required for orlicz-norm")
        grid = _grid(cfg)
        phi = parse_young(cfg.young)
        f = parse_weight(cfg.f, grid)
        value = luxemburg_norm(f, grid.whole(), phi)
        report.rows.append({"young": phi.label, "f": cfg.f, "value": value})
        report.constants["value"] = value
        report.verdicts["value"] = RECORDED
    return report


def run_bump(cfg: config.RunConfig) -> ExperimentReport:
    p = _require_p(cfg)
    report = ExperimentReport("bump", cfg.to_dict(), seed=cfg.seed)
    with Stopwatch(report):
        grid = _grid(cfg)
        A = parse_young(cfg.young_a) if cfg.young_a else None
        B = parse_young(cfg.young_b) if cfg.young_b else None
        spec = BumpSpec(A, B, p, cfg.m, cfg.preset, cfg.delta, cfg.eps)
        u, v = parse_weight(cfg.u, grid, "u"), parse_weight(cfg.v, grid, "v")
        result = weight_pair_bump(u, v, spec, cfg.mode)
        report.rows = result.profile
        report.constants["value"] = result.value
        report.constants["argmax_start"] = result.argmax.start
        report.constants["argmax_length"] = result.argmax.length
        report.verdicts["value"] = RECORDED
    return report


def run_opnorm(cfg: config.RunConfig) -> ExperimentReport:
    p = _require_p(cfg)
    report = ExperimentReport("opnorm", cfg.to_dict(), seed=cfg.seed)
    with Stopwatch(report):
        grid = _grid(cfg)
        u, v = parse_weight(cfg.u, grid, "u"), parse_weight(cfg.v, grid, "v")
        if cfg.op == "identity":
            op = identity_op()
        else:
            family = random_sparse_family(grid, cfg.depth, 0.5, np.random.default_rng(cfg.seed))
            op = sparse_op(family) if cfg.op == "sparse" else allogl_op(family, cfg.m)
        estimate = opnorm_lower(op, p, u, v, cfg.budget, cfg.seed)
        report.rows.append({"op": op.name, **estimate.to_dict()})
        report.constants["lower"] = estimate.lower
        report.verdicts["lower"] = RECORDED
    return report


def run_experiment(cfg: config.RunConfig) -> ExperimentReport:
    """Dispatch to the named experiment driver"""
    params = cfg.to_dict()
    p = cfg.p if cfg.p is not None else 2.0
    if cfg.target == "calc":
        from experiments.localized import run_prop_calc
        return run_prop_calc(p, cfg.a_list or None, parameters=params)
    if cfg.target == "example":
        from experiments.example_scan import run_example_scan
        return run_example_scan(p, cfg.N, cfg.N1, cfg.mode, parameters=params)
    if cfg.target == "dual2":
        from experiments.dual2 import run_dual2_sweep
        m_max = cfg.m if cfg.m > 0 else cfg.m_max
        return run_dual2_sweep(m_max, cfg.count, cfg.depth, cfg.levels, cfg.seed, cfg.jobs,
                               resolution_factor=cfg.resolution_factor, parameters=params)
    if cfg.target == "sufficiency":
        from experiments.sufficiency import run_sufficiency_sweep
        return run_sufficiency_sweep(cfg.theorem, cfg.p_list or [p], cfg.m_list or [cfg.m], cfg.kind, cfg.count,
                                     cfg.levels, cfg.depth, cfg.seed, cfg.budget, cfg.jobs,
                                     resolution_factor=cfg.resolution_factor, parameters=params)
    if cfg.target == "neccond":
        from experiments.neccond import run_neccond_probe
        return run_neccond_probe(p, cfg.m, cfg.family, cfg.levels, u_spec=cfg.u, parameters=params)
    if cfg.target == "orlicz":
        from experiments.orlicz_checks import DEFAULT_P_LIST as ORLICZ_P_LIST, run_orlicz_checks
        levels = (cfg.levels, cfg.levels + 2, cfg.levels + 4)
        return run_orlicz_checks(cfg.count, levels=levels, p_list=cfg.p_list or ORLICZ_P_LIST, seed=cfg.seed,
                                 mode=cfg.mode, steady_factor=cfg.resolution_factor, parameters=params)
    from experiments.lsu import DEFAULT_P_LIST, run_lsu_sweep
    return run_lsu_sweep(cfg.p_list or DEFAULT_P_LIST, cfg.count, cfg.depth, cfg.levels, cfg.seed,
                         cfg.budget, cfg.jobs, resolution_factor=cfg.resolution_factor, parameters=params)


def run_ledger(cfg: config.RunConfig) -> int:
    """Ledger maintenance; prints listings or written paths"""
    from admin.ledger_tools import backup_ledger, export_ledger_to_json, import_ledger_from_json
    from database.operations import load_runs
    if cfg.target == "list":
        for run in load_runs():
            print(f"{run.id}\t{run.name}\t{run.verdict}\t{run.created_at.isoformat()}\t{run.report_path}")
        return config.EXIT_PASS
    if cfg.target == "export":
        text = export_ledger_to_json()
        if not text:
            return config.EXIT_FAIL
        if cfg.path:
            Path(cfg.path).write_text(text)
            print(cfg.path)
        else:
            print(text)
        return config.EXIT_PASS
    if cfg.target == "import":
        if not cfg.path:
            raise UsageError("--path is required for ledger import")
        ok, message = import_ledger_from_json(Path(cfg.path).read_text())
        print(message)
        return config.EXIT_PASS if ok else config.EXIT_FAIL
    backup = backup_ledger(cfg.path or config.BACKUP_DIR)
    if backup is None:
        return config.EXIT_FAIL
    print(backup)
    return config.EXIT_PASS


COMMAND_RUNNERS = {
    "orlicz-norm": run_orlicz_norm,
    "bump": run_bump,
    "opnorm": run_opnorm,
    "experiment": run_experiment,
}


def exit_code(verdict: str) -> int:
    if verdict == FAIL:
        return config.EXIT_FAIL
    if verdict == INCONCLUSIVE:
        return config.EXIT_INCONCLUSIVE
    return config.EXIT_PASS


def record(cfg: config.RunConfig, report: ExperimentReport, json_path: Path) -> Optional[int]:
    from database.init_db import init_db
    from database.operations import save_run
    init_db()
    scalars: Dict[str, object] = {k: v for k, v in report.constants.items() if not isinstance(v, (list, dict))}
    return save_run(report.name, cfg.command, report.overall, report.seed, cfg.to_dict(), scalars,
                    str(json_path), report.wall_time)


def dispatch(cfg: config.RunConfig) -> int:
    """Run the configured command, write artifacts, print one summary line"""
    if cfg.command == "ledger":
        from database.init_db import init_db
        init_db()
        return run_ledger(cfg)
    report = COMMAND_RUNNERS[cfg.command](cfg)
    json_path, _ = report.write(cfg.output_dir)
    if cfg.ledger and cfg.command == "experiment":
        if record(cfg, report, json_path) is None:
            logger.warning("run was not recorded in the ledger")
    print(report.summary())
    return exit_code(report.overall)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        cfg = resolve_config(argv)
        return dispatch(cfg)
    except (UsageError, config.ConfigError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return config.EXIT_USAGE
    except WorkbenchError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return config.EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
