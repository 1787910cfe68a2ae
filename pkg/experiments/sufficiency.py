# File: bumpwall/experiments/sufficiency.py
# ===========================
# SUFFICIENCY SWEEPS
# ===========================

import logging
from typing import Optional, Sequence

import numpy as np

from analysis.bump import dual_exponent, theorem_rhs
from analysis.exceptions import ArgumentError
from analysis.grid import DYADIC, Grid
from analysis.normest import allogl_op, opnorm_lower
from experiments.instances import Instance, make_instances, refine, run_parallel
from experiments.report import FAIL, PASS, RESOLUTION_FACTOR, ExperimentReport, Stopwatch, resolution_verdict

logger = logging.getLogger(__name__)

SWEEP_THEOREMS = ("extbctbm", "sepbumex", "corpc")
DEFAULT_COUNT = 50
DEFAULT_DEPTH = 4
SWEEP_BUDGET = 1000
COINCIDE_RTOL = 1e-9
DEFAULT_P_LIST = (1.5, 2.0, 3.0)
DEFAULT_M_LIST = (0, 1, 2)


def instance_rows(inst: Instance, theorem: str, p: float, m: int, grid: Grid, depth: int,
                  budget: int, seed: int, mode: str = DYADIC) -> dict:
    """LHS, RHS and their ratio for one instance at one resolution"""
    q = dual_exponent(p)
    u, v = inst.weights(grid)
    family = inst.family(grid)
    op = allogl_op(family, m)
    max_depth = depth + 2
    primal = opnorm_lower(op, p, u, v, budget, seed, max_depth=max_depth)
    mirror = opnorm_lower(op, q, v.power(1.0 - q), u.power(1.0 - q), budget, seed, max_depth=max_depth)
    rhs = theorem_rhs(theorem, u, v, p, m, mode)
    lhs = max(primal.lower, mirror.lower)
    row = {"instance": inst.index, "kind": inst.kind, "levels": grid.levels, "cubes": len(family),
           "lhs_primal": primal.lower, "lhs_mirror": mirror.lower, "lhs": lhs,
           **{f"rhs_{k}": val for k, val in rhs.items()}}
    row["ratio"] = lhs / rhs["total"] if rhs["total"] > 0 else float("inf")
    return row


def run_sufficiency_sweep(theorem: str = "extbctbm", p_list: Sequence[float] = DEFAULT_P_LIST,
                          m_list: Sequence[int] = DEFAULT_M_LIST, kind: str = "power",
                          count: int = DEFAULT_COUNT, levels: int = 8, depth: int = DEFAULT_DEPTH,
                          seed: int = 0, budget: int = SWEEP_BUDGET, jobs: int = 1,
                          resolution_factor: float = RESOLUTION_FACTOR,
                          parameters: Optional[dict] = None) -> ExperimentReport:
    """Operator-norm lower bounds of A_{L(log L)^m,S} against a theorem's bump right side, per (p, m)"""
    if theorem not in SWEEP_THEOREMS:
        raise ArgumentError(f"theorem must be one of {SWEEP_THEOREMS}")
    if not p_list or not m_list:
        raise ArgumentError("sufficiency sweeps need at least one p and one m")
    report = ExperimentReport("sufficiency", parameters or {
        "theorem": theorem, "p_list": list(p_list), "m_list": list(m_list), "kind": kind, "count": count,
        "levels": levels, "depth": depth, "budget": budget}, seed=seed)
    with Stopwatch(report):
        coarse = Grid(levels)
        fine = refine(coarse)
        tasks = []
        for p in p_list:
            # the same seed gives every p the same families and power exponents
            instances = make_instances(kind, count, seed, p, coarse, depth)
            tasks += [(inst, p, m, grid) for m in m_list for inst in instances for grid in (coarse, fine)]

        def evaluate(task):
            inst, p, m, grid = task
            row = instance_rows(inst, theorem, p, m, grid, depth, budget, seed + inst.index)
            return {"p": p, "m": m, **row}

        report.rows = run_parallel(evaluate, tasks, jobs)
        table = report.table()
        overall = []
        for p in p_list:
            for m in m_list:
                tag = f"p{p:g}_m{m}"
                pair = table[(table["p"] == p) & (table["m"] == m)]
                slack = {}
                for grid in (coarse, fine):
                    slack[grid.levels] = float(pair.loc[pair["levels"] == grid.levels, "ratio"].max())
                    report.constants[f"C_slack_{tag}_L{grid.levels}"] = slack[grid.levels]
                report.constants[f"C_slack_{tag}"] = max(slack.values())
                report.verdicts[f"resolution_{tag}"] = resolution_verdict(
                    slack[coarse.levels], slack[fine.levels], resolution_factor)
                overall.append(max(slack.values()))
                logger.info("%s p=%g m=%d: C_slack %.4g at L=%d, %.4g at L=%d", theorem, p, m,
                            slack[coarse.levels], coarse.levels, slack[fine.levels], fine.levels)
        report.constants["C_slack"] = max(overall)
        if 0 in m_list and theorem == "extbctbm":
            flat = table[table["m"] == 0]
            gap = np.abs(flat["rhs_alpha_beta"] - flat["rhs_beta_alpha"])
            scale = np.maximum(np.abs(flat["rhs_alpha_beta"]), 1e-300)
            worst = float((gap / scale).max())
            report.constants["m0_term_gap"] = worst
            report.verdicts["m0_coincide"] = PASS if worst <= COINCIDE_RTOL else FAIL
    return report
