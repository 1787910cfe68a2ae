# File: bumpwall/experiments/lsu.py
# ===========================
# SAWYER TESTING SWEEP
# ===========================

import logging
from typing import Optional, Sequence

import numpy as np

from analysis.grid import Grid, StepFn
from analysis.normest import lsu_lower, testing_constants
from analysis.sparse import CoefSeq, random_sparse_family
from experiments.instances import refine, run_parallel
from experiments.report import FAIL, PASS, RESOLUTION_FACTOR, ExperimentReport, Stopwatch, resolution_verdict

logger = logging.getLogger(__name__)

DEFAULT_P_LIST = (1.5, 2.0, 3.0)
DEFAULT_COUNT = 100
DEFAULT_DEPTH = 6
LSU_BUDGET = 500
EASY_RTOL = 1e-12


def lsu_instance(grid: Grid, depth: int, seed: int, p: float, budget: int) -> dict:
    """Testing constants and norm lower bounds for one random (S, τ, σ, u)"""
    rng = np.random.default_rng(seed)
    family = random_sparse_family(grid, depth, 0.5, rng)
    tau = CoefSeq.from_array(family, rng.lognormal(0.0, 0.5, len(family)))
    sigma = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
    u = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
    t_out, t_in = testing_constants(family, tau, sigma, u, p)
    primal, dual = lsu_lower(family, tau, sigma, u, p, budget, seed, max_depth=depth)
    lower = max(primal.lower, dual.lower)
    testing = t_out + t_in
    return {"seed": seed, "p": p, "levels": grid.levels, "cubes": len(family),
            "T_out": t_out, "T_in": t_in, "primal": primal.lower, "dual": dual.lower,
            "easy_ok": lower >= max(t_out, t_in) * (1 - EASY_RTOL),
            "C": lower / testing if testing > 0 else 0.0}


def run_lsu_sweep(p_list: Sequence[float] = DEFAULT_P_LIST, count: int = DEFAULT_COUNT,
                  depth: int = DEFAULT_DEPTH, levels: int = 6, seed: int = 0, budget: int = LSU_BUDGET,
                  jobs: int = 1, resolution_factor: float = RESOLUTION_FACTOR,
                  parameters: Optional[dict] = None) -> ExperimentReport:
    """Both directions of the testing characterization for T_{S,τ}(·σ)"""
    p_list = list(p_list)
    report = ExperimentReport("lsu", parameters or {
        "p_list": p_list, "count": count, "depth": depth, "levels": levels, "budget": budget}, seed=seed)
    with Stopwatch(report):
        coarse = Grid(levels)
        fine = refine(coarse)
        per_p = max(1, count // len(p_list))
        tasks = [(grid, seed * 100_003 + i, p) for p in p_list for i in range(per_p) for grid in (coarse, fine)]
        report.rows = run_parallel(lambda t: lsu_instance(t[0], depth, t[1], t[2], budget), tasks, jobs)
        table = report.table()
        failures = int((~table["easy_ok"].astype(bool)).sum())
        report.constants["easy_failures"] = failures
        report.verdicts["easy"] = PASS if failures == 0 else FAIL
        worst = {g.levels: float(table.loc[table["levels"] == g.levels, "C"].max()) for g in (coarse, fine)}
        for lv, c in worst.items():
            report.constants[f"C_L{lv}"] = c
        report.constants["C"] = max(worst.values())
        report.verdicts["hard_stability"] = resolution_verdict(worst[coarse.levels], worst[fine.levels],
                                                               resolution_factor)
        logger.info("lsu: %d easy failures, hard constant %.4g / %.4g", failures,
                    worst[coarse.levels], worst[fine.levels])
    return report
