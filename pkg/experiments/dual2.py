# File: bumpwall/experiments/dual2.py
# ===========================
# ITERATED SPARSE FORM SWEEP
# ===========================

import logging
import math
from typing import Callable, List, Optional

import numpy as np

from analysis.exceptions import PreconditionError
from analysis.grid import Grid, IntervalRef, StepFn, inner
from analysis.sparse import DEFAULT_ALPHA, apply_Tm, dual2_ratio, family_from_cubes, random_sparse_family
from experiments.instances import refine, run_parallel
from experiments.report import (FAIL, PASS, RECORDED, RESOLUTION_FACTOR, ExperimentReport, Stopwatch,
                                resolution_verdict)

logger = logging.getLogger(__name__)

M1_BOUND = 2.0
DEFAULT_COUNT = 100
DEFAULT_DEPTH = 8
SMOOTH_MODES = 4
ADJOINT_RTOL = 1e-10


def smooth_profile(rng: np.random.Generator, modes: int = SMOOTH_MODES) -> Callable[[np.ndarray], np.ndarray]:
    """exp of a random trigonometric sum; positive and resolution-free"""
    amplitudes = rng.normal(0.0, 0.5, modes) / np.arange(1, modes + 1)
    phases = rng.uniform(0.0, 2 * math.pi, modes)

    def profile(x):
        x = np.asarray(x, dtype=float)
        waves = [a * np.sin(2 * math.pi * (j + 1) * x + ph) for j, (a, ph) in enumerate(zip(amplitudes, phases))]
        return np.exp(np.sum(waves, axis=0))

    return profile


def adjoint_residual(family, f: StepFn, g: StepFn, m: int) -> float:
    """|⟨T_m f, g⟩ − ⟨f, T_m* g⟩| relative to ⟨T_m f, g⟩"""
    lhs = inner(apply_Tm(family, f, m), g)
    rhs = inner(f, apply_Tm(family, g, m, adjoint=True))
    return abs(lhs - rhs) / max(abs(lhs), 1e-300)


def family_ratio(grids: List[Grid], depth: int, seed: int, m_max: int) -> List[dict]:
    """dual2 ratios of one random family and one smooth (f, g) pair, one row per grid"""
    rng = np.random.default_rng(seed)
    coarse = grids[0]
    drawn = random_sparse_family(coarse, depth, 0.5, rng)
    cubes = [(q.start * coarse.cell_width, q.length * coarse.cell_width) for q in drawn.cubes]
    f_fn, g_fn = smooth_profile(rng), smooth_profile(rng)
    rows = []
    for grid in grids:
        h = grid.cell_width
        family = family_from_cubes(grid, [IntervalRef(int(round(s / h)), int(round(n / h))) for s, n in cubes],
                                   DEFAULT_ALPHA)
        if family is None:
            raise PreconditionError(f"family {seed} loses sparsity at {grid.cells} cells")
        f, g = StepFn.from_function(grid, f_fn), StepFn.from_function(grid, g_fn)
        row = {"seed": seed, "levels": grid.levels, "cubes": len(family)}
        for m in range(1, m_max + 1):
            row[f"ratio_m{m}"] = dual2_ratio(family, f, g, m)
        row["adjoint_residual"] = max(adjoint_residual(family, f, g, m) for m in range(1, m_max + 1))
        rows.append(row)
    return rows


def run_dual2_sweep(m_max: int = 3, count: int = DEFAULT_COUNT, depth: int = DEFAULT_DEPTH,
                    levels: int = 8, seed: int = 0, jobs: int = 1, resolution_factor: float = RESOLUTION_FACTOR,
                    parameters: Optional[dict] = None) -> ExperimentReport:
    """Per-m maxima of ⟨A^{m+1}f, g⟩ / (⟨T_m f, g⟩ + ⟨T_m* f, g⟩) over random families at two resolutions"""
    report = ExperimentReport("dual2", parameters or {
        "m_max": m_max, "count": count, "depth": depth, "levels": levels}, seed=seed)
    with Stopwatch(report):
        coarse = Grid(levels)
        fine = refine(coarse)
        seeds = [seed * 100_003 + i for i in range(count)]
        per_family = run_parallel(lambda s: family_ratio([coarse, fine], depth, s, m_max), seeds, jobs)
        report.rows = [row for rows in per_family for row in rows]
        table = report.table()
        for m in range(1, m_max + 1):
            worst = {}
            for grid in (coarse, fine):
                worst[grid.levels] = float(table.loc[table["levels"] == grid.levels, f"ratio_m{m}"].max())
                report.constants[f"C_m{m}_L{grid.levels}"] = worst[grid.levels]
            overall = max(worst.values())
            report.constants[f"C_m{m}"] = overall
            report.verdicts[f"resolution_m{m}"] = resolution_verdict(worst[coarse.levels], worst[fine.levels],
                                                                     resolution_factor)
            if m == 1:
                report.verdicts["m1_bound"] = PASS if overall <= M1_BOUND else FAIL
            else:
                report.verdicts[f"m{m}"] = RECORDED
            logger.info("m=%d: max ratio %.6g at L=%d, %.6g at L=%d over %d families", m,
                        worst[coarse.levels], coarse.levels, worst[fine.levels], fine.levels, count)
        residual = float(table["adjoint_residual"].max())
        report.constants["adjoint_residual"] = residual
        report.verdicts["adjoint"] = PASS if residual <= ADJOINT_RTOL else FAIL
    return report
