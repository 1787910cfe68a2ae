# File: bumpwall/experiments/example_scan.py
# ===========================
# SEPARATED-BUMP EXAMPLE SCAN
# ===========================

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from analysis.bump import BumpSpec
from analysis.exceptions import PreconditionError
from analysis.grid import ALL_ALIGNED, DYADIC
from experiments.localized import append_localized, interval_products
from experiments.multiscale import Anchor, GluedMesh
from experiments.report import (FAIL, PASS, ExperimentReport, Stopwatch, fit_slope,
                                slope_verdict)

logger = logging.getLogger(__name__)

CLAIMS = {"cl1": "b1", "cl2": "b2", "cl3": "b3"}
CL3_TARGET = 0.5
CL3_TOL = 0.15
# bounded claims: max over blocks within this factor of the median
MEDIAN_FACTOR = 3.0
CASES = ("case1", "case2", "case3")


@dataclass
class ExampleMesh:
    mesh: GluedMesh
    blocks: Dict[int, List[int]] = field(default_factory=dict)
    gaps: Dict[int, int] = field(default_factory=dict)
    low: int = 0

    def block_of(self) -> np.ndarray:
        """Block index n for every piece, −1 off the blocks"""
        owner = np.full(len(self.mesh), -1)
        for n, pieces in self.blocks.items():
            owner[pieces] = n
        return owner


def build_example_mesh(p: float, N: int, N1: int) -> ExampleMesh:
    """u = Σ u_{I_n}, v = χ_{[0,e^N)} + Σ v_{I_n} + Σ e^n χ_{gaps} on [0, e^{N1} + 1]"""
    if N1 < N:
        raise PreconditionError("N1 must be at least N")
    mesh = GluedMesh()
    out = ExampleMesh(mesh)
    out.low = mesh.append(math.exp(N), 0.0, 1.0, "low")
    for n in range(N, N1 + 1):
        try:
            out.blocks[n] = append_localized(mesh, math.exp(-n), p, f"I{n}")
        except PreconditionError as e:
            raise PreconditionError(f"block n={n} is infeasible: {e}") from e
        b = n ** -0.5
        gap = 1.0 - b if n == N1 else math.exp(n + 1) - math.exp(n) - b
        out.gaps[n] = mesh.append(gap, 0.0, math.exp(n), f"gap{n}")
    logger.debug("example mesh with %d pieces for n in [%d, %d]", len(mesh), N, N1)
    return out


def _offsets(mode: str) -> List[float]:
    if mode == DYADIC:
        return [0.0, 0.5]
    fine = [0.0, 0.25, 0.5, 0.75]
    fine += [2.0 ** -j for j in range(3, 8)] + [1 - 2.0 ** -j for j in range(3, 8)]
    return sorted(set(fine))


def block_anchors(ex: ExampleMesh, n: int, mode: str) -> List[Anchor]:
    mesh = ex.mesh
    anchors = [Anchor(i, f * mesh.lengths[i]) for i in ex.blocks[n] for f in _offsets(mode)]
    anchors.append(mesh.stop(ex.blocks[n][-1]))
    return [mesh.normalize(a) for a in anchors]


def outside_anchors(ex: ExampleMesh, piece: int, b: float, before: bool) -> List[Anchor]:
    """Points at geometric distances from the adjacent block inside a gap piece"""
    length = ex.mesh.lengths[piece]
    dists = [b * 2.0 ** k for k in range(-3, 64) if b * 2.0 ** k < length] + [length]
    return [ex.mesh.normalize(Anchor(piece, length - d if before else d)) for d in dists]


def scan_intervals(ex: ExampleMesh, mode: str) -> Dict[str, List[Tuple[Anchor, Anchor]]]:
    """Interval candidates per case: inside one block, straddling one block, several blocks"""
    cases: Dict[str, List[Tuple[Anchor, Anchor]]] = {c: [] for c in CASES}
    coarse: List[Anchor] = [Anchor(ex.low, 0.0), Anchor(ex.low, ex.mesh.lengths[ex.low] / 2)]
    for n, pieces in ex.blocks.items():
        inner = block_anchors(ex, n, mode)
        cases["case1"] += [(lo, hi) for i, lo in enumerate(inner) for hi in inner[i + 1:]]
        b = n ** -0.5
        prev_piece = ex.low if n == min(ex.blocks) else ex.gaps[n - 1]
        left = outside_anchors(ex, prev_piece, b, before=True)
        right = outside_anchors(ex, ex.gaps[n], b, before=False)
        cases["case2"] += [(lo, hi) for lo in left for hi in inner[1:] + right]
        cases["case2"] += [(lo, hi) for lo in inner[:-1] for hi in right]
        gap_len = ex.mesh.lengths[ex.gaps[n]]
        coarse += [ex.mesh.start(pieces[0]), ex.mesh.stop(pieces[0]), ex.mesh.stop(pieces[-1]),
                   Anchor(ex.gaps[n], gap_len / 2), ex.mesh.stop(ex.gaps[n])]
    coarse = sorted({ex.mesh.normalize(a) for a in coarse})
    cases["case3"] = [(lo, hi) for i, lo in enumerate(coarse) for hi in coarse[i + 1:]]
    return cases


def classify(ex: ExampleMesh, overlaps: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(blocks touched, largest block touched, measure outside blocks) per row"""
    owner = ex.block_of()
    ns = sorted(ex.blocks)
    touched = np.stack([(overlaps[:, owner == n] > 0).any(axis=1) for n in ns], axis=1)
    count = touched.sum(axis=1)
    last = np.where(count > 0, (touched * np.array(ns)).max(axis=1), -1)
    outside = overlaps[:, owner < 0].sum(axis=1)
    return count, last, outside


def run_example_scan(p: float = 2.0, N: int = 8, N1: int = 18, mode: str = ALL_ALIGNED,
                     parameters: Optional[dict] = None) -> ExperimentReport:
    """Bounded (cl1), (cl2) and n^{1/2} growth of (cl3) over the glued example"""
    report = ExperimentReport("example", parameters or {"p": p, "N": N, "N1": N1, "mode": mode})
    with Stopwatch(report):
        ex = build_example_mesh(p, N, N1)
        mesh = ex.mesh
        specs = {claim: BumpSpec(p=p, preset=preset) for claim, preset in CLAIMS.items()}
        per_block = {n: {"n": n, "cl3_on_block": interval_products(mesh, ex.blocks[n], p)["b3"]}
                     for n in ex.blocks}
        u2 = np.asarray(mesh.u) ** 2
        for case, intervals in scan_intervals(ex, mode).items():
            overlaps = mesh.overlaps(intervals)
            count, last, outside = classify(ex, overlaps)
            if case == "case1":
                keep = (count == 1) & (outside == 0)
            elif case == "case2":
                keep = (count == 1) & (outside > 0)
            else:
                keep = count >= 2
            overlaps, last = overlaps[keep], last[keep]
            products = {claim: mesh.bump_products(overlaps, p, s.A, s.B) for claim, s in specs.items()}
            u2_ratio = mesh.integrals(u2, overlaps) / overlaps.sum(axis=1)
            for n in ex.blocks:
                rows = last == n
                row = per_block[n]
                row[f"{case}_count"] = int(rows.sum())
                for claim in ("cl1", "cl2", "cl3"):
                    row[f"{case}_{claim}"] = float(products[claim][rows].max(initial=0.0))
                if case == "case3":
                    row["case3_u2"] = float(u2_ratio[rows].max(initial=0.0))
            logger.info("%s: %d intervals", case, int(keep.sum()))
        report.rows = [per_block[n] for n in sorted(per_block)]
        table = report.table()
        for claim in ("cl1", "cl2"):
            worst = table[[f"{c}_{claim}" for c in CASES]].max(axis=1)
            table[f"{claim}_sup"] = worst
            report.constants[f"{claim}_sup"] = float(worst.max())
            report.verdicts[claim] = PASS if worst.max() <= MEDIAN_FACTOR * worst.median() else FAIL
        for i, row in enumerate(report.rows):
            row["cl1_sup"] = float(table["cl1_sup"].iloc[i])
            row["cl2_sup"] = float(table["cl2_sup"].iloc[i])
        if len(table) >= 3:
            fit = fit_slope(np.log(table["n"]), np.log(table["cl3_on_block"]))
            report.fits["cl3"] = fit
            report.verdicts["cl3"] = slope_verdict(fit, CL3_TARGET, CL3_TOL)
        report.constants["cl3_max"] = float(table["cl3_on_block"].max())
        if "case3_u2" in table:
            u2_max = table["case3_u2"]
            report.constants["case3_u2_C"] = float(u2_max.max())
            positive = u2_max[u2_max > 0]
            bounded = positive.empty or positive.max() <= MEDIAN_FACTOR * positive.median()
            report.verdicts["case3_u2"] = PASS if bounded else FAIL
    return report
