# File: bumpwall/experiments/orlicz_checks.py
# ===========================
# YOUNG-FUNCTION INEQUALITY SWEEPS
# ===========================

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.bump import EQLOG_BAND
from analysis.grid import DYADIC, Grid, StepFn
from analysis.orlicz import (ComplementaryFn, YoungFn, bp_integral, duality_sandwich, holder_condition,
                             lin_log, log_average, luxemburg_norm, maximal_lp_ratio, maxlog_ratio, power_log,
                             power_over_log, tabulated)
from experiments.report import FAIL, PASS, RECORDED, ExperimentReport, Stopwatch, combine, resolution_verdict

logger = logging.getLogger(__name__)

DEFAULT_COUNT = 20
DEFAULT_PROFILES = 5
CHECK_LEVELS = (8, 10, 12)
HOLDER_LEVELS = 6
HOLDER_BOUND = 2.0
SANDWICH_BAND = (1.0, 2.0)
SANDWICH_RTOL = 1e-4
# table-backed complements carry interpolation error of this order
TABLE_RTOL = 1e-4
EQLOG_ALPHAS = (0, 1, 2, 3, 4)
MAX_K = 3
STEADY_FACTOR = 1.5
DEFAULT_P_LIST = (1.5, 2.0, 3.0)
SINGULAR_EPS = 2.0 ** -16
# (a, alpha, b): t^a log^alpha(e+t) with t^b, checked against t^c for 1/c = 1/a + 1/b
POWER_TRIPLES = ((2.0, 0.0, 2.0), (2.0, 1.0, 2.0), (3.0, 0.0, 1.5), (4.0, 0.5, 4.0), (3.0, 1.0, 6.0))

Profile = Callable[[np.ndarray], np.ndarray]


def young_families() -> List[YoungFn]:
    """One or two members of every Young family, plus a convex table"""
    t = np.logspace(-4, 4, 81)
    table = tabulated(t, np.where(t < 1.0, t ** 2, t ** 3))
    return [power_log(2.0, 1.0), power_log(3.0, 0.5), power_over_log(2.0, 0.5), power_over_log(3.0, 1.0),
            lin_log(1.0), lin_log(2.0), table]


def singular_profile(x0: float, gamma: float) -> Profile:
    """(|x − x0| + ε)^{−γ}; the same function at every resolution"""
    return lambda x: (np.abs(np.asarray(x, dtype=float) - x0) + SINGULAR_EPS) ** -gamma


def draw_profiles(rng: np.random.Generator, count: int, gamma_max: float) -> List[Tuple[float, float]]:
    """(x0, γ) pairs with γ spread over [0, gamma_max)"""
    return [(float(rng.uniform(0.0, 1.0)), float(gamma_max * k / count)) for k in range(count)]


def _steady(by_level: Dict[int, float], factor: float) -> str:
    levels = sorted(by_level)
    return combine({str(lo): resolution_verdict(by_level[lo], by_level[hi], factor)
                    for lo, hi in zip(levels, levels[1:])})


# ============ HÖLDER AND DUALITY ============

def holder_rows(families: Sequence[YoungFn], complements: Sequence[ComplementaryFn], count: int,
                rng: np.random.Generator) -> List[dict]:
    """‖fg‖_{L^1} / (‖f‖_Φ‖g‖_Φ̄) and power-triple factors on random positive pairs"""
    grid = Grid(HOLDER_LEVELS)
    whole = grid.whole()
    one = power_log(1.0)
    rows = []
    for phi, complement in zip(families, complements):
        comp = complement.as_young()
        for case in range(count):
            f = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
            g = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
            lhs = luxemburg_norm(f.times(g), whole, one)
            factor = lhs / (luxemburg_norm(f, whole, phi) * luxemburg_norm(g, whole, comp))
            rows.append({"check": "holder", "young": phi.label, "case": case, "factor": float(factor)})
    for a, alpha, b in POWER_TRIPLES:
        A, B, C = power_log(a, alpha), power_log(b), power_log(1.0 / (1.0 / a + 1.0 / b))
        pointwise = holder_condition(A, B, C)
        for case in range(count):
            f = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
            g = StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))
            lhs = luxemburg_norm(f.times(g), whole, C)
            factor = lhs / (luxemburg_norm(f, whole, A) * luxemburg_norm(g, whole, B))
            rows.append({"check": "holder_power", "young": f"{A.label}·{B.label}→{C.label}", "case": case,
                         "factor": float(factor), "pointwise": pointwise})
    return rows


def sandwich_rows(families: Sequence[YoungFn], complements: Sequence[ComplementaryFn],
                  points: int = 50) -> List[dict]:
    """Φ̄^{-1}(t)Φ^{-1}(t)/t on a log grid of t"""
    t = np.logspace(-2, 4, points)
    rows = []
    for phi, complement in zip(families, complements):
        ratio = duality_sandwich(phi, t, complement)
        rows.append({"check": "sandwich", "young": phi.label, "min": float(ratio.min()),
                     "max": float(ratio.max())})
    return rows


# ============ LOG AVERAGES AND ITERATED MAXIMAL FUNCTIONS ============

def eqlog_rows(profiles: Sequence[Tuple[float, float]], levels: Sequence[int]) -> List[dict]:
    """(1/|I|)∫ f log^α(f/f_I + e) over ‖f‖_{L(log L)^α} on the whole domain"""
    rows = []
    for L in levels:
        grid = Grid(L)
        for index, (x0, gamma) in enumerate(profiles):
            f = StepFn.from_function(grid, singular_profile(x0, gamma))
            for alpha in EQLOG_ALPHAS:
                ratio = log_average(f, grid.whole(), alpha) / luxemburg_norm(f, grid.whole(), lin_log(alpha))
                rows.append({"check": "eqlog", "profile": index, "gamma": gamma, "levels": L, "alpha": alpha,
                             "ratio": float(ratio)})
    return rows


def maxlog_rows(profiles: Sequence[Tuple[float, float]], levels: Sequence[int], mode: str = DYADIC) -> List[dict]:
    """avg M^k f over ‖f‖_{L(log L)^k} for k ≤ MAX_K"""
    rows = []
    for L in levels:
        grid = Grid(L)
        for index, (x0, gamma) in enumerate(profiles):
            f = StepFn.from_function(grid, singular_profile(x0, gamma))
            for k in range(MAX_K + 1):
                rows.append({"check": "maxlog", "profile": index, "gamma": gamma, "levels": L, "k": k,
                             "ratio": maxlog_ratio(f, grid.whole(), k, mode)})
    return rows


# ============ L^p BOUNDS OF ORLICZ MAXIMAL OPERATORS ============

def bp_families(p: float) -> List[YoungFn]:
    """t^p/log^2(e+t) and t^{(1+p)/2} log(e+t), both in B_p"""
    return [power_over_log(p, 1.0), power_log((1.0 + p) / 2.0, 1.0)]


def lp_rows(p_list: Sequence[float], levels: Sequence[int], rng: np.random.Generator,
            mode: str = DYADIC) -> List[dict]:
    """‖M_Φ f‖_{L^p}/‖f‖_{L^p} for B_p families on an L^p singular profile"""
    rows = []
    for p in p_list:
        x0 = float(rng.uniform(0.0, 1.0))
        profile = singular_profile(x0, 1.0 / (2.0 * p))
        for phi in bp_families(p):
            bp = bp_integral(phi, p)
            if not bp.is_bp:
                logger.warning("%s is not certified in B_%g (%s); skipped", phi.label, p, bp.verdict)
                continue
            for L in levels:
                f = StepFn.from_function(Grid(L), profile)
                rows.append({"check": "lp", "young": phi.label, "p": p, "levels": L,
                             "ratio": maximal_lp_ratio(f, phi, p, mode)})
    return rows


def run_orlicz_checks(count: int = DEFAULT_COUNT, profiles: int = DEFAULT_PROFILES,
                      levels: Sequence[int] = CHECK_LEVELS, p_list: Sequence[float] = DEFAULT_P_LIST,
                      seed: int = 0, mode: str = DYADIC, steady_factor: float = STEADY_FACTOR,
                      parameters: Optional[dict] = None) -> ExperimentReport:
    """Hölder, duality, log-average and maximal-operator inequalities over every Young family"""
    levels = sorted(levels)
    report = ExperimentReport("orlicz", parameters or {
        "count": count, "profiles": profiles, "levels": list(levels), "p_list": list(p_list), "mode": mode},
        seed=seed)
    with Stopwatch(report):
        rng = np.random.default_rng(seed)
        families = young_families()
        complements = [ComplementaryFn(phi) for phi in families]
        holder = holder_rows(families, complements, count, rng)
        sandwich = sandwich_rows(families, complements)
        drawn = draw_profiles(rng, profiles, 0.5)
        eqlog = eqlog_rows(drawn, levels)
        maxlog = maxlog_rows(drawn, levels, mode)
        lp = lp_rows(p_list, levels, rng, mode)
        report.rows = holder + sandwich + eqlog + maxlog + lp

        general = [r["factor"] for r in holder if r["check"] == "holder"]
        power = [r for r in holder if r["check"] == "holder_power"]
        report.constants["holder_max"] = max(general)
        report.constants["holder_power_max"] = max(r["factor"] for r in power)
        report.verdicts["holder"] = PASS if max(general) <= HOLDER_BOUND * (1 + TABLE_RTOL) else FAIL
        power_ok = all(r["pointwise"] and r["factor"] <= 1.0 + 1e-8 for r in power)
        report.verdicts["holder_power"] = PASS if power_ok else FAIL

        lo = min(r["min"] for r in sandwich)
        hi = max(r["max"] for r in sandwich)
        report.constants["sandwich_min"], report.constants["sandwich_max"] = lo, hi
        inside = lo >= SANDWICH_BAND[0] * (1 - 1e-6) and hi <= SANDWICH_BAND[1] * (1 + SANDWICH_RTOL)
        report.verdicts["sandwich"] = PASS if inside else FAIL

        ratios = [r["ratio"] for r in eqlog]
        report.constants["eqlog_min"], report.constants["eqlog_max"] = min(ratios), max(ratios)
        in_band = EQLOG_BAND[0] <= min(ratios) and max(ratios) <= EQLOG_BAND[1]
        report.verdicts["eqlog_band"] = PASS if in_band else FAIL
        for alpha in EQLOG_ALPHAS:
            by_level = {L: max(r["ratio"] for r in eqlog if r["alpha"] == alpha and r["levels"] == L)
                        for L in levels}
            report.verdicts[f"eqlog_a{alpha}"] = _steady(by_level, steady_factor)

        for k in range(MAX_K + 1):
            by_level = {L: max(r["ratio"] for r in maxlog if r["k"] == k and r["levels"] == L) for L in levels}
            for L, value in by_level.items():
                report.constants[f"maxlog_k{k}_L{L}"] = value
            report.constants[f"maxlog_k{k}"] = max(by_level.values())
            report.verdicts[f"maxlog_k{k}"] = _steady(by_level, steady_factor)
            logger.info("maxlog k=%d: %s", k, ", ".join(f"L={L}: {v:.4g}" for L, v in by_level.items()))

        for label, p in dict.fromkeys((r["young"], r["p"]) for r in lp):
            by_level = {r["levels"]: r["ratio"] for r in lp if r["young"] == label and r["p"] == p}
            report.constants[f"lp_{label}_p{p:g}"] = max(by_level.values())
            report.verdicts[f"lp_{label}_p{p:g}"] = _steady(by_level, steady_factor)
        if not lp:
            report.verdicts["lp"] = RECORDED
    return report
