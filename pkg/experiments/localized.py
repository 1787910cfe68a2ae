# File: bumpwall/experiments/localized.py
# ===========================
# LOCALIZED WEIGHTS AND THE THREE-PRODUCT RATES
# ===========================

import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from analysis.bump import BumpSpec
from analysis.exceptions import PreconditionError
from analysis.grid import Grid, IntervalRef, StepFn
from experiments.multiscale import GluedMesh
from experiments.report import (PASS, FAIL, ExperimentReport, Stopwatch, fit_slope,
                                slope_verdict)

logger = logging.getLogger(__name__)

RATE_PRESETS = ("b1", "b2", "b3")
MIN_CELLS = 4
FLAT_TOL = 0.15
B3_TARGET = 1.0
# bound on max/min of product·b across a_list
B3_SPREAD = 4.0


class LocalizedWeights(NamedTuple):
    u: StepFn
    v: StepFn
    interval: IntervalRef
    b_len: float
    u_mean: float
    sigma_mean: float


def b_of(a: float) -> float:
    """b = log^{−1/2}(1/a)"""
    return math.log(1.0 / a) ** -0.5


def check_smallness(a: float, p: float) -> float:
    """Return b after checking 0 < a < b < 1/2 and a < (b/2)^{max(p−1,1)}"""
    if not 0 < a < 1:
        raise PreconditionError(f"a must lie in (0, 1) (got {a})")
    b = b_of(a)
    if not a < b < 0.5:
        raise PreconditionError(f"need a < b < 1/2, got a={a:.3g}, b={b:.3g}")
    if a >= (b / 2.0) ** max(p - 1.0, 1.0):
        raise PreconditionError(f"a={a:.3g} violates a < (b/2)^max(p-1,1) with b={b:.3g}")
    return b


def closed_form_means(a: float, p: float) -> tuple:
    """((u_I)_I, (v_I^{1−p′})_I)"""
    b = b_of(a)
    tail = a ** (1.0 / (p - 1.0))
    q = p / (p - 1.0)
    u_mean = (1.0 + a * a) / b
    sigma_mean = ((b - tail) * tail + math.log(1.0 / a) ** (3 * p * (1 - q))) / b
    return u_mean, sigma_mean


def gen_localized_weights(a: float, p: float, shift: float, grid: Grid) -> LocalizedWeights:
    """u_I and v_I on I = [shift, shift + b] snapped to cells; u = 0, v = 1 off I"""
    b = check_smallness(a, p)
    h = grid.cell_width
    tail = a ** (1.0 / (p - 1.0))
    if a < MIN_CELLS * h or tail < MIN_CELLS * h:
        raise PreconditionError(f"cells of width {h:.3g} do not resolve a={a:.3g} and a^(1/(p-1))={tail:.3g}")
    interval = IntervalRef(int(round(shift / h)), int(round(b / h))).check(grid)
    n_a, n_tail = int(round(a / h)), int(round(tail / h))
    u = np.zeros(grid.cells)
    v = np.ones(grid.cells)
    s, e = interval.start, interval.stop
    u[s:s + n_a] = 1.0 / a
    u[e - n_a:e] = a
    v[s:e - n_tail] = 1.0 / a
    v[e - n_tail:e] = a * math.log(1.0 / a) ** (3 * p)
    u_fn, v_fn = StepFn(grid, u), StepFn(grid, v)
    q = p / (p - 1.0)
    u_mean = float(u[s:e].mean())
    sigma_mean = float((v[s:e] ** (1.0 - q)).mean())
    return LocalizedWeights(u_fn, v_fn, interval, interval.measure(grid), u_mean, sigma_mean)


def append_localized(mesh: GluedMesh, a: float, p: float, label: str) -> list:
    """Append the pieces of u_I, v_I on an interval of length b; returns piece indices"""
    b = check_smallness(a, p)
    tail = a ** (1.0 / (p - 1.0))
    hi_v = a * math.log(1.0 / a) ** (3 * p)
    wide, narrow = max(a, tail), min(a, tail)
    pieces = [mesh.append(a, 1.0 / a, 1.0 / a, f"{label}:I1"),
              mesh.append(b - a - wide, 0.0, 1.0 / a, f"{label}:I2")]
    # lengths are taken as differences of scales, never of positions
    if wide > narrow:
        if a > tail:
            pieces.append(mesh.append(wide - narrow, a, 1.0 / a, f"{label}:I2"))
        else:
            pieces.append(mesh.append(wide - narrow, 0.0, hi_v, f"{label}:I3"))
    pieces.append(mesh.append(narrow, a, hi_v, f"{label}:I3"))
    return pieces


def localized_mesh(a: float, p: float) -> GluedMesh:
    mesh = GluedMesh()
    append_localized(mesh, a, p, "I")
    return mesh


def interval_products(mesh: GluedMesh, pieces: list, p: float, m: int = 0) -> dict:
    """The three exponent-pair products over the whole block"""
    rows = mesh.overlaps([(mesh.start(pieces[0]), mesh.stop(pieces[-1]))])
    out = {}
    for name in RATE_PRESETS:
        spec = BumpSpec(p=p, m=m, preset=name)
        out[name] = float(mesh.bump_products(rows, p, spec.A, spec.B)[0])
    return out


def run_prop_calc(p: float = 2.0, a_list: Optional[Sequence[float]] = None,
                  parameters: Optional[dict] = None) -> ExperimentReport:
    """Rates of the three products on localized weights as a → 0"""
    a_list = list(a_list) if a_list is not None else [math.exp(-n) for n in range(8, 19)]
    report = ExperimentReport("calc", parameters or {"p": p, "a_list": a_list})
    with Stopwatch(report):
        for a in a_list:
            b = check_smallness(a, p)
            mesh = GluedMesh()
            pieces = append_localized(mesh, a, p, "I")
            products = interval_products(mesh, pieces, p)
            rows = mesh.overlaps([(mesh.start(pieces[0]), mesh.stop(pieces[-1]))])
            u_mean = float(mesh.averages(mesh.u, rows)[0])
            report.rows.append({"a": a, "log_inv_a": math.log(1 / a), "b": b, "u_mean": u_mean,
                                **products, "b3_times_b": products["b3"] * b})
            logger.info("a=%.3g: b1=%.4g b2=%.4g b3=%.4g", a, products["b1"], products["b2"], products["b3"])
        table = report.table()
        loglog = np.log(table["log_inv_a"])
        for name in ("b1", "b2"):
            fit = fit_slope(loglog, np.log(table[name]))
            report.fits[name] = fit
            report.verdicts[name] = slope_verdict(fit, 0.0, FLAT_TOL)
            report.constants[f"{name}_max"] = float(table[name].max())
        fit = fit_slope(np.log(1.0 / table["b"]), np.log(table["b3"]))
        report.fits["b3"] = fit
        report.verdicts["b3_rate"] = slope_verdict(fit, B3_TARGET, FLAT_TOL)
        scaled = table["b3_times_b"]
        spread = float(scaled.max() / scaled.min())
        report.constants["b3_C"] = float(max(scaled.max(), 1.0 / scaled.min()))
        report.constants["b3_spread"] = spread
        report.verdicts["b3_bounded"] = PASS if spread <= B3_SPREAD else FAIL
    return report
