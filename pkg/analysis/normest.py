# File: bumpwall/analysis/normest.py
# ===========================
# OPERATOR NORM LOWER BOUNDS AND TESTING CONSTANTS
# ===========================

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import DYADIC, Grid, IntervalRef, StepFn, interval_arrays, lp_norm
from analysis.sparse import CoefSeq, SparseFamily, apply_ALlogLm, apply_AS, apply_TStau

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 4000
LOGNORMAL_SEEDS = 4
# an ascent step must beat the incumbent by this relative margin
IMPROVE_RTOL = 1e-12


@dataclass(frozen=True)
class OpHandle:
    """Positive-homogeneous operator on nonnegative step functions"""
    name: str
    fn: Callable[[StepFn], StepFn]
    linear: bool = True

    def __call__(self, f: StepFn) -> StepFn:
        return self.fn(f)


def identity_op() -> OpHandle:
    return OpHandle("identity", lambda f: f)


def sparse_op(family: SparseFamily) -> OpHandle:
    return OpHandle("A_S", lambda f: apply_AS(family, f))


def allogl_op(family: SparseFamily, m: int) -> OpHandle:
    return OpHandle(f"A_LlogL^{m}", lambda f: apply_ALlogLm(family, f, m), linear=m == 0)


def weighted_op(op: OpHandle, weight: StepFn) -> OpHandle:
    """f ↦ Op(f·w)"""
    return OpHandle(f"{op.name}(·w)", lambda f: op(f.times(weight)), op.linear)


def tstau_op(family: SparseFamily, tau: CoefSeq, weight: StepFn) -> OpHandle:
    """f ↦ T_{S,τ}(f·w)"""
    return OpHandle("T_S,tau(·w)", lambda f: apply_TStau(family, tau, f.times(weight)))


# ============ LOWER BOUNDS ============

@dataclass
class NormEstimate:
    lower: float
    witness: StepFn
    iterations: int
    seed: int
    seedset: str

    def to_dict(self) -> dict:
        return {"lower": self.lower, "seed": self.seed, "iterations": self.iterations,
                "seedset": self.seedset}


def rayleigh_ratio(op: OpHandle, f: StepFn, p: float, u: StepFn, v: StepFn) -> float:
    """‖Op f‖_{L^p(u)} / ‖f‖_{L^p(v)}"""
    den = lp_norm(f, p, v)
    if den == 0:
        return 0.0
    return lp_norm(op(f), p, u) / den


def seed_functions(grid: Grid, p: float, u: StepFn, v: StepFn, rng: np.random.Generator,
                   extra: Sequence[StepFn] = (), max_depth: Optional[int] = None) -> List[Tuple[str, StepFn]]:
    """Dyadic indicators down to max_depth, v^{1−p′}, u^{p′−1} and log-normal fields"""
    q = p / (p - 1.0)
    seeds: List[Tuple[str, StepFn]] = []
    starts, lengths = interval_arrays(grid, DYADIC)
    if max_depth is not None:
        keep = lengths >= grid.cells >> max_depth
        starts, lengths = starts[keep], lengths[keep]
    for s, n in zip(starts, lengths):
        seeds.append((f"chi[{s},{s + n})", StepFn.indicator(grid, IntervalRef(int(s), int(n)))))
    seeds.append(("sigma", v.power(1.0 - q)))
    seeds.append(("u^(p'-1)", u.power(q - 1.0)))
    for k in range(LOGNORMAL_SEEDS):
        seeds.append((f"lognormal{k}", StepFn(grid, rng.lognormal(0.0, 1.0, grid.cells))))
    for k, f in enumerate(extra):
        seeds.append((f"extra{k}", f))
    return seeds


def opnorm_lower(op: OpHandle, p: float, u: StepFn, v: StepFn, budget: int = DEFAULT_BUDGET,
                 seed: int = 0, extra_seeds: Sequence[StepFn] = (), max_depth: Optional[int] = None) -> NormEstimate:
    """Certified lower bound for ‖Op‖_{L^p(v)→L^p(u)} by seeding plus coordinate ascent"""
    if p <= 1:
        raise ArgumentError("p must exceed 1")
    if np.any(u.values <= 0) or np.any(v.values <= 0):
        raise PreconditionError("u and v must be positive")
    rng = np.random.default_rng(seed)
    grid = u.grid
    best_name, best, best_ratio = "", None, -1.0
    evaluations = 0
    for name, f in seed_functions(grid, p, u, v, rng, extra_seeds, max_depth):
        ratio = rayleigh_ratio(op, f, p, u, v)
        evaluations += 1
        if ratio > best_ratio * (1 + IMPROVE_RTOL):
            best_name, best, best_ratio = name, f, ratio
    values = np.array(best.values)
    spent = 0
    improved = True
    while improved and spent < budget:
        improved = False
        floor = 1e-3 * values.max()
        for cell in rng.permutation(grid.cells):
            if spent >= budget:
                break
            old = values[cell]
            trials = (2.0 * old, 0.5 * old) if old > 0 else (floor,)
            for trial in trials:
                values[cell] = trial
                ratio = rayleigh_ratio(op, StepFn(grid, values), p, u, v)
                spent += 1
                if ratio > best_ratio * (1 + IMPROVE_RTOL):
                    best_ratio, old, improved = ratio, trial, True
                    break
                values[cell] = old
    witness = StepFn(grid, values)
    lower = rayleigh_ratio(op, witness, p, u, v)
    logger.debug("%s: lower %.6g from seed %s after %d ascent steps (rng seed %d)",
                 op.name, lower, best_name, spent, seed)
    return NormEstimate(lower, witness, evaluations + spent, seed, f"dyadic+weights+lognormal:{best_name}")


def dense_matrix(op: OpHandle, grid: Grid) -> np.ndarray:
    """Matrix of a linear operator on cell values, column j = Op(e_j)"""
    if not op.linear:
        raise ArgumentError(f"{op.name} is not linear")
    cols = []
    for j in range(grid.cells):
        e = np.zeros(grid.cells)
        e[j] = 1.0
        cols.append(op(StepFn(grid, e)).values)
    return np.column_stack(cols)


def l2_norm_exact(op: OpHandle, u: StepFn, v: StepFn) -> float:
    """‖Op‖_{L^2(v)→L^2(u)} by a dense symmetric eigensolve"""
    mat = dense_matrix(op, u.grid)
    scaled = np.sqrt(u.values)[:, None] * mat / np.sqrt(v.values)[None, :]
    gram = scaled.T @ scaled
    top = linalg.eigvalsh((gram + gram.T) / 2.0, subset_by_index=[u.grid.cells - 1, u.grid.cells - 1])
    return float(np.sqrt(max(top[0], 0.0)))


# ============ TESTING CONSTANTS ============

def testing_constants(family: SparseFamily, tau: CoefSeq, sigma: StepFn, u: StepFn,
                      p: float) -> Tuple[float, float]:
    """(sup_R ‖T^R(σ)‖_{L^p(u)}/σ(R)^{1/p}, sup_R ‖T^R(u)‖_{L^{p′}(σ)}/u(R)^{1/p′})"""
    q = p / (p - 1.0)
    sigma_mass = sigma.interval_sums(family.starts, family.lengths)
    u_mass = u.interval_sums(family.starts, family.lengths)
    t_out = t_in = 0.0
    for i, R in enumerate(family.cubes):
        if sigma_mass[i] <= 0 or u_mass[i] <= 0:
            logger.warning("skipping degenerate testing cube [%d, %d)", R.start, R.stop)
            continue
        t_out = max(t_out, lp_norm(apply_TStau(family, tau, sigma, R), p, u) / sigma_mass[i] ** (1.0 / p))
        t_in = max(t_in, lp_norm(apply_TStau(family, tau, u, R), q, sigma) / u_mass[i] ** (1.0 / q))
    return t_out, t_in


def lsu_lower(family: SparseFamily, tau: CoefSeq, sigma: StepFn, u: StepFn, p: float,
              budget: int = DEFAULT_BUDGET, seed: int = 0,
              max_depth: Optional[int] = None) -> Tuple[NormEstimate, NormEstimate]:
    """Lower bounds for T_{S,τ}(·σ): L^p(σ)→L^p(u) and its dual T_{S,τ}(·u): L^{p′}(u)→L^{p′}(σ)"""
    q = p / (p - 1.0)
    tests = [StepFn.indicator(u.grid, R) for R in family.cubes]
    primal = opnorm_lower(tstau_op(family, tau, sigma), p, u, sigma, budget, seed, tests, max_depth)
    dual = opnorm_lower(tstau_op(family, tau, u), q, sigma, u, budget, seed, tests, max_depth)
    return primal, dual


def weak_norm(f: StepFn, u: StepFn, p: float) -> float:
    """sup_t t·u({|f| > t})^{1/p} over the distinct levels of |f|"""
    if np.any(u.values <= 0):
        raise PreconditionError("u must be positive")
    vals = np.abs(f.values)
    order = np.argsort(-vals, kind="stable")
    levels = vals[order]
    mass = np.cumsum(u.values[order]) * f.grid.cell_width
    # last cell of each run of equal levels carries u({|f| >= level})
    last = np.append(levels[1:] != levels[:-1], True)
    cand = levels[last] * mass[last] ** (1.0 / p)
    return float(cand.max(initial=0.0))
