# File: bumpwall/experiments/instances.py
# ===========================
# RANDOM WEIGHT-PAIR INSTANCES
# ===========================

import concurrent.futures as cf
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import Grid, IntervalRef, StepFn
from analysis.sparse import DEFAULT_ALPHA, CoefSeq, SparseFamily, family_from_cubes, random_sparse_family
from experiments.localized import b_of

logger = logging.getLogger(__name__)

GENERATORS = ("ones", "power", "localized")
# distance floor keeping power weights finite at every resolution
POWER_EPS = 2.0 ** -12
LOCALIZED_A = math.exp(-5)
# u value off the two localized pieces, where the exact profile vanishes
LOCALIZED_U_FLOOR = 1e-6

Profile = Callable[[np.ndarray], np.ndarray]
T = TypeVar("T")
R = TypeVar("R")


@dataclass
class Instance:
    """Resolution-free weight pair with a family given in domain coordinates"""
    index: int
    kind: str
    u_fn: Profile
    v_fn: Profile
    cubes: List[Tuple[float, float]]
    tau: List[float] = field(default_factory=list)
    params: dict = field(default_factory=dict)

    def weights(self, grid: Grid) -> Tuple[StepFn, StepFn]:
        return StepFn.from_function(grid, self.u_fn), StepFn.from_function(grid, self.v_fn)

    def family(self, grid: Grid, alpha: float = DEFAULT_ALPHA) -> SparseFamily:
        h = grid.cell_width
        cubes = [IntervalRef(int(round(s / h)), int(round(n / h))) for s, n in self.cubes]
        family = family_from_cubes(grid, cubes, alpha)
        if family is None:
            raise PreconditionError(f"instance {self.index} loses sparsity at {grid.cells} cells")
        return family

    def coefficients(self, family: SparseFamily) -> CoefSeq:
        h = family.grid.cell_width
        keyed = {IntervalRef(int(round(s / h)), int(round(n / h))): t for (s, n), t in zip(self.cubes, self.tau)}
        return CoefSeq(keyed)


def _power_profile(x0: float, gamma: float) -> Profile:
    return lambda x: (np.abs(x - x0) + POWER_EPS) ** gamma


def _localized_profiles(a: float, p: float, shift: float) -> Tuple[Profile, Profile]:
    b = b_of(a)
    tail = a ** (1.0 / (p - 1.0))
    hi_v = a * math.log(1.0 / a) ** (3 * p)

    def u_fn(x):
        inside_low = (x >= shift) & (x < shift + a)
        inside_high = (x >= shift + b - a) & (x < shift + b)
        return np.where(inside_low, 1.0 / a, np.where(inside_high, a, LOCALIZED_U_FLOOR))

    def v_fn(x):
        head = (x >= shift) & (x < shift + b - tail)
        end = (x >= shift + b - tail) & (x < shift + b)
        return np.where(head, 1.0 / a, np.where(end, hi_v, 1.0))

    return u_fn, v_fn


def make_instance(kind: str, index: int, rng: np.random.Generator, p: float, grid: Grid,
                  depth: int, keep: float = 0.5) -> Instance:
    """One random instance; the family is drawn on grid and stored in domain units"""
    if kind not in GENERATORS:
        raise ArgumentError(f"unknown instance generator '{kind}'")
    family = random_sparse_family(grid, depth, keep, rng)
    h = grid.cell_width
    cubes = [(q.start * h, q.length * h) for q in family.cubes]
    tau = [float(t) for t in rng.lognormal(0.0, 0.5, len(cubes))]
    if kind == "ones":
        one = lambda x: np.ones_like(x)
        return Instance(index, kind, one, one, cubes, tau)
    if kind == "power":
        x0, x1 = rng.uniform(0.0, 1.0, 2) * grid.measure
        gu, gv = rng.uniform(-0.4, 0.4, 2)
        params = {"x0": float(x0), "x1": float(x1), "gamma_u": float(gu), "gamma_v": float(gv)}
        return Instance(index, kind, _power_profile(x0, gu), _power_profile(x1, gv), cubes, tau, params)
    b = b_of(LOCALIZED_A)
    shift = float(rng.uniform(0.0, grid.measure - b))
    u_fn, v_fn = _localized_profiles(LOCALIZED_A, p, shift)
    return Instance(index, kind, u_fn, v_fn, cubes, tau, {"a": LOCALIZED_A, "shift": shift})


def make_instances(kind: str, count: int, seed: int, p: float, grid: Grid, depth: int,
                   keep: float = 0.5) -> List[Instance]:
    rng = np.random.default_rng(seed)
    return [make_instance(kind, i, rng, p, grid, depth, keep) for i in range(count)]


def refine(grid: Grid, steps: int = 2) -> Grid:
    return Grid(grid.levels + steps, grid.span)


def run_parallel(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """fn over items in input order, on up to jobs worker threads"""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with cf.ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))
