# File: bumpwall/analysis/sparse.py
# ===========================
# SPARSE FAMILIES AND SPARSE OPERATORS
# ===========================

import json
import logging
import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from analysis.exceptions import ArgumentError, PreconditionError
from analysis.grid import Grid, IntervalRef, StepFn, inner
from analysis.orlicz import lin_log, luxemburg_norms

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.5
# stopping threshold of the augmentation, in units of the local mean oscillation
AUGMENT_FACTOR = 4.0

Ranges = Tuple[Tuple[int, int], ...]


@dataclass(frozen=True, eq=False)
class SparseFamily:
    """Dyadic intervals with disjoint witness sets, stored as a containment forest"""
    grid: Grid
    cubes: Tuple[IntervalRef, ...]
    witnesses: Tuple[Ranges, ...]
    alpha: float

    def __post_init__(self):
        if len(self.cubes) != len(self.witnesses):
            raise ArgumentError("every cube needs a witness")
        if not self.cubes:
            raise ArgumentError("a sparse family needs at least one cube")
        order = sorted(range(len(self.cubes)), key=lambda i: (-self.cubes[i].length, self.cubes[i].start))
        cubes = tuple(self.cubes[i].check(self.grid) for i in order)
        witnesses = tuple(tuple((int(a), int(b)) for a, b in self.witnesses[i]) for i in order)
        object.__setattr__(self, "cubes", cubes)
        object.__setattr__(self, "witnesses", witnesses)
        starts = np.array([q.start for q in cubes], dtype=np.int64)
        lengths = np.array([q.length for q in cubes], dtype=np.int64)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "parent", self._build_forest())

    def _build_forest(self) -> np.ndarray:
        """Index of the smallest earlier cube containing each cube, or -1"""
        parent = np.full(len(self.cubes), -1, dtype=np.int64)
        first: Dict[IntervalRef, int] = {}
        dyadic = all(q.is_dyadic() for q in self.cubes)
        for i, q in enumerate(self.cubes):
            if q in first:
                parent[i] = first[q]
                continue
            first[q] = i
            if dyadic:
                length = q.length * 2
                while length <= self.grid.cells:
                    ancestor = IntervalRef(q.start // length * length, length)
                    if ancestor in first:
                        parent[i] = first[ancestor]
                        break
                    length *= 2
            else:
                holders = [j for j in range(i) if self.cubes[j].contains(q)]
                if holders:
                    parent[i] = holders[-1]
        return parent

    def __len__(self) -> int:
        return len(self.cubes)

    @property
    def stops(self) -> np.ndarray:
        return self.starts + self.lengths

    @property
    def measures(self) -> np.ndarray:
        return self.lengths * self.grid.cell_width

    def index(self, cube: IntervalRef) -> int:
        for i, q in enumerate(self.cubes):
            if q == cube:
                return i
        raise ArgumentError(f"cube [{cube.start}, {cube.stop}) is not in the family")

    def inside(self, cube: IntervalRef) -> np.ndarray:
        """Mask of family cubes contained in the given interval"""
        return (self.starts >= cube.start) & (self.stops <= cube.stop)

    def subtree_sums(self, values: np.ndarray) -> np.ndarray:
        """Σ_{P ⊆ Q} values[P] for every Q"""
        acc = np.array(values, dtype=float)
        for i in range(len(self.cubes) - 1, -1, -1):
            if self.parent[i] >= 0:
                acc[self.parent[i]] += acc[i]
        return acc

    def path_sums(self, values: np.ndarray) -> np.ndarray:
        """Σ_{P ⊇ Q} values[P] for every Q"""
        acc = np.array(values, dtype=float)
        for i in range(len(self.cubes)):
            if self.parent[i] >= 0:
                acc[i] += acc[self.parent[i]]
        return acc

    def paint(self, coef: np.ndarray) -> np.ndarray:
        """Cell values of Σ_Q coef_Q χ_Q"""
        diff = np.zeros(self.grid.cells + 1)
        np.add.at(diff, self.starts, coef)
        np.add.at(diff, self.stops, -np.asarray(coef, dtype=float))
        return np.cumsum(diff[:-1])

    # ============ SERIALIZATION ============

    def to_json(self) -> str:
        cubes = []
        for q, w in zip(self.cubes, self.witnesses):
            cubes.append({
                "level": int(math.log2(self.grid.cells // q.length)),
                "offset": q.start // q.length,
                "witness_ranges": [list(r) for r in w],
            })
        return json.dumps({"grid": self.grid.to_dict(), "alpha": self.alpha, "cubes": cubes}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SparseFamily":
        data = json.loads(text)
        grid = Grid(int(data["grid"]["levels"]), int(data["grid"].get("span", 0)))
        cubes, witnesses = [], []
        for item in data["cubes"]:
            length = grid.cells >> int(item["level"])
            cubes.append(IntervalRef(int(item["offset"]) * length, length))
            witnesses.append(tuple(tuple(r) for r in item["witness_ranges"]))
        return cls(grid, tuple(cubes), tuple(witnesses), float(data["alpha"]))


class CoefSeq:
    """Nonnegative coefficients indexed by family cubes"""

    def __init__(self, values: Dict[IntervalRef, float]):
        if any(v < 0 for v in values.values()):
            raise ArgumentError("coefficients must be nonnegative")
        self.values = dict(values)

    @classmethod
    def constant(cls, family: SparseFamily, value: float) -> "CoefSeq":
        return cls({q: float(value) for q in family.cubes})

    @classmethod
    def from_array(cls, family: SparseFamily, values: Sequence[float]) -> "CoefSeq":
        return cls({q: float(v) for q, v in zip(family.cubes, values)})

    def aligned(self, family: SparseFamily) -> np.ndarray:
        members = set(family.cubes)
        stray = [q for q in self.values if q not in members]
        if stray:
            raise ArgumentError(f"{len(stray)} coefficients refer to cubes outside the family")
        return np.array([self.values.get(q, 0.0) for q in family.cubes])

    def require_at_least(self, floor: float):
        low = [v for v in self.values.values() if v < floor]
        if low:
            raise ArgumentError(f"{len(low)} coefficients below {floor}")


# ============ SPARSITY ============

def _runs(cells: np.ndarray) -> Ranges:
    """Sorted cell indices as half-open ranges"""
    if cells.size == 0:
        return ()
    breaks = np.flatnonzero(np.diff(cells) != 1)
    lo = np.concatenate(([cells[0]], cells[breaks + 1]))
    hi = np.concatenate((cells[breaks] + 1, [cells[-1] + 1]))
    return tuple((int(a), int(b)) for a, b in zip(lo, hi))


def verify_sparsity(family: SparseFamily) -> bool:
    """Exact cell check of the witness conditions"""
    if not 0 < family.alpha <= 1:
        logger.info("sparsity constant %s outside (0, 1]", family.alpha)
        return False
    coverage = np.zeros(family.grid.cells + 1, dtype=np.int64)
    for q, ranges in zip(family.cubes, family.witnesses):
        if not q.is_dyadic():
            logger.info("cube [%d, %d) is not dyadic", q.start, q.stop)
            return False
        size = 0
        for a, b in ranges:
            if a < q.start or b > q.stop or b <= a:
                logger.info("witness range [%d, %d) leaves cube [%d, %d)", a, b, q.start, q.stop)
                return False
            coverage[a] += 1
            coverage[b] -= 1
            size += b - a
        if size < family.alpha * q.length:
            logger.info("witness of [%d, %d) has %d cells, needs %g", q.start, q.stop, size,
                        family.alpha * q.length)
            return False
    if np.cumsum(coverage).max(initial=0) > 1:
        logger.info("witness sets overlap")
        return False
    return True


def assign_witnesses(grid: Grid, cubes: Sequence[IntervalRef], alpha: float) -> Optional[Tuple[Ranges, ...]]:
    """Greedy witnesses, smallest cubes first; None when some cube runs short"""
    used = np.zeros(grid.cells, dtype=bool)
    out: List[Ranges] = [()] * len(cubes)
    for i in sorted(range(len(cubes)), key=lambda j: (cubes[j].length, cubes[j].start)):
        q = cubes[i]
        need = math.ceil(alpha * q.length - 1e-12)
        free = np.flatnonzero(~used[q.start:q.stop])
        if free.size < need:
            return None
        take = free[:need] + q.start
        used[take] = True
        out[i] = _runs(take)
    return tuple(out)


def max_feasible_alpha(grid: Grid, cubes: Sequence[IntervalRef], ceiling: float) -> float:
    """Largest α <= ceiling accepted by the greedy witness repair"""
    lo, hi = 0.0, ceiling
    if assign_witnesses(grid, cubes, hi) is not None:
        return hi
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if assign_witnesses(grid, cubes, mid) is not None:
            lo = mid
        else:
            hi = mid
    return lo


def family_from_cubes(grid: Grid, cubes: Sequence[IntervalRef], alpha: float) -> Optional[SparseFamily]:
    witnesses = assign_witnesses(grid, cubes, alpha)
    if witnesses is None:
        return None
    return SparseFamily(grid, tuple(cubes), witnesses, alpha)


def random_sparse_family(grid: Grid, depth: int, keep: float, rng: np.random.Generator,
                         alpha: float = DEFAULT_ALPHA, root: Optional[IntervalRef] = None,
                         max_tries: int = 200) -> SparseFamily:
    """Random subfamily of the dyadic tree under root, kept cube-wise with probability keep"""
    root = (root or grid.whole()).check(grid)
    if not root.is_dyadic():
        raise PreconditionError("root must be a dyadic interval")
    depth = min(depth, int(math.log2(root.length)))
    tree = [IntervalRef(root.start + j * (root.length >> k), root.length >> k)
            for k in range(1, depth + 1) for j in range(1 << k)]
    for attempt in range(max_tries):
        chosen = [root] + [q for q, u in zip(tree, rng.random(len(tree))) if u < keep]
        family = family_from_cubes(grid, chosen, alpha)
        if family is not None and verify_sparsity(family):
            return family
        if attempt % 10 == 9:
            keep *= 0.8
    raise PreconditionError(f"no {alpha}-sparse family found after {max_tries} draws")


# ============ STOPPING-TIME CONSTRUCTIONS ============

def _stopping_blocks(values: np.ndarray, threshold: float) -> Tuple[List[Tuple[int, int]], np.ndarray]:
    """Maximal proper dyadic sub-blocks whose mean exceeds threshold; returns blocks and cover mask"""
    n = values.size
    covered = np.zeros(n, dtype=bool)
    blocks: List[Tuple[int, int]] = []
    k = n // 2
    while k >= 1:
        means = values.reshape(n // k, k).mean(axis=1)
        free = ~covered.reshape(n // k, k).any(axis=1)
        for j in np.flatnonzero(free & (means > threshold)):
            blocks.append((int(j * k), k))
            covered[j * k:(j + 1) * k] = True
        k //= 2
    return blocks, covered


def build_sparse_cz(f: StepFn, root: Optional[IntervalRef] = None, factor: float = 2.0) -> SparseFamily:
    """Calderón–Zygmund stopping cubes of f under root"""
    if factor <= 1:
        raise ArgumentError("stopping factor must exceed 1")
    root = (root or f.grid.whole()).check(f.grid)
    if not root.is_dyadic():
        raise PreconditionError("root must be a dyadic interval")
    vals = np.abs(f.values)
    cubes: List[IntervalRef] = []
    witnesses: List[Ranges] = []
    queue = deque([root])
    while queue:
        q = queue.popleft()
        local = vals[q.start:q.stop]
        blocks, covered = _stopping_blocks(local, factor * local.mean())
        cubes.append(q)
        witnesses.append(_runs(np.flatnonzero(~covered) + q.start))
        queue.extend(IntervalRef(q.start + s, k) for s, k in blocks)
    logger.debug("CZ stopping family: %d cubes under [%d, %d)", len(cubes), root.start, root.stop)
    return SparseFamily(f.grid, tuple(cubes), tuple(witnesses), 1.0 - 1.0 / factor)


def augment_family(family: SparseFamily, b: StepFn, factor: float = AUGMENT_FACTOR) -> SparseFamily:
    """Close the family under oscillation stopping cubes of b"""
    vals = b.values
    members = set(family.cubes)
    cubes = list(family.cubes)
    queue = deque(family.cubes)
    while queue:
        q = queue.popleft()
        local = vals[q.start:q.stop]
        dev = np.abs(local - local.mean())
        omega = dev.mean()
        if omega <= 1e-14 * max(np.abs(local).max(), 1.0):
            continue
        blocks, _ = _stopping_blocks(dev, factor * omega)
        for s, k in blocks:
            child = IntervalRef(q.start + s, k)
            if child not in members:
                members.add(child)
                cubes.append(child)
                queue.append(child)
    target = family.alpha / 2.0
    if len(cubes) == len(family.cubes):
        return family
    witnesses = assign_witnesses(family.grid, cubes, target)
    if witnesses is None:
        target = max_feasible_alpha(family.grid, cubes, target)
        logger.warning("augmented family reaches sparsity %.4g only (asked %.4g)", target, family.alpha / 2)
        witnesses = assign_witnesses(family.grid, cubes, target)
    logger.debug("augmented %d cubes to %d", len(family.cubes), len(cubes))
    return SparseFamily(family.grid, tuple(cubes), witnesses, target)


def oscillations(family: SparseFamily, b: StepFn) -> np.ndarray:
    """(1/|Q|)∫_Q |b − b_Q| per cube"""
    out = np.empty(len(family))
    for i, q in enumerate(family.cubes):
        local = b.values[q.start:q.stop]
        out[i] = np.abs(local - local.mean()).mean()
    return out


def augmentation_constant(family: SparseFamily, b: StepFn) -> float:
    """Smallest C with |b − b_Q| <= C Σ_{P ⊆ Q, P ∋ x} osc_P on every Q"""
    omega = oscillations(family, b)
    worst = 0.0
    for i, q in enumerate(family.cubes):
        local = b.values[q.start:q.stop]
        lhs = np.abs(local - local.mean())
        mask = family.inside(q)
        rhs = family.paint(np.where(mask, omega, 0.0))[q.start:q.stop]
        if np.any((lhs > 1e-12 * max(np.abs(local).max(), 1.0)) & (rhs <= 0)):
            return float("inf")
        ratio = np.divide(lhs, rhs, out=np.zeros_like(lhs), where=rhs > 0)
        worst = max(worst, float(ratio.max(initial=0.0)))
    return worst


# ============ SPARSE OPERATORS ============

def apply_AS(family: SparseFamily, f: StepFn) -> StepFn:
    """A_S f = Σ f_Q χ_Q"""
    means = f.interval_means(family.starts, family.lengths)
    return StepFn(f.grid, family.paint(means), signed=f.signed)


def apply_AS_eta_iter(family: SparseFamily, eta: StepFn, f: StepFn, m: int) -> StepFn:
    """m-fold composition of f ↦ η·A_S f"""
    if m < 0:
        raise ArgumentError("iteration count must be nonnegative")
    if np.any(eta.values <= 0):
        raise PreconditionError("η must be positive")
    out = f
    for _ in range(m):
        out = eta.times(apply_AS(family, out))
    return out


def apply_ALlogLm(family: SparseFamily, f: StepFn, m: int) -> StepFn:
    """Σ ‖f‖_{L(log L)^m, Q} χ_Q"""
    if m == 0:
        return apply_AS(family, f)
    norms = luxemburg_norms(f, family.starts, family.lengths, lin_log(m))
    return StepFn(f.grid, family.paint(norms))


def apply_Tm(family: SparseFamily, f: StepFn, m: int, adjoint: bool = False) -> StepFn:
    """Nested chain sums T_m (bottom-up sweep) or T_m* (top-down sweep)"""
    if m < 1:
        raise ArgumentError("T_m needs m >= 1")
    if adjoint:
        coef = f.interval_means(family.starts, family.lengths)
        for _ in range(m):
            coef = family.path_sums(coef)
    else:
        coef = f.interval_sums(family.starts, family.lengths)
        for _ in range(m):
            coef = family.subtree_sums(coef)
        coef = coef / family.measures
    return StepFn(f.grid, family.paint(coef), signed=f.signed)


def apply_TStau(family: SparseFamily, tau: CoefSeq, f: StepFn, R: Optional[IntervalRef] = None) -> StepFn:
    """Σ τ_Q f_Q χ_Q, over Q ⊆ R when R is given"""
    coef = tau.aligned(family) * f.interval_means(family.starts, family.lengths)
    if R is not None:
        family.index(R)
        coef = np.where(family.inside(R), coef, 0.0)
    return StepFn(f.grid, family.paint(coef), signed=f.signed)


# ============ INEQUALITY HELPERS ============

def dual2_ratio(family: SparseFamily, f: StepFn, g: StepFn, m: int) -> float:
    """⟨A^{m+1} f, g⟩ / (⟨T_m f, g⟩ + ⟨T_m* f, g⟩)"""
    iterate = f
    for _ in range(m + 1):
        iterate = apply_AS(family, iterate)
    num = inner(iterate, g)
    den = inner(apply_Tm(family, f, m), g) + inner(apply_Tm(family, f, m, adjoint=True), g)
    return float(num / den) if den > 0 else 0.0


def pointwise_tm_ratio(family: SparseFamily, f: StepFn, m: int) -> float:
    """max over cells of T_m f / A_{L(log L)^m, S} f"""
    num = apply_Tm(family, f, m).values
    den = apply_ALlogLm(family, f, m).values
    ratio = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return float(ratio.max(initial=0.0))


def carleson_power_sum(family: SparseFamily, w: StepFn, R: IntervalRef, s: float) -> float:
    """Σ_{Q ⊆ R} (w_Q)^s |Q| / ((w_R)^s |R|)"""
    if not 0 < s < 1:
        raise ArgumentError("exponent s must lie in (0, 1)")
    mask = family.inside(R)
    means = w.interval_means(family.starts, family.lengths)
    lhs = float(np.sum(means[mask] ** s * family.measures[mask]))
    rhs = w.interval_means(np.array([R.start]), np.array([R.length]))[0] ** s * R.measure(w.grid)
    return lhs / rhs if rhs > 0 else float("inf")


def cov_ratio(family: SparseFamily, coef: np.ndarray, w: StepFn, p: float) -> float:
    """‖Σ a_Q χ_Q‖_{L^p(w)} over the nested-sum expression"""
    coef = np.asarray(coef, dtype=float)
    painted = family.paint(coef)
    lhs = float(np.sum(painted ** p * w.values) * w.grid.cell_width) ** (1.0 / p)
    mass = w.interval_sums(family.starts, family.lengths)
    nested = family.subtree_sums(coef * mass)
    inner_avg = np.divide(nested, mass, out=np.zeros_like(nested), where=mass > 0)
    rhs = float(np.sum(coef * inner_avg ** (p - 1) * mass)) ** (1.0 / p)
    return lhs / rhs if rhs > 0 else 0.0


def counting_function(family: SparseFamily) -> np.ndarray:
    """Number of family cubes containing each cell"""
    return family.paint(np.ones(len(family)))
