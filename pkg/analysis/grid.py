# File: bumpwall/analysis/grid.py
# ===========================
# DYADIC GRID AND STEP FUNCTIONS
# ===========================

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from analysis.exceptions import ArgumentError, GridRangeError, PreconditionError

logger = logging.getLogger(__name__)

DYADIC = "dyadic"
ALL_ALIGNED = "all_aligned"
MODES = (DYADIC, ALL_ALIGNED)


@dataclass(frozen=True)
class Grid:
    """Uniform grid of [0, 2^span) with cells of width 2^-levels"""
    levels: int
    span: int = 0

    def __post_init__(self):
        if self.levels < 1 or self.span < 0:
            raise ArgumentError(f"invalid grid levels={self.levels} span={self.span}")

    @property
    def cells(self) -> int:
        return 1 << (self.levels + self.span)

    @property
    def cell_width(self) -> float:
        return 2.0 ** -self.levels

    @property
    def measure(self) -> float:
        return float(2 ** self.span)

    def centers(self) -> np.ndarray:
        """Cell centers in domain coordinates"""
        return (np.arange(self.cells) + 0.5) * self.cell_width

    def whole(self) -> "IntervalRef":
        return IntervalRef(0, self.cells)

    def to_dict(self) -> dict:
        return {"levels": self.levels, "span": self.span}


@dataclass(frozen=True, order=True)
class IntervalRef:
    """Grid-aligned interval: first cell and cell count"""
    start: int
    length: int

    def __post_init__(self):
        if self.length < 1 or self.start < 0:
            raise GridRangeError(f"invalid interval start={self.start} length={self.length}")

    @property
    def stop(self) -> int:
        return self.start + self.length

    def measure(self, grid: Grid) -> float:
        return self.length * grid.cell_width

    def check(self, grid: Grid) -> "IntervalRef":
        """Raise unless the interval lies inside the grid"""
        if self.stop > grid.cells:
            raise GridRangeError(f"interval [{self.start}, {self.stop}) exceeds {grid.cells} cells")
        return self

    def contains(self, other: "IntervalRef") -> bool:
        return self.start <= other.start and other.stop <= self.stop

    def intersect(self, other: "IntervalRef") -> Optional["IntervalRef"]:
        lo, hi = max(self.start, other.start), min(self.stop, other.stop)
        return IntervalRef(lo, hi - lo) if hi > lo else None

    def is_dyadic(self) -> bool:
        n = self.length
        return n & (n - 1) == 0 and self.start % n == 0

    def children(self) -> Tuple["IntervalRef", "IntervalRef"]:
        if self.length < 2:
            raise ArgumentError("a single cell has no children")
        half = self.length // 2
        return IntervalRef(self.start, half), IntervalRef(self.start + half, half)

    def to_dict(self) -> dict:
        return {"start": self.start, "len": self.length}


@dataclass(frozen=True, eq=False)
class StepFn:
    """Step function on a grid, one value per cell"""
    grid: Grid
    values: np.ndarray
    signed: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size != self.grid.cells:
            raise ArgumentError(f"expected {self.grid.cells} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("step function values must be finite")
        if not self.signed and np.any(values < 0):
            raise PreconditionError("unsigned step function has negative values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    # ============ CONSTRUCTORS ============

    @classmethod
    def constant(cls, grid: Grid, value: float) -> "StepFn":
        return cls(grid, np.full(grid.cells, float(value)), signed=value < 0)

    @classmethod
    def indicator(cls, grid: Grid, interval: IntervalRef) -> "StepFn":
        interval.check(grid)
        values = np.zeros(grid.cells)
        values[interval.start:interval.stop] = 1.0
        return cls(grid, values)

    @classmethod
    def from_function(cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray], signed: bool = False) -> "StepFn":
        """Sample fn at cell centers"""
        return cls(grid, fn(grid.centers()), signed=signed)

    # ============ ARITHMETIC ============

    def with_values(self, values: np.ndarray, signed: Optional[bool] = None) -> "StepFn":
        return StepFn(self.grid, values, self.signed if signed is None else signed)

    def abs(self) -> "StepFn":
        return StepFn(self.grid, np.abs(self.values))

    def power(self, r: float) -> "StepFn":
        """Pointwise |f|^r; zero cells stay zero for r > 0"""
        vals = np.abs(self.values)
        with np.errstate(divide="ignore"):
            out = np.where(vals > 0, vals ** r, 0.0 if r > 0 else np.inf)
        return StepFn(self.grid, out)

    def scaled(self, c: float) -> "StepFn":
        return StepFn(self.grid, c * self.values, signed=self.signed or c < 0)

    def times(self, other: "StepFn") -> "StepFn":
        self._same_grid(other)
        return StepFn(self.grid, self.values * other.values, signed=self.signed or other.signed)

    def plus(self, other: "StepFn") -> "StepFn":
        self._same_grid(other)
        return StepFn(self.grid, self.values + other.values, signed=self.signed or other.signed)

    def minus(self, other: "StepFn") -> "StepFn":
        self._same_grid(other)
        return StepFn(self.grid, self.values - other.values, signed=True)

    def restricted(self, interval: IntervalRef) -> "StepFn":
        """f·χ_I"""
        interval.check(self.grid)
        out = np.zeros_like(self.values)
        out[interval.start:interval.stop] = self.values[interval.start:interval.stop]
        return StepFn(self.grid, out, self.signed)

    def _same_grid(self, other: "StepFn"):
        if other.grid != self.grid:
            raise ArgumentError("step functions live on different grids")

    # ============ INTEGRALS ============

    @cached_property
    def prefix(self) -> np.ndarray:
        """Cumulative cell sums with a leading zero"""
        return np.concatenate(([0.0], np.cumsum(self.values)))

    def interval_sums(self, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Integrals over many intervals at once"""
        starts = np.asarray(starts)
        return (self.prefix[starts + np.asarray(lengths)] - self.prefix[starts]) * self.grid.cell_width

    def interval_means(self, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        lengths = np.asarray(lengths)
        return self.interval_sums(starts, lengths) / (lengths * self.grid.cell_width)


def integrate(f: StepFn, interval: IntervalRef) -> float:
    """Exact integral of f over a grid interval"""
    interval.check(f.grid)
    return float(np.sum(f.values[interval.start:interval.stop]) * f.grid.cell_width)


def average(f: StepFn, interval: IntervalRef) -> float:
    """f_I = (1/|I|)∫_I f"""
    return integrate(f, interval) / interval.measure(f.grid)


def inner(f: StepFn, g: StepFn) -> float:
    """⟨f, g⟩ = ∫ f g"""
    f._same_grid(g)
    return float(np.dot(f.values, g.values) * f.grid.cell_width)


def lp_norm(f: StepFn, p: float, weight: Optional[StepFn] = None) -> float:
    """(∫|f|^p w)^{1/p}"""
    w = 1.0 if weight is None else weight.values
    return float(np.sum(np.abs(f.values) ** p * w) * f.grid.cell_width) ** (1.0 / p)


# ============ INTERVAL ENUMERATION ============

def interval_arrays(grid: Grid, mode: str = DYADIC, budget: Optional[int] = None,
                    within: Optional[IntervalRef] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Starts and lengths of enumerated intervals, longest first then by offset"""
    if mode not in MODES:
        raise ArgumentError(f"unknown enumeration mode '{mode}'")
    window = (within or grid.whole()).check(grid)
    starts: List[np.ndarray] = []
    lengths: List[np.ndarray] = []
    length = 1
    while length * 2 <= window.length:
        length *= 2
    while length >= 1:
        if mode == DYADIC:
            first = -(-window.start // length) * length
            offs = np.arange(first, window.stop - length + 1, length)
        else:
            offs = np.arange(window.start, window.stop - length + 1)
        starts.append(offs)
        lengths.append(np.full(offs.size, length))
        length //= 2
    all_starts = np.concatenate(starts).astype(np.int64)
    all_lengths = np.concatenate(lengths).astype(np.int64)
    if budget is not None and all_starts.size > budget:
        if mode == DYADIC:
            raise PreconditionError(f"budget {budget} below the {all_starts.size} dyadic intervals")
        logger.debug("truncating %d aligned intervals to budget %d", all_starts.size, budget)
        all_starts, all_lengths = all_starts[:budget], all_lengths[:budget]
    return all_starts, all_lengths


def enumerate_intervals(grid: Grid, mode: str = DYADIC, budget: Optional[int] = None,
                        within: Optional[IntervalRef] = None) -> List[IntervalRef]:
    """Every dyadic (or power-of-two aligned) interval of the grid"""
    starts, lengths = interval_arrays(grid, mode, budget, within)
    return [IntervalRef(int(s), int(n)) for s, n in zip(starts, lengths)]


def group_by_length(starts: np.ndarray, lengths: np.ndarray):
    """Yield (length, indices) blocks of an enumeration"""
    for length in np.unique(lengths)[::-1]:
        yield int(length), np.flatnonzero(lengths == length)


def windows(values: np.ndarray, length: int, starts: np.ndarray) -> np.ndarray:
    """Read-only (len(starts), length) view of cell windows"""
    return np.lib.stride_tricks.sliding_window_view(values, length)[np.asarray(starts)]


# ============ SERIALIZATION ============

def save_stepfn(f: StepFn, path: str) -> Path:
    """Write `cell,value` CSV plus a `{levels, span}` JSON sidecar"""
    path = Path(path)
    pd.DataFrame({"cell": np.arange(f.grid.cells), "value": f.values}).to_csv(path, index=False)
    sidecar = path.with_suffix(".grid.json")
    sidecar.write_text(json.dumps(f.grid.to_dict(), sort_keys=True))
    return path


def load_stepfn(path: str, signed: bool = False) -> StepFn:
    path = Path(path)
    sidecar = path.with_suffix(".grid.json")
    meta = json.loads(sidecar.read_text())
    grid = Grid(int(meta["levels"]), int(meta.get("span", 0)))
    frame = pd.read_csv(path).sort_values("cell")
    return StepFn(grid, frame["value"].to_numpy(dtype=float), signed=signed)
