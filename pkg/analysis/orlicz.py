# File: bumpwall/analysis/orlicz.py
# ===========================
# YOUNG FUNCTIONS, LUXEMBURG NORMS, ORLICZ MAXIMAL OPERATORS
# ===========================

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np
from scipy import integrate as sp_integrate
from scipy import stats

from analysis.exceptions import ArgumentError, YoungDomainError
from analysis.grid import (DYADIC, IntervalRef, StepFn, group_by_length,
                           interval_arrays, windows)

logger = logging.getLogger(__name__)

PLOG = "plog"
POVERLOG = "poverlog"
TAB = "tab"

LUXEMBURG_RTOL = 1e-9
INVERSE_RTOL = 1e-10
OVERFLOW_CAP = 1e300
# windows with at most this many distinct values are evaluated from level counts
COMPRESS_LEVELS = 64


@dataclass(frozen=True, eq=False)
class YoungFn:
    """Young function Φ(t) = base(t^inner) for the power-log families or a table"""
    kind: str
    p: float = 1.0
    alpha: float = 0.0
    inner: float = 1.0
    table_t: Optional[np.ndarray] = field(default=None, repr=False)
    table_y: Optional[np.ndarray] = field(default=None, repr=False)
    convex: bool = True

    def __post_init__(self):
        if self.kind == PLOG:
            if self.p < 1 or self.alpha < 0:
                raise YoungDomainError(f"PowerLog needs p >= 1, alpha >= 0 (got {self.p}, {self.alpha})")
        elif self.kind == POVERLOG:
            if self.p <= 1 or self.alpha <= 0:
                raise YoungDomainError(f"PowerOverLog needs p > 1, mu > 0 (got {self.p}, {self.alpha})")
        elif self.kind == TAB:
            t = np.asarray(self.table_t, dtype=float)
            y = np.asarray(self.table_y, dtype=float)
            if t.ndim != 1 or t.size < 2 or t.size != y.size:
                raise YoungDomainError("tabulated Young function needs matching 1-D tables")
            if np.any(np.diff(t) <= 0) or np.any(np.diff(y) < 0) or np.any(y < 0) or t[0] <= 0:
                raise YoungDomainError("tabulated Young function must be monotone on t > 0")
            object.__setattr__(self, "table_t", t)
            object.__setattr__(self, "table_y", y)
        else:
            raise YoungDomainError(f"unknown Young family '{self.kind}'")
        if self.inner <= 0:
            raise YoungDomainError("inner exponent must be positive")
        if self.kind != TAB:
            object.__setattr__(self, "convex", self._sampled_convexity())
            if not self.convex:
                logger.warning("%s is not convex on the sampled range", self.label)

    # ============ EVALUATION ============

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise YoungDomainError("Young functions are evaluated on t >= 0")
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            s = t_arr if self.inner == 1.0 else t_arr ** self.inner
            if self.kind == PLOG:
                out = s ** self.p
                if self.alpha:
                    out = out * np.log(np.e + s) ** self.alpha
            elif self.kind == POVERLOG:
                out = s ** self.p / np.log(np.e + s) ** (1.0 + self.alpha)
            else:
                out = self._table_eval(s)
        return float(out) if np.ndim(out) == 0 else out

    def _table_eval(self, s: np.ndarray) -> np.ndarray:
        t, y = self.table_t, self.table_y
        pos = y > 0
        lt, ly = np.log(t[pos]), np.log(y[pos])
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        live = s > 0
        ls = np.log(np.where(live, s, 1.0))
        # log-log interpolation with end segments extended
        val = np.interp(ls, lt, ly)
        hi_slope = (ly[-1] - ly[-2]) / (lt[-1] - lt[-2])
        val = np.where(ls > lt[-1], ly[-1] + hi_slope * (ls - lt[-1]), val)
        first_pos = t[pos][0]
        zero_knots = t[~pos]
        if zero_knots.size:
            t_zero = zero_knots[zero_knots < first_pos].max(initial=0.0)
            below = s < first_pos
            linear = y[pos][0] * (s - t_zero) / (first_pos - t_zero)
            out = np.where(live & ~below, np.exp(val), 0.0)
            out = np.where(live & below & (s > t_zero), linear, out)
        else:
            lo_slope = (ly[1] - ly[0]) / (lt[1] - lt[0])
            val = np.where(ls < lt[0], ly[0] + lo_slope * (ls - lt[0]), val)
            out = np.where(live, np.exp(val), 0.0)
        return out

    def inverse(self, y):
        """Unique t with Φ(t) = y, by bisection"""
        return monotone_inverse(self, y)

    # ============ DERIVED FUNCTIONS ============

    def rescaled(self, r: float) -> "YoungFn":
        """Φ(t^r)"""
        return YoungFn(self.kind, self.p, self.alpha, self.inner * r, self.table_t, self.table_y)

    def complementary(self) -> "ComplementaryFn":
        return ComplementaryFn(self)

    @property
    def power_exponent(self) -> Optional[float]:
        """q when Φ(t) = t^q exactly"""
        if self.kind == PLOG and self.alpha == 0:
            return self.p * self.inner
        return None

    @property
    def label(self) -> str:
        if self.kind == PLOG:
            text = f"plog({self.p:g},{self.alpha:g})"
        elif self.kind == POVERLOG:
            text = f"poverlog({self.p:g},{self.alpha:g})"
        else:
            text = f"tab[{self.table_t.size}]"
        return text if self.inner == 1.0 else f"{text}∘t^{self.inner:g}"

    def _sampled_convexity(self) -> bool:
        t = np.logspace(-6, 6, 400)
        y = self(t)
        slopes = np.diff(y) / np.diff(t)
        ok = np.isfinite(slopes)
        slopes = slopes[ok]
        return bool(np.all(slopes[1:] >= slopes[:-1] * (1 - 1e-8) - 1e-300))


def power_log(p: float, alpha: float = 0.0) -> YoungFn:
    """t^p log^α(e+t)"""
    return YoungFn(PLOG, float(p), float(alpha))


def power_over_log(p: float, mu: float) -> YoungFn:
    """t^p / log^{1+μ}(e+t)"""
    return YoungFn(POVERLOG, float(p), float(mu))


def lin_log(alpha: float) -> YoungFn:
    """t log^α(e+t)"""
    return YoungFn(PLOG, 1.0, float(alpha))


def tabulated(t: np.ndarray, y: np.ndarray) -> YoungFn:
    return YoungFn(TAB, table_t=np.asarray(t, dtype=float), table_y=np.asarray(y, dtype=float))


def parse_young(text: str) -> YoungFn:
    """Parse `plog:p:alpha`, `poverlog:p:mu` or `linlog:alpha`"""
    parts = text.strip().split(":")
    try:
        if parts[0] == "plog" and len(parts) == 3:
            return power_log(float(parts[1]), float(parts[2]))
        if parts[0] == "poverlog" and len(parts) == 3:
            return power_over_log(float(parts[1]), float(parts[2]))
        if parts[0] == "linlog" and len(parts) == 2:
            return lin_log(float(parts[1]))
    except ValueError:
        pass
    raise ArgumentError(f"cannot parse Young function '{text}'")


def young_eval(phi: YoungFn, t: float) -> float:
    return phi(t)


def young_inverse(phi: YoungFn, y: float) -> float:
    return phi.inverse(y)


def monotone_inverse(fn, y, rtol: float = INVERSE_RTOL):
    """Geometric bisection for an increasing fn with fn(0) = 0"""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y_arr < 0):
        raise YoungDomainError("inverse is defined on y >= 0")
    out = np.zeros_like(y_arr)
    live = y_arr > 0
    if np.any(live):
        target = y_arr[live]
        hi = np.ones_like(target)
        for _ in range(2100):
            short = fn(hi) < target
            if not np.any(short):
                break
            hi = np.where(short, hi * 2.0, hi)
        lo = hi.copy()
        for _ in range(2100):
            over = fn(lo) >= target
            if not np.any(over):
                break
            lo = np.where(over, lo * 0.5, lo)
        steps = int(np.ceil(np.log2(max(np.log(hi / lo).max(), 1e-300) / rtol))) + 2
        for _ in range(max(steps, 1)):
            mid = np.sqrt(lo * hi)
            above = fn(mid) >= target
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
        out[live] = np.sqrt(lo * hi)
    return float(out[0]) if np.ndim(y) == 0 else out


# ============ COMPLEMENTARY FUNCTIONS ============

class ComplementaryFn:
    """Numeric Legendre transform sup_s (st − Φ(s)) with a cached sample table"""

    S_GRID = np.logspace(-12, 12, 4096)

    def __init__(self, base: YoungFn, t_range: Tuple[float, float] = (1e-8, 1e8), t_points: int = 4001):
        self.base = base
        self._phi_s = np.asarray(base(self.S_GRID), dtype=float)
        self.table_t = np.logspace(math.log10(t_range[0]), math.log10(t_range[1]), t_points)
        self.table_y, self.table_saturated = self._evaluate(self.table_t)
        logger.debug("complementary of %s tabulated on %d points", base.label, t_points)

    def _evaluate(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise YoungDomainError("complementary function is evaluated on t >= 0")
        shape = t.shape
        t = t.ravel()
        values = np.zeros_like(t)
        saturated = np.zeros(t.shape, dtype=bool)
        s = self.S_GRID
        for lo in range(0, t.size, 256):
            chunk = t[lo:lo + 256]
            with np.errstate(over="ignore", invalid="ignore"):
                gains = chunk[:, None] * s[None, :] - self._phi_s[None, :]
            gains = np.where(np.isfinite(gains), gains, -np.inf)
            k = np.argmax(gains, axis=1)
            left = s[np.maximum(k - 1, 0)]
            right = s[np.minimum(k + 1, s.size - 1)]
            # st - Φ(s) is concave in s, so ternary search on the bracketing cells is exact
            for _ in range(80):
                m1 = left + (right - left) / 3.0
                m2 = right - (right - left) / 3.0
                g1 = chunk * m1 - self.base(m1)
                g2 = chunk * m2 - self.base(m2)
                move = g1 < g2
                left = np.where(move, m1, left)
                right = np.where(move, right, m2)
            best = np.maximum(chunk * left - self.base(left), gains[np.arange(chunk.size), k])
            best = np.maximum(best, 0.0)
            edge = (k == s.size - 1) | (best > OVERFLOW_CAP) | ~np.isfinite(best)
            values[lo:lo + 256] = np.where(edge, OVERFLOW_CAP, best)
            saturated[lo:lo + 256] = edge
        if np.any(saturated):
            logger.debug("complementary of %s saturated at %d points", self.base.label, int(saturated.sum()))
        return values.reshape(shape), saturated.reshape(shape)

    def __call__(self, t):
        values, _ = self._evaluate(t)
        return float(values) if np.ndim(t) == 0 else values

    def saturated(self, t) -> np.ndarray:
        return self._evaluate(t)[1]

    def inverse(self, y):
        return monotone_inverse(self, y)

    def as_young(self) -> YoungFn:
        """Tabulated Young function built from the cached table"""
        keep = ~self.table_saturated
        return tabulated(self.table_t[keep], self.table_y[keep])


def complementary_eval(phi: YoungFn, t: float) -> float:
    return ComplementaryFn(phi)(t)


def duality_sandwich(phi: YoungFn, t: np.ndarray, complementary: Optional[ComplementaryFn] = None) -> np.ndarray:
    """Φ̄^{-1}(t)Φ^{-1}(t)/t, which lies in [1, 2]"""
    comp = complementary or ComplementaryFn(phi)
    t = np.asarray(t, dtype=float)
    return np.asarray(comp.inverse(t)) * np.asarray(phi.inverse(t)) / t


# ============ LUXEMBURG NORMS ============

Youngish = Union[YoungFn, ComplementaryFn]


def gauge(levels: np.ndarray, fractions, phi: Youngish, rtol: float = LUXEMBURG_RTOL) -> np.ndarray:
    """Row-wise inf{λ : Σ_j fractions·Φ(levels/λ) ≤ 1}; fractions of a row sum to 1"""
    levels = np.atleast_2d(np.asarray(levels, dtype=float))
    fractions = np.broadcast_to(np.asarray(fractions, dtype=float), np.broadcast_shapes(
        levels.shape, np.shape(fractions)))
    levels = np.broadcast_to(levels, fractions.shape)
    present = fractions > 0
    masked = np.where(present, levels, 0.0)
    top = masked.max(axis=1)
    rows = top.size
    out = np.zeros(rows)
    live = top > 0
    if not np.any(live):
        return out
    levels, fractions, top = levels[live], fractions[live], top[live]
    share = np.where((levels == top[:, None]) & (fractions > 0), fractions, 0.0).sum(axis=1)
    q = getattr(phi, "power_exponent", None)
    if q is not None:
        out[live] = (fractions * (levels / top[:, None]) ** q).sum(axis=1) ** (1.0 / q) * top
        return out
    hi = top / np.asarray(phi.inverse(np.ones_like(top)))
    lo = top / np.asarray(phi.inverse(1.0 / share))
    lo = np.minimum(lo, hi)
    spread = np.log(hi / lo).max()
    steps = int(np.ceil(np.log2(max(spread, rtol) / rtol))) + 2
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(steps):
            mid = np.sqrt(lo * hi)
            load = (fractions * phi(levels / mid[:, None])).sum(axis=1)
            ok = load <= 1.0
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
    out[live] = hi
    return out


def luxemburg_norm(f: StepFn, interval: IntervalRef, phi: Youngish) -> float:
    """‖f‖_{Φ,I}, normalized; |f| for signed inputs"""
    interval.check(f.grid)
    vals = np.abs(f.values[interval.start:interval.stop])
    return float(gauge(vals[None, :], 1.0 / vals.size, phi)[0])


def luxemburg_from_distribution(levels: np.ndarray, measures: np.ndarray, phi: Youngish) -> np.ndarray:
    """Norms from value levels and their measures (rows = intervals)"""
    measures = np.atleast_2d(np.asarray(measures, dtype=float))
    totals = measures.sum(axis=1, keepdims=True)
    return gauge(np.asarray(levels, dtype=float), measures / totals, phi)


def _level_profile(values: np.ndarray):
    """Distinct levels and one-hot prefix counts, or None when too many levels"""
    levels, codes = np.unique(values, return_inverse=True)
    if levels.size > COMPRESS_LEVELS:
        return None
    onehot = np.zeros((values.size + 1, levels.size))
    onehot[np.arange(1, values.size + 1), codes] = 1.0
    return levels, np.cumsum(onehot, axis=0)


def luxemburg_norms(f: StepFn, starts: np.ndarray, lengths: np.ndarray, phi: Youngish) -> np.ndarray:
    """Norms over an enumeration, batched by interval length"""
    vals = np.abs(f.values)
    starts = np.asarray(starts)
    lengths = np.asarray(lengths)
    out = np.zeros(starts.size)
    if getattr(phi, "power_exponent", None) == 1.0:
        return f.abs().interval_means(starts, lengths)
    profile = _level_profile(vals)
    for length, idx in group_by_length(starts, lengths):
        s = starts[idx]
        if profile is not None:
            levels, counts = profile
            fractions = (counts[s + length] - counts[s]) / length
            out[idx] = gauge(levels[None, :], fractions, phi)
        else:
            for lo in range(0, s.size, max(1, 4_000_000 // length)):
                chunk = s[lo:lo + max(1, 4_000_000 // length)]
                out[idx[lo:lo + chunk.size]] = gauge(windows(vals, length, chunk), 1.0 / length, phi)
    return out


def log_average(f: StepFn, interval: IntervalRef, alpha: float) -> float:
    """(1/|I|)∫_I f log^α(f/f_I + e)"""
    vals = np.abs(f.values[interval.start:interval.stop])
    mean = vals.mean()
    if mean == 0:
        return 0.0
    return float(np.mean(vals * np.log(vals / mean + np.e) ** alpha))


# ============ MAXIMAL OPERATORS ============

def _cellwise_max(cells: int, starts: np.ndarray, lengths: np.ndarray, values: np.ndarray) -> np.ndarray:
    """At each cell, max of values over listed intervals containing it"""
    out = np.zeros(cells)
    for length, idx in group_by_length(starts, lengths):
        marks = np.full(cells + length - 1, -np.inf)
        marks[starts[idx] + length - 1] = values[idx]
        covering = np.lib.stride_tricks.sliding_window_view(marks, length).max(axis=1)
        out = np.maximum(out, covering)
    return out


def orlicz_maximal(f: StepFn, phi: Youngish, mode: str = DYADIC, budget: Optional[int] = None) -> StepFn:
    """M_Φ f(x) = sup over enumerated I ∋ x of ‖f‖_{Φ,I}"""
    starts, lengths = interval_arrays(f.grid, mode, budget)
    norms = luxemburg_norms(f, starts, lengths, phi)
    return StepFn(f.grid, _cellwise_max(f.grid.cells, starts, lengths, norms))


def hardy_littlewood(f: StepFn, mode: str = DYADIC, budget: Optional[int] = None) -> StepFn:
    """M f from interval averages of |f|"""
    starts, lengths = interval_arrays(f.grid, mode, budget)
    means = f.abs().interval_means(starts, lengths)
    return StepFn(f.grid, _cellwise_max(f.grid.cells, starts, lengths, means))


def iterated_maximal(f: StepFn, k: int, mode: str = DYADIC, budget: Optional[int] = None) -> StepFn:
    """M^k f; k = 0 returns |f|"""
    out = f.abs()
    for _ in range(k):
        out = hardy_littlewood(out, mode, budget)
    return out


def maxlog_ratio(f: StepFn, interval: IntervalRef, k: int, mode: str = DYADIC) -> float:
    """avg_I M^k(fχ_I) / ‖f‖_{L(log L)^k, I}"""
    norm = luxemburg_norm(f, interval, lin_log(k))
    if norm == 0:
        return 0.0
    maximal = iterated_maximal(f.restricted(interval), k, mode)
    return float(maximal.values[interval.start:interval.stop].mean() / norm)


def maximal_lp_ratio(f: StepFn, phi: Youngish, p: float, mode: str = DYADIC) -> float:
    """‖M_Φ f‖_{L^p} / ‖f‖_{L^p}"""
    maximal = orlicz_maximal(f, phi, mode)
    num = np.sum(maximal.values ** p) ** (1.0 / p)
    den = np.sum(np.abs(f.values) ** p) ** (1.0 / p)
    return float(num / den) if den > 0 else 0.0


# ============ B_p CONDITION ============

@dataclass
class BpReport:
    value: float
    verdict: str
    tail_slope: float

    @property
    def is_bp(self) -> bool:
        return self.verdict == "finite"

    def to_dict(self) -> dict:
        return {"value": self.value, "verdict": self.verdict, "tail_slope": self.tail_slope}


def bp_integral(phi: Youngish, p: float, T: float = 1e12, points_per_decade: int = 200) -> BpReport:
    """∫_1^T Φ(t)/t^p dt/t on a log grid, with a finiteness verdict"""
    if p <= 1:
        raise ArgumentError("B_p needs p > 1")
    if T < 1e6:
        raise ArgumentError("truncation T must be at least 1e6")
    decades = int(math.floor(math.log10(T)))
    u = np.linspace(0.0, decades * math.log(10.0), decades * points_per_decade + 1)
    with np.errstate(over="ignore"):
        integrand = np.asarray(phi(np.exp(u)), dtype=float) * np.exp(-p * u)
    running = sp_integrate.cumulative_trapezoid(integrand, u, initial=0.0)
    total = float(running[-1])
    marks = running[::points_per_decade]
    increments = np.diff(marks)
    if not np.isfinite(total):
        return BpReport(total, "divergent", float("nan"))
    if increments[-1] <= 1e-6 * total:
        verdict, slope = "finite", float("-inf")
    else:
        k = np.arange(1, increments.size + 1)
        tail = slice(increments.size // 2, None)
        fit = stats.linregress(np.log(k[tail]), np.log(increments[tail]))
        slope = float(fit.slope)
        if abs(slope + 1.0) <= 0.1:
            verdict = "borderline"
        elif slope < -1.0:
            verdict = "finite"
        else:
            verdict = "divergent"
    logger.debug("B_%g integral of %s: %.6g (%s)", p, getattr(phi, "label", "Φ"), total, verdict)
    return BpReport(total, verdict, slope)


# ============ INEQUALITY HELPERS ============

def holder_condition(a: Youngish, b: Youngish, c: Youngish, t: Optional[np.ndarray] = None) -> bool:
    """A^{-1}(t)B^{-1}(t) <= C^{-1}(t) on a log grid"""
    t = np.logspace(-4, 8, 121) if t is None else np.asarray(t, dtype=float)
    lhs = np.asarray(a.inverse(t)) * np.asarray(b.inverse(t))
    return bool(np.all(lhs <= np.asarray(c.inverse(t)) * (1 + 1e-8)))


def submultiplicativity_constant(phi: YoungFn, lo: float = 1e-3, hi: float = 1e6, points: int = 120) -> float:
    """max Φ(ab)/(Φ(a)Φ(b)) over a 2-D log grid"""
    x = np.logspace(math.log10(lo), math.log10(hi), points)
    a, b = np.meshgrid(x, x)
    return float(np.max(phi(a * b) / (phi(a) * phi(b))))


def larger_interval_bound(f: StepFn, inner_iv: IntervalRef, outer_iv: IntervalRef, phi: YoungFn,
                          kappa: float) -> Tuple[float, float]:
    """(‖f‖_J, ‖f‖_I / Φ^{-1}(|J|/(κ|I|))) for J ⊂ I"""
    if not outer_iv.contains(inner_iv):
        raise ArgumentError("inner interval must lie in the outer one")
    lhs = luxemburg_norm(f, inner_iv, phi)
    rhs = luxemburg_norm(f, outer_iv, phi) / phi.inverse(inner_iv.length / (kappa * outer_iv.length))
    return lhs, rhs


def support_bound(f: StepFn, test_iv: IntervalRef, support: IntervalRef, phi: YoungFn,
                  kappa: float) -> Tuple[float, float]:
    """(‖f‖_J, ‖f‖_{J∩I} / Φ^{-1}(|J∩I|/(κ|J|))) for supp f ⊂ I"""
    outside = np.ones(f.grid.cells, dtype=bool)
    outside[support.start:support.stop] = False
    if np.any(f.values[outside] != 0):
        raise ArgumentError("f must vanish outside the support interval")
    overlap = test_iv.intersect(support)
    lhs = luxemburg_norm(f, test_iv, phi)
    if overlap is None:
        return lhs, 0.0
    rhs = luxemburg_norm(f, overlap, phi) / phi.inverse(overlap.length / (kappa * test_iv.length))
    return lhs, rhs
