# File: bumpwall/analysis/czops.py
# ===========================
# DISCRETE CZ OPERATOR, COMMUTATORS, BMO
# ===========================

import logging
from dataclasses import dataclass
from math import comb
from typing import List, Optional

import numpy as np

from analysis.exceptions import ArgumentError, ConsistencyError, GridRangeError, PreconditionError
from analysis.grid import (ALL_ALIGNED, DYADIC, Grid, IntervalRef, StepFn, group_by_length,
                           interval_arrays, windows)
from analysis.orlicz import hardy_littlewood
from analysis.sparse import SparseFamily, apply_AS, apply_AS_eta_iter, augment_family, build_sparse_cz

logger = logging.getLogger(__name__)

HILBERT = "hilbert"
COMMUTATOR_RTOL = 1e-10
ROW_CHUNK = 256


@dataclass(frozen=True)
class KernelOp:
    """K(x, y) = 1/(x − y) between distinct cell centers, 0 on the diagonal"""
    grid: Grid
    kind: str = HILBERT

    def __post_init__(self):
        if self.kind != HILBERT:
            raise ArgumentError(f"unsupported kernel '{self.kind}'")

    def offsets(self) -> np.ndarray:
        """Kernel by cell offset d = x − y for d in [−(n−1), n−1]"""
        n = self.grid.cells
        d = np.arange(-(n - 1), n, dtype=float)
        with np.errstate(divide="ignore"):
            k = np.where(d != 0, 1.0 / (d * self.grid.cell_width), 0.0)
        return k

    def block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """K at (row cell, column cell) pairs"""
        d = (rows[:, None] - cols[None, :]).astype(float)
        with np.errstate(divide="ignore"):
            return np.where(d != 0, 1.0 / (d * self.grid.cell_width), 0.0)

    def nondegeneracy_constant(self) -> float:
        """min over cells y and radii r of max_{|x−y| >= r} |K(x, y)|·r"""
        n = self.grid.cells
        y = np.arange(n)
        worst = np.inf
        r = 1
        while r < n:
            right = n - 1 - y
            reach = np.where(right >= r, r, np.where(y >= r, r, 0))
            feasible = reach > 0
            if np.any(feasible):
                worst = min(worst, float(np.min(r / reach[feasible])))
            r *= 2
        return worst


def cz_apply(T: KernelOp, f: StepFn) -> StepFn:
    """Σ_{y≠x} K(x, y) f(y)·2^{−L} by direct summation"""
    n = T.grid.cells
    full = np.convolve(f.values, T.offsets())
    return StepFn(T.grid, full[n - 1:2 * n - 1] * T.grid.cell_width, signed=True)


def _abs_apply(T: KernelOp, values: np.ndarray) -> np.ndarray:
    n = T.grid.cells
    return np.convolve(values, np.abs(T.offsets()))[n - 1:2 * n - 1] * T.grid.cell_width


def _commutator_recursion(T: KernelOp, b: np.ndarray, f: np.ndarray, m: int) -> np.ndarray:
    if m == 0:
        return cz_apply(T, StepFn(T.grid, f, signed=True)).values
    return b * _commutator_recursion(T, b, f, m - 1) - _commutator_recursion(T, b, b * f, m - 1)


def commutator_kernel_form(T: KernelOp, b: StepFn, f: StepFn, m: int) -> np.ndarray:
    """Σ_y (b(x) − b(y))^m K(x, y) f(y)·2^{−L}, row-chunked"""
    n = T.grid.cells
    cols = np.arange(n)
    out = np.empty(n)
    for lo in range(0, n, ROW_CHUNK):
        rows = np.arange(lo, min(lo + ROW_CHUNK, n))
        diff = b.values[rows, None] - b.values[None, :]
        out[rows] = (diff ** m * T.block(rows, cols) * f.values[None, :]).sum(axis=1)
    return out * T.grid.cell_width


def commutator_apply(T: KernelOp, b: StepFn, f: StepFn, m: int, verify: bool = True) -> StepFn:
    """T_b^m f = [b, T_b^{m−1}] f, checked against the kernel form"""
    if m < 0:
        raise ArgumentError("commutator order must be nonnegative")
    # [b + c, T] = [b, T], so center b to keep the recursion well conditioned
    centered = b.values - b.values.mean()
    rec = _commutator_recursion(T, centered, f.values, m)
    if verify and m > 0:
        ker = commutator_kernel_form(T, b, f, m)
        bound = np.zeros(T.grid.cells)
        for k in range(m + 1):
            bound += comb(m, k) * np.abs(centered) ** (m - k) * _abs_apply(T, np.abs(centered) ** k * np.abs(f.values))
        tol = COMMUTATOR_RTOL * max(bound.max(), 1e-300)
        gap = np.abs(rec - ker).max()
        if gap > tol:
            raise ConsistencyError(f"commutator routes differ by {gap:.3g} (tolerance {tol:.3g})")
    return StepFn(T.grid, rec, signed=True)


# ============ BMO ============

@dataclass
class BmoReport:
    norm: float
    maximizer: IntervalRef
    mode: str

    def to_dict(self) -> dict:
        return {"norm": self.norm, "maximizer": self.maximizer.to_dict(), "mode": self.mode}


def bmo_norm(b: StepFn, eta: Optional[StepFn] = None, mode: str = ALL_ALIGNED,
             budget: Optional[int] = None, within: Optional[IntervalRef] = None) -> BmoReport:
    """sup_Q (1/η(Q))∫_Q |b − b_Q| over enumerated intervals"""
    if eta is not None and np.any(eta.values <= 0):
        raise PreconditionError("η must be positive")
    starts, lengths = interval_arrays(b.grid, mode, budget, within)
    scores = np.zeros(starts.size)
    h = b.grid.cell_width
    for length, idx in group_by_length(starts, lengths):
        step = max(1, 4_000_000 // length)
        for lo in range(0, idx.size, step):
            part = idx[lo:lo + step]
            win = windows(b.values, length, starts[part])
            mass = np.abs(win - win.mean(axis=1, keepdims=True)).sum(axis=1) * h
            weight = length * h if eta is None else eta.interval_sums(starts[part], lengths[part])
            scores[part] = mass / weight
    best = int(np.argmax(scores))
    return BmoReport(float(scores[best]), IntervalRef(int(starts[best]), int(lengths[best])), mode)


# ============ JONES EXTENSION ============

@dataclass
class JonesExtension:
    phi: StepFn
    ratio: float
    f_bmo: float
    phi_bmo: float


def whitney_pairs(R: IntervalRef) -> List[tuple]:
    """(outside interval, mirror inside R) pairs tiling the two flanks of R inside 2R"""
    n = R.length
    pairs = []
    a = n // 4
    while a >= 1:
        pairs.append((IntervalRef(R.stop + a, a), IntervalRef(R.stop - 2 * a, a)))
        pairs.append((IntervalRef(R.start - 2 * a, a), IntervalRef(R.start + a, a)))
        a //= 2
    pairs.append((IntervalRef(R.stop, 1), IntervalRef(R.stop - 1, 1)))
    pairs.append((IntervalRef(R.start - 1, 1), IntervalRef(R.start, 1)))
    return pairs


def jones_extend(f: StepFn, R: IntervalRef, mode: str = ALL_ALIGNED) -> JonesExtension:
    """Extension of f|_R by Whitney mirror averages, zero off 2R"""
    R.check(f.grid)
    n = R.length
    if n < 2 or n & (n - 1):
        raise PreconditionError("R must span a power-of-two number of cells >= 2")
    if R.start - n // 2 < 0 or R.stop + n // 2 > f.grid.cells:
        raise GridRangeError("2R leaves the domain")
    local = f.values[R.start:R.stop]
    scale = max(1.0, float(np.abs(local).max()))
    if abs(local.mean()) > 1e-9 * scale:
        raise PreconditionError(f"f has mean {local.mean():.3g} on R; subtract it first")
    phi = np.zeros(f.grid.cells)
    phi[R.start:R.stop] = local
    for outside, mirror in whitney_pairs(R):
        phi[outside.start:outside.stop] = f.values[mirror.start:mirror.stop].mean()
    ext = StepFn(f.grid, phi, signed=True)
    f_bmo = bmo_norm(f, mode=mode, within=R).norm
    phi_bmo = bmo_norm(ext, mode=mode).norm
    ratio = phi_bmo / f_bmo if f_bmo > 0 else 0.0
    return JonesExtension(ext, ratio, f_bmo, phi_bmo)


# ============ NECESSITY TOOLS ============

@dataclass
class TestFunction:
    g: StepFn
    mean_on_q: float


def neccond_testfn(v: StepFn, Q: IntervalRef, p: float, mode: str = DYADIC) -> TestFunction:
    """g = log⁺(M(σχ_Q)/σ_Q) with σ = v^{1−p′}"""
    if np.any(v.values <= 0):
        raise PreconditionError("v must be positive")
    p_dual = p / (p - 1)
    sigma = v.power(1 - p_dual)
    local = sigma.restricted(Q)
    sigma_q = local.values[Q.start:Q.stop].mean()
    maximal = hardy_littlewood(local, mode)
    g = np.maximum(np.log(np.maximum(maximal.values, 1e-300) / sigma_q), 0.0)
    return TestFunction(StepFn(v.grid, g), float(g[Q.start:Q.stop].mean()))


@dataclass
class PartnerReport:
    interval: IntervalRef
    kernel_center: float
    eps: float


def disjoint_partner(B: IntervalRef, A: float, grid: Grid) -> PartnerReport:
    """Interval of |B| at gap A|B| (right, else left) with the kernel variation ε_A"""
    if A < 3:
        raise ArgumentError("separation factor A must be at least 3")
    B.check(grid)
    gap = int(round(A * B.length))
    if B.stop + gap + B.length <= grid.cells:
        partner = IntervalRef(B.stop + gap, B.length)
    elif B.start - gap - B.length >= 0:
        partner = IntervalRef(B.start - gap - B.length, B.length)
    else:
        raise GridRangeError(f"no room for a partner at gap {gap} cells")
    h = grid.cell_width
    x0 = (partner.start + partner.length / 2) * h
    y0 = (B.start + B.length / 2) * h
    center = 1.0 / (x0 - y0)
    xs = (np.arange(partner.start, partner.stop) + 0.5) * h
    ys = (np.arange(B.start, B.stop) + 0.5) * h
    variation = np.abs(1.0 / (xs[:, None] - ys[None, :]) - center).max()
    return PartnerReport(partner, float(center), float(variation * A * B.measure(grid)))


def pointwise_sparse_bound(b: StepFn, f: StepFn, family: SparseFamily, m: int) -> np.ndarray:
    """Σ_Q Σ_{k<=m} |b − b_Q|^{m−k} (|b − b_Q|^k |f|)_Q χ_Q"""
    out = np.zeros(b.grid.cells)
    absf = np.abs(f.values)
    for q in family.cubes:
        local = b.values[q.start:q.stop]
        dev = np.abs(local - local.mean())
        fq = absf[q.start:q.stop]
        for k in range(m + 1):
            out[q.start:q.stop] += dev ** (m - k) * np.mean(dev ** k * fq)
    return out


def sparse_domination_constant(T: KernelOp, b: StepFn, f: StepFn, m: int, mode: str = DYADIC) -> float:
    """max |T_b^m f| / sparse bound with S = CZ stopping cubes of M f"""
    family = build_sparse_cz(hardy_littlewood(f, mode))
    lhs = np.abs(commutator_apply(T, b, f, m).values)
    rhs = pointwise_sparse_bound(b, f, family, m)
    if np.any((lhs > 0) & (rhs <= 0)):
        return float("inf")
    ratio = np.divide(lhs, rhs, out=np.zeros_like(lhs), where=rhs > 0)
    return float(ratio.max(initial=0.0))


def dual1_ratio(T: KernelOp, b: StepFn, f: StepFn, g: StepFn, m: int,
                eta: Optional[StepFn] = None) -> float:
    """|⟨T_b^m f, g⟩| / (‖b‖^m_{BMO_η} ⟨A_S(A^m_{S,η}|f|), g⟩)"""
    eta = eta or StepFn.constant(b.grid, 1.0)
    family = augment_family(build_sparse_cz(hardy_littlewood(f)), b)
    lhs = abs(float(np.dot(commutator_apply(T, b, f, m).values, g.values)) * b.grid.cell_width)
    norm = bmo_norm(b, eta).norm
    inner_sum = apply_AS(family, apply_AS_eta_iter(family, eta, f.abs(), m))
    rhs = norm ** m * float(np.dot(inner_sum.values, g.values)) * b.grid.cell_width
    return lhs / rhs if rhs > 0 else 0.0
