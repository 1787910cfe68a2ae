# File: bumpwall/experiments/multiscale.py
# ===========================
# GLUED MULTI-SCALE MESH
# ===========================

import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from analysis.exceptions import ArgumentError, GridRangeError
from analysis.orlicz import YoungFn, luxemburg_from_distribution

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Anchor:
    """Point given as (piece index, offset inside the piece)"""
    piece: int
    offset: float


@dataclass
class GluedMesh:
    """Piecewise-constant (u, v) stored as pieces with exact local lengths"""
    lengths: List[float] = field(default_factory=list)
    u: List[float] = field(default_factory=list)
    v: List[float] = field(default_factory=list)
    tags: List[str] = field(default_factory=list)

    def append(self, length: float, u: float, v: float, tag: str) -> int:
        if length <= 0:
            raise ArgumentError(f"piece '{tag}' has non-positive length {length}")
        if u < 0 or v <= 0:
            raise ArgumentError(f"piece '{tag}' needs u >= 0 and v > 0")
        self.lengths.append(float(length))
        self.u.append(float(u))
        self.v.append(float(v))
        self.tags.append(tag)
        return len(self.lengths) - 1

    def __len__(self) -> int:
        return len(self.lengths)

    def pieces_tagged(self, prefix: str) -> List[int]:
        return [i for i, t in enumerate(self.tags) if t.startswith(prefix)]

    def anchor(self, piece: int, offset: float) -> Anchor:
        if not 0 <= piece < len(self) or not 0 <= offset <= self.lengths[piece]:
            raise GridRangeError(f"anchor ({piece}, {offset}) is off the mesh")
        return Anchor(piece, float(offset))

    def normalize(self, point: Anchor) -> Anchor:
        """Move a piece-end anchor to the start of the next piece"""
        if point.offset >= self.lengths[point.piece] and point.piece + 1 < len(self):
            return Anchor(point.piece + 1, 0.0)
        return point

    def start(self, piece: int) -> Anchor:
        return Anchor(piece, 0.0)

    def stop(self, piece: int) -> Anchor:
        return Anchor(piece, self.lengths[piece])

    # ============ DISTRIBUTIONS ============

    def overlaps(self, intervals: Sequence[Tuple[Anchor, Anchor]]) -> np.ndarray:
        """(rows, pieces) overlap measures, exact per piece"""
        lengths = np.asarray(self.lengths)
        out = np.zeros((len(intervals), len(self)))
        for row, (lo, hi) in enumerate(intervals):
            if (hi.piece, hi.offset) <= (lo.piece, lo.offset):
                raise ArgumentError(f"empty interval {lo} to {hi}")
            if lo.piece == hi.piece:
                out[row, lo.piece] = hi.offset - lo.offset
                continue
            out[row, lo.piece] = lengths[lo.piece] - lo.offset
            out[row, lo.piece + 1:hi.piece] = lengths[lo.piece + 1:hi.piece]
            out[row, hi.piece] = hi.offset
        return out

    def norms(self, values: np.ndarray, overlaps: np.ndarray, phi: YoungFn) -> np.ndarray:
        """Luxemburg norms of a piecewise function over each row's overlap"""
        return luxemburg_from_distribution(np.asarray(values, dtype=float)[None, :], overlaps, phi)

    def bump_products(self, overlaps: np.ndarray, p: float, A: YoungFn, B: YoungFn) -> np.ndarray:
        """‖u^{1/p}‖_{A,J}·‖v^{−1/p}‖_{B,J} per row"""
        lam = np.asarray(self.u) ** (1.0 / p)
        mu = np.asarray(self.v) ** (-1.0 / p)
        return self.norms(lam, overlaps, A) * self.norms(mu, overlaps, B)

    def integrals(self, values: np.ndarray, overlaps: np.ndarray) -> np.ndarray:
        return overlaps @ np.asarray(values, dtype=float)

    def averages(self, values: np.ndarray, overlaps: np.ndarray) -> np.ndarray:
        return self.integrals(values, overlaps) / overlaps.sum(axis=1)
