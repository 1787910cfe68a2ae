# File: bumpwall/experiments/report.py
# ===========================
# EXPERIMENT REPORTS AND VERDICTS
# ===========================

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
RECORDED = "RECORDED"
VERDICTS = (PASS, FAIL, INCONCLUSIVE, RECORDED)

MIN_R2 = 0.8
# recorded constants at two resolutions must agree within this factor
RESOLUTION_FACTOR = 2.0


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r2: float
    residuals: List[float]

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                "residuals": self.residuals}


def fit_slope(x: Sequence[float], y: Sequence[float]) -> SlopeFit:
    """Least-squares line through (x, y)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    fit = stats.linregress(x, y)
    resid = y - (fit.intercept + fit.slope * x)
    r2 = float(fit.rvalue ** 2) if np.isfinite(fit.rvalue) else 0.0
    return SlopeFit(float(fit.slope), float(fit.intercept), r2, [float(r) for r in resid])


def slope_verdict(fit: SlopeFit, target: float, tol: float) -> str:
    """PASS when the slope is within tol of target; flat targets skip the R² gate"""
    close = abs(fit.slope - target) <= tol
    if target == 0 and close:
        return PASS
    if fit.r2 < MIN_R2:
        return INCONCLUSIVE
    return PASS if close else FAIL


def resolution_verdict(coarse: float, fine: float, factor: float = RESOLUTION_FACTOR) -> str:
    """PASS when two resolutions record the same constant within factor"""
    if not (np.isfinite(coarse) and np.isfinite(fine)):
        return FAIL
    lo, hi = sorted((coarse, fine))
    if lo <= 0:
        return PASS if hi <= 0 else INCONCLUSIVE
    return PASS if hi / lo <= factor else FAIL


def combine(verdicts: Dict[str, str]) -> str:
    """Overall verdict: any FAIL, else any INCONCLUSIVE, else PASS"""
    values = set(verdicts.values())
    if FAIL in values:
        return FAIL
    if INCONCLUSIVE in values:
        return INCONCLUSIVE
    if PASS in values:
        return PASS
    return RECORDED


@dataclass
class ExperimentReport:
    name: str
    parameters: Dict[str, Any]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    constants: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, str] = field(default_factory=dict)
    fits: Dict[str, SlopeFit] = field(default_factory=dict)
    seed: Optional[int] = None
    wall_time: float = 0.0

    @property
    def overall(self) -> str:
        return combine(self.verdicts)

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameters": self.parameters,
            "constants": self.constants,
            "verdicts": self.verdicts,
            "overall": self.overall,
            "fits": {k: f.to_dict() for k, f in self.fits.items()},
            "seed": self.seed,
            "wall_time": self.wall_time,
        }

    def write(self, directory: str) -> Tuple[Path, Path]:
        """Write <name>.report.json and <name>.table.csv"""
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / f"{self.name}.report.json"
        csv_path = out / f"{self.name}.table.csv"
        json_path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True, default=str))
        self.table().to_csv(csv_path, index=False, float_format="%.12g")
        logger.info("wrote %s and %s", json_path, csv_path)
        return json_path, csv_path

    def summary(self) -> str:
        """One-line verdict summary"""
        shown = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in sorted(self.constants.items()) if not isinstance(v, (list, dict)))
        return f"{self.name}: {self.overall} ({shown})"


class Stopwatch:
    """Context manager filling a report's wall_time"""

    def __init__(self, report: ExperimentReport):
        self.report = report

    def __enter__(self):
        self._start = time.perf_counter()
        return self.report

    def __exit__(self, *exc):
        self.report.wall_time = time.perf_counter() - self._start
        return False


def load_report(path: str) -> Optional[dict]:
    """Read a report JSON, None when missing or unreadable"""
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        logger.error("Error reading report %s: %s", path, e)
        return None


def load_table(path: str) -> Optional[pd.DataFrame]:
    try:
        return pd.read_csv(path)
    except (OSError, ValueError) as e:
        logger.error("Error reading table %s: %s", path, e)
        return None
