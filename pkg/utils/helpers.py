# File: bumpwall/utils/helpers.py
# ===========================
# UTILITY FUNCTIONS
# ===========================

from datetime import datetime
from typing import Any, Dict, Optional

import numpy as np

from analysis.exceptions import ArgumentError
from analysis.grid import Grid, StepFn, load_stepfn

VERDICT_BADGES = {
    "PASS": "🟢 PASS",
    "FAIL": "🔴 FAIL",
    "INCONCLUSIVE": "🟡 INCONCLUSIVE",
    "RECORDED": "⚪ RECORDED",
}


def parse_weight(text: str, grid: Grid, role: str = "u") -> StepFn:
    """Weight from ones, power:γ, spike:h:w, appendix:a:p or file:<path>"""
    kind, _, rest = text.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "ones" and not args:
            return StepFn.constant(grid, 1.0)
        if kind == "power" and len(args) == 1:
            gamma = float(args[0])
            return StepFn.from_function(grid, lambda x: x ** gamma)
        if kind == "spike" and len(args) == 2:
            height, width = float(args[0]), float(args[1])
            cells = max(1, int(round(width / grid.cell_width)))
            values = np.ones(grid.cells)
            start = (grid.cells - cells) // 2
            values[start:start + cells] = height
            return StepFn(grid, values)
        if kind == "appendix" and len(args) == 2:
            from experiments.localized import gen_localized_weights
            a, p = float(args[0]), float(args[1])
            weights = gen_localized_weights(a, p, 0.0, grid)
            return weights.u if role == "u" else weights.v
        if kind == "file" and rest:
            f = load_stepfn(rest)
            if f.grid != grid:
                raise ArgumentError(f"{rest} lives on a different grid")
            return f
    except ValueError:
        raise ArgumentError(f"bad numbers in weight '{text}'")
    raise ArgumentError(f"unknown weight '{text}'")


def verdict_badge(verdict: Optional[str]) -> str:
    """Badge text for a verdict"""
    return VERDICT_BADGES.get(verdict or "", "❔ UNKNOWN")


def format_constant(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def report_summary(report: Dict[str, Any]) -> str:
    """One-line summary of a loaded report JSON"""
    verdicts = report.get("verdicts", {})
    failing = sorted(k for k, v in verdicts.items() if v != "PASS" and v != "RECORDED")
    text = f"{report.get('name', '?')}: {report.get('overall', '?')} with {len(verdicts)} verdicts"
    if failing:
        text += f" ({', '.join(failing)} not passing)"
    return text


def get_time_ago(timestamp: datetime) -> str:
    """Calculate relative time"""
    now = datetime.now()
    diff = now - timestamp
    minutes = int(diff.total_seconds() / 60)
    hours = int(diff.total_seconds() / 3600)
    days = int(diff.total_seconds() / 86400)

    if minutes < 1:
        return "just now"
    elif minutes < 60:
        return f"{minutes} minute{'s' if minutes > 1 else ''} ago"
    elif hours < 24:
        return f"{hours} hour{'s' if hours > 1 else ''} ago"
    else:
        return f"{days} day{'s' if days > 1 else ''} ago"
