# File: bumpwall/config.py
# ===========================
# CONFIGURATION AND CONSTANTS
# ===========================

import logging
import typing
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional

import streamlit as st

from analysis.bump import DEFAULT_DELTA, DEFAULT_EPSILON
from analysis.grid import DYADIC

# Streamlit configuration
PAGE_CONFIG = {
    "page_title": "Bump Wall",
    "page_icon": "📐",
    "layout": "wide",
    "initial_sidebar_state": "expanded"
}

# Database configuration
DB_PATH = "bumpwall_runs.db"
OUTPUT_DIR = "reports"
BACKUP_DIR = "backups"

# Grid defaults and guardrails; numerical tolerances live with the analysis modules
DEFAULT_LEVELS = 8
DEFAULT_SPAN = 0
DEFAULT_MODE = DYADIC
MAX_LEVELS = 16
MAX_M = 4

# Exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64

COMMANDS = ["orlicz-norm", "bump", "opnorm", "experiment", "ledger"]
EXPERIMENTS = ["calc", "example", "dual2", "sufficiency", "neccond", "lsu", "orlicz"]
LEDGER_ACTIONS = ["list", "export", "import", "backup"]

# Navigation options
NAV_OPTIONS = ["📋 Runs", "🔍 Report", "🔧 Ledger Tools"]
VERDICT_FILTERS = ["All", "PASS", "FAIL", "INCONCLUSIVE", "RECORDED"]

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid run configuration; carries the offending field"""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field_name = field_name


@dataclass
class RunConfig:
    """Fully resolved parameters of one CLI run"""
    command: str = ""
    target: str = ""
    p: Optional[float] = None
    m: int = 0
    levels: int = DEFAULT_LEVELS
    span: int = DEFAULT_SPAN
    seed: int = 0
    mode: str = DEFAULT_MODE
    preset: Optional[str] = None
    young_a: Optional[str] = None
    young_b: Optional[str] = None
    young: Optional[str] = None
    u: str = "ones"
    v: str = "ones"
    f: str = "ones"
    op: str = "identity"
    a_list: List[float] = field(default_factory=list)
    N: int = 8
    N1: int = 18
    theorem: str = "extbctbm"
    kind: str = "power"
    family: str = "spike"
    count: int = 50
    depth: int = 4
    budget: int = 1000
    m_max: int = 3
    p_list: List[float] = field(default_factory=list)
    m_list: List[int] = field(default_factory=list)
    delta: float = DEFAULT_DELTA
    eps: float = DEFAULT_EPSILON
    output_dir: str = OUTPUT_DIR
    jobs: int = 1
    resolution_factor: float = 2.0
    ledger: bool = True
    path: Optional[str] = None

    def validate(self) -> "RunConfig":
        """Check numeric fields before dispatch"""
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command '{self.command}'")
        if self.command == "experiment" and self.target not in EXPERIMENTS:
            raise ConfigError("target", f"unknown experiment '{self.target}'")
        if self.command == "ledger" and self.target not in LEDGER_ACTIONS:
            raise ConfigError("target", f"unknown ledger action '{self.target}'")
        if self.p is not None and not self.p > 1:
            raise ConfigError("p", f"must exceed 1 (got {self.p})")
        if any(not p > 1 for p in self.p_list):
            raise ConfigError("p_list", "every p must exceed 1")
        if not 0 <= self.m <= MAX_M:
            raise ConfigError("m", f"must lie in [0, {MAX_M}] (got {self.m})")
        if any(not 0 <= m <= MAX_M for m in self.m_list):
            raise ConfigError("m_list", f"every m must lie in [0, {MAX_M}]")
        if not 1 <= self.m_max <= MAX_M:
            raise ConfigError("m_max", f"must lie in [1, {MAX_M}] (got {self.m_max})")
        if not 1 <= self.levels <= MAX_LEVELS:
            raise ConfigError("levels", f"must lie in [1, {MAX_LEVELS}] (got {self.levels})")
        if self.levels + self.span > MAX_LEVELS + 8:
            raise ConfigError("span", "grid would exceed the cell guardrail")
        if self.mode not in ("dyadic", "all_aligned"):
            raise ConfigError("mode", f"unknown mode '{self.mode}'")
        for name in ("count", "depth", "budget", "jobs"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be at least 1")
        if self.N1 < self.N:
            raise ConfigError("N1", "must be at least N")
        if any(not 0 < a < 1 for a in self.a_list):
            raise ConfigError("a_list", "every a must lie in (0, 1)")
        if self.resolution_factor < 1:
            raise ConfigError("resolution_factor", "must be at least 1")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown configuration key")
        return cls(**data)


# ============ CONFIG FILES ============

def _coerce(name: str, kind: Any, text: str) -> Any:
    """Parse text as the declared field type"""
    args = typing.get_args(kind)
    if typing.get_origin(kind) is typing.Union:
        if text.lower() in ("", "none"):
            return None
        kind = next(a for a in args if a is not type(None))
        args = typing.get_args(kind)
    try:
        if typing.get_origin(kind) in (list, List):
            return [_coerce(name, args[0], part.strip()) for part in text.split(",") if part.strip()]
        if kind is bool:
            lowered = text.lower()
            if lowered not in ("true", "false", "yes", "no", "1", "0"):
                raise ValueError(text)
            return lowered in ("true", "yes", "1")
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError(name, f"cannot parse '{text}'")
    return text


def parse_config_text(text: str) -> Dict[str, Any]:
    """Line-oriented key = value with # comments"""
    hints = typing.get_type_hints(RunConfig)
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {number}", f"expected key = value, got '{line}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in hints:
            raise ConfigError(key, "unknown configuration key")
        values[key] = _coerce(key, hints[key], value)
    return values


def load_config_file(path: str) -> Dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e}")
    return parse_config_text(text)


def merge(file_values: Dict[str, Any], flags: Dict[str, Any]) -> RunConfig:
    """File values overridden by every flag that was given"""
    data = dict(file_values)
    data.update({k: v for k, v in flags.items() if v is not None})
    return RunConfig.from_dict(data).validate()


# ============ LOGGING ============

def setup_logging(level: str = "INFO"):
    """Configure the root logger once"""
    root = logging.getLogger()
    if root.handlers:
        root.setLevel(level)
        return
    logging.basicConfig(level=level, format=LOG_FORMAT)


# ============ SESSION STATE ============

def init_session_state():
    """Initialize all session state variables"""
    default_state = {
        'selected_run': None,
        'verdict_filter': VERDICT_FILTERS[0],
        'name_filter': "",
        'confirm_delete': None,
    }

    for key, value in default_state.items():
        if key not in st.session_state:
            st.session_state[key] = value
