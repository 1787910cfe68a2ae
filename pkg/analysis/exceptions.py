# File: bumpwall/analysis/exceptions.py
# ===========================
# WORKBENCH ERRORS
# ===========================


class WorkbenchError(Exception):
    """Base class for every error raised by the numerical core"""


class GridRangeError(WorkbenchError):
    """Interval or placement does not fit in the grid"""


class YoungDomainError(WorkbenchError):
    """Young function evaluated or built outside its domain"""


class PreconditionError(WorkbenchError):
    """Input violates a stated precondition"""


class ArgumentError(WorkbenchError):
    """Argument is inconsistent with the other inputs"""


class ConsistencyError(WorkbenchError):
    """Two evaluation routes of the same quantity disagree"""
