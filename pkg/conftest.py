# File: bumpwall/conftest.py
# ===========================
# SHARED TEST FIXTURES
# ===========================

import numpy as np
import pytest

import config
from analysis.grid import Grid, StepFn
from database.init_db import init_db


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def grid4():
    return Grid(4)


@pytest.fixture
def grid6():
    return Grid(6)


@pytest.fixture
def lognormal_pair(grid6, rng):
    """Positive (u, v) on 64 cells"""
    u = StepFn(grid6, rng.lognormal(0.0, 1.0, grid6.cells))
    v = StepFn(grid6, rng.lognormal(0.0, 1.0, grid6.cells))
    return u, v


@pytest.fixture
def ledger(tmp_path, monkeypatch):
    """Empty run ledger in a temporary directory"""
    path = str(tmp_path / "runs.db")
    monkeypatch.setattr(config, "DB_PATH", path)
    init_db()
    return path
