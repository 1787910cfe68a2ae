# File: bumpwall/database/operations.py
# ===========================
# DATABASE CRUD OPERATIONS
# ===========================

import json
import logging
import os
import sqlite3
from typing import Any, Dict, List, Optional

import config
from .models import RunRecord

logger = logging.getLogger(__name__)

# ============ RUN OPERATIONS ============

def save_run(name: str, command: str, verdict: str, seed: Optional[int], run_config: Dict[str, Any],
             constants: Dict[str, Any], report_path: Optional[str], wall_time: float) -> Optional[int]:
    """Save a run to the ledger, returning its id"""
    try:
        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()
        c.execute('''
        INSERT INTO runs (name, command, verdict, seed, config_json, constants_json, report_path, wall_time)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?)
        ''', (name, command, verdict, seed, json.dumps(run_config, sort_keys=True, default=str),
              json.dumps(constants, sort_keys=True, default=str), report_path, wall_time))
        run_id = c.lastrowid
        conn.commit()
        conn.close()
        return run_id
    except Exception as e:
        logger.error("Error saving run: %s", e)
        return None

def load_runs(name: Optional[str] = None) -> List[RunRecord]:
    """Load runs, newest first, optionally for one experiment name"""
    try:
        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()
        if name:
            c.execute('SELECT * FROM runs WHERE name = ? ORDER BY id DESC', (name,))
        else:
            c.execute('SELECT * FROM runs ORDER BY id DESC')
        rows = c.fetchall()
        conn.close()

        return [RunRecord.from_db_row(row) for row in rows]
    except Exception as e:
        logger.error("Error loading runs: %s", e)
        return []

def get_run(run_id: int) -> Optional[RunRecord]:
    try:
        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()
        c.execute('SELECT * FROM runs WHERE id = ?', (run_id,))
        row = c.fetchone()
        conn.close()
        return RunRecord.from_db_row(row) if row else None
    except Exception as e:
        logger.error("Error loading run %s: %s", run_id, e)
        return None

def delete_run(run_id: int) -> bool:
    """Delete a run record; report files stay on disk"""
    try:
        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()
        c.execute('DELETE FROM runs WHERE id = ?', (run_id,))
        conn.commit()
        conn.close()
        return True
    except Exception as e:
        logger.error("Error deleting run: %s", e)
        return False

# ============ STATISTICS ============

def get_ledger_stats():
    """Run counts per verdict, latest run and ledger size"""
    try:
        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()

        c.execute('SELECT COUNT(*) FROM runs')
        run_count = c.fetchone()[0]

        c.execute('SELECT verdict, COUNT(*) FROM runs GROUP BY verdict')
        by_verdict = dict(c.fetchall())

        c.execute('SELECT MAX(created_at) FROM runs')
        latest_run = c.fetchone()[0]

        conn.close()

        db_size = os.path.getsize(config.DB_PATH) if os.path.exists(config.DB_PATH) else 0

        return {
            'run_count': run_count,
            'by_verdict': by_verdict,
            'latest_run': latest_run,
            'db_size_mb': db_size / (1024 * 1024)
        }
    except Exception as e:
        logger.error("Error getting ledger stats: %s", e)
        return None
