# File: bumpwall/database/init_db.py
# ===========================
# DATABASE INITIALIZATION
# ===========================

import sqlite3

import config


def init_db():
    """Initialize the run ledger"""
    conn = sqlite3.connect(config.DB_PATH)
    c = conn.cursor()

    # Runs table
    c.execute('''
    CREATE TABLE IF NOT EXISTS runs (
        id INTEGER PRIMARY KEY AUTOINCREMENT,
        name TEXT NOT NULL,
        command TEXT NOT NULL,
        verdict TEXT NOT NULL,
        seed INTEGER,
        config_json TEXT NOT NULL,
        constants_json TEXT DEFAULT '{}',
        report_path TEXT,
        wall_time REAL DEFAULT 0,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    )
    ''')

    # Create indexes
    c.execute('''CREATE INDEX IF NOT EXISTS idx_runs_name ON runs(name)''')

    conn.commit()
    conn.close()
