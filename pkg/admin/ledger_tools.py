# File: bumpwall/admin/ledger_tools.py
# ===========================
# LEDGER BACKUP/RESTORE TOOLS
# ===========================

import json
import logging
import os
import shutil
import sqlite3
from datetime import datetime
from pathlib import Path
from typing import Optional, Tuple

import streamlit as st

import config
from database.operations import get_ledger_stats, load_runs

logger = logging.getLogger(__name__)

LEDGER_VERSION = "bumpwall ledger v1"


def ledger_tools_page():
    """Ledger export, import and backup page"""
    st.subheader("🔧 Ledger Tools")

    stats = get_ledger_stats()
    if stats:
        col1, col2, col3 = st.columns(3)
        with col1:
            st.metric("📊 Runs", stats['run_count'])
        with col2:
            st.metric("✅ Passing", stats['by_verdict'].get("PASS", 0))
        with col3:
            st.metric("🗄️ DB Size", f"{stats['db_size_mb']:.2f} MB")

    st.markdown("---")

    col_export, col_import = st.columns(2)

    with col_export:
        st.markdown("### 📤 Export Ledger")
        if st.button("📄 Export to JSON", key="export_json", use_container_width=True):
            json_data = export_ledger_to_json()
            if json_data:
                timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
                st.download_button(
                    label="⬇️ Download JSON File",
                    data=json_data,
                    file_name=f"bumpwall_ledger_{timestamp}.json",
                    mime="application/json",
                    use_container_width=True
                )
            else:
                st.error("❌ Failed to export ledger")

    with col_import:
        st.markdown("### 📥 Import Ledger")
        st.warning("⚠️ This will replace all existing runs!")
        json_file = st.file_uploader("Choose JSON file", type=['json'], key="json_upload")
        if json_file is not None and st.button("🔄 Import from JSON", key="import_json", use_container_width=True):
            success, message = import_ledger_from_json(json_file.getvalue().decode('utf-8'))
            if success:
                st.success(f"✅ {message}")
                st.rerun()
            else:
                st.error(f"❌ {message}")

    st.markdown("---")
    if st.button("💾 Create Quick Backup", key="quick_backup"):
        backup = backup_ledger()
        if backup:
            st.success(f"✅ Backup created: {backup}")
        else:
            st.error("❌ Failed to create backup")


def export_ledger_to_json() -> str:
    """Export every run as JSON"""
    try:
        runs = load_runs()
        export_data = {
            'export_date': datetime.now().isoformat(),
            'app_version': LEDGER_VERSION,
            'runs_count': len(runs),
            'runs': [run.to_dict() for run in runs],
        }
        return json.dumps(export_data, indent=2, default=str)
    except Exception as e:
        logger.error("Error exporting ledger: %s", e)
        return ""


def import_ledger_from_json(json_data: str) -> Tuple[bool, str]:
    """Replace the ledger with the runs of an export"""
    try:
        data = json.loads(json_data)
        runs = data.get('runs', [])

        conn = sqlite3.connect(config.DB_PATH)
        c = conn.cursor()
        c.execute('DELETE FROM runs')
        for run in runs:
            c.execute('''
            INSERT INTO runs (id, name, command, verdict, seed, config_json, constants_json,
                              report_path, wall_time, created_at)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            ''', (
                run['id'],
                run['name'],
                run['command'],
                run['verdict'],
                run.get('seed'),
                json.dumps(run.get('config', {}), sort_keys=True),
                json.dumps(run.get('constants', {}), sort_keys=True),
                run.get('report_path'),
                run.get('wall_time', 0.0),
                run['created_at'],
            ))
        conn.commit()
        conn.close()
        return True, f"Successfully imported {len(runs)} runs"
    except Exception as e:
        return False, f"Error importing ledger: {e}"


def backup_ledger(directory: str = config.BACKUP_DIR) -> Optional[str]:
    """Copy the ledger file to a timestamped backup"""
    try:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S_%f")
        target = Path(directory)
        target.mkdir(parents=True, exist_ok=True)
        backup = target / f"bumpwall_runs_{timestamp}.db"
        if not os.path.exists(config.DB_PATH):
            raise FileNotFoundError(config.DB_PATH)
        shutil.copy2(config.DB_PATH, backup)
        return str(backup)
    except Exception as e:
        logger.error("Error creating backup: %s", e)
        return None
