# File: bumpwall/ui/pages.py
# ===========================
# PAGE RENDERING FUNCTIONS
# ===========================

from pathlib import Path
from typing import List

import streamlit as st

from admin.ledger_tools import ledger_tools_page
from database.models import RunRecord
from database.operations import delete_run, get_run, load_runs
from experiments.report import load_report, load_table
from ui.components import (constants_frame, render_config, render_header, render_run_card,
                           render_sidebar, render_verdicts)
from utils.helpers import report_summary, verdict_badge


def main_page():
    """Main app function that handles page routing"""
    render_header()

    page = render_sidebar()

    if page == "📋 Runs":
        runs_page()
    elif page == "🔍 Report":
        report_page()
    elif page == "🔧 Ledger Tools":
        ledger_tools_page()

# ============ RUNS PAGE ============

def filter_runs(runs: List[RunRecord], verdict: str, name: str) -> List[RunRecord]:
    """Runs matching the sidebar filters"""
    if verdict and verdict != "All":
        runs = [r for r in runs if r.verdict == verdict]
    if name:
        runs = [r for r in runs if name.lower() in r.name.lower()]
    return runs


def runs_page():
    """Ledger run list"""
    st.subheader("📋 Runs")
    runs = filter_runs(load_runs(), st.session_state.verdict_filter, st.session_state.name_filter)
    if not runs:
        st.info("No runs recorded yet. Run `python cli.py experiment ...` to add some.")
        return
    for run in runs:
        render_run_card(run)

# ============ REPORT PAGE ============

def report_page():
    """Verdicts, constants and case table of the selected run"""
    run_id = st.session_state.selected_run
    if run_id is None:
        st.info("Open a run from the Runs page.")
        return
    run = get_run(run_id)
    if run is None:
        st.error(f"Run #{run_id} is not in the ledger")
        return

    st.subheader(f"🔍 #{run.id} {run.name} {verdict_badge(run.verdict)}")
    render_config(run.config)

    report = load_report(run.report_path) if run.report_path else None
    if report is None:
        st.warning("Report file is missing; showing ledger constants only.")
        st.dataframe(constants_frame(run.constants), use_container_width=True)
    else:
        st.write(report_summary(report))
        render_verdicts(report.get("verdicts", {}))
        st.dataframe(constants_frame(report.get("constants", {})), use_container_width=True)
        if report.get("fits"):
            st.markdown("**Slope fits**")
            st.json(report["fits"])
        table = load_table(str(Path(run.report_path).with_name(f"{run.name}.table.csv")))
        if table is not None:
            st.markdown("**Case table**")
            st.dataframe(table, use_container_width=True)

    if st.session_state.confirm_delete == run.id:
        st.warning("Delete this run from the ledger? Report files stay on disk.")
        col1, col2 = st.columns(2)
        with col1:
            if st.button("✅ Confirm", key="confirm_delete_yes"):
                delete_run(run.id)
                st.session_state.selected_run = None
                st.session_state.confirm_delete = None
                st.rerun()
        with col2:
            if st.button("❌ Cancel", key="confirm_delete_no"):
                st.session_state.confirm_delete = None
                st.rerun()
    elif st.button("🗑️ Delete run", key="delete_run"):
        st.session_state.confirm_delete = run.id
        st.rerun()
