# File: bumpwall/ui/components.py
# ===========================
# UI COMPONENTS
# ===========================

import json

import pandas as pd
import streamlit as st

from config import NAV_OPTIONS, VERDICT_FILTERS
from database.models import RunRecord
from utils.helpers import format_constant, get_time_ago, verdict_badge


def render_header():
    """Render the app header"""
    st.title("Bump Wall")
    st.caption("Two-weight bump experiments and their recorded constants")


def render_sidebar():
    """Render the sidebar with filters and navigation"""
    with st.sidebar:
        st.header("🧭 Navigation")
        page = st.radio("Go to", NAV_OPTIONS, key="nav_page")

        st.divider()
        st.selectbox("Verdict", VERDICT_FILTERS, key="verdict_filter")
        st.text_input("Experiment name", key="name_filter")

        st.sidebar.divider()
        st.sidebar.markdown("Bump Wall v0.1")

    return page


def render_run_card(run: RunRecord):
    """One ledger run with its verdict and an open button"""
    css = run.verdict.lower() if run.verdict in ("PASS", "FAIL", "INCONCLUSIVE") else ""
    st.markdown(f"<div class='run-card {css}'><strong>#{run.id} {run.name}</strong> "
                f"{verdict_badge(run.verdict)} · seed {run.seed} · {run.wall_time:.2f}s · "
                f"{get_time_ago(run.created_at)}</div>", unsafe_allow_html=True)
    col1, col2 = st.columns([0.8, 0.2])
    with col1:
        if run.constants:
            with st.expander("Constants"):
                st.dataframe(constants_frame(run.constants), use_container_width=True)
    with col2:
        if st.button("🔍 Open", key=f"open_{run.id}"):
            st.session_state.selected_run = run.id
            st.rerun()


def constants_frame(constants: dict) -> pd.DataFrame:
    rows = [{"name": k, "value": format_constant(v)} for k, v in sorted(constants.items())]
    return pd.DataFrame(rows, columns=["name", "value"])


def render_verdicts(verdicts: dict):
    for name, verdict in sorted(verdicts.items()):
        st.markdown(f"- **{name}**: {verdict_badge(verdict)}")


def render_config(run_config: dict):
    with st.expander("Resolved configuration"):
        st.code(json.dumps(run_config, indent=2, sort_keys=True), language="json")
