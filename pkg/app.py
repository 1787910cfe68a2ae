# File: bumpwall/app.py
# ===========================
# BUMP WALL - REPORT BROWSER
# ===========================

import os
import sys

import streamlit as st

# Add the current directory to Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import PAGE_CONFIG, init_session_state, setup_logging
from database.init_db import init_db
from ui.styling import get_custom_css


def main():
    """Main entry point for the report browser"""
    # Set page config FIRST
    st.set_page_config(**PAGE_CONFIG)

    st.markdown(get_custom_css(), unsafe_allow_html=True)

    setup_logging()
    init_session_state()
    init_db()

    # Import pages here to avoid circular imports
    from ui.pages import main_page
    main_page()


if __name__ == "__main__":
    main()
