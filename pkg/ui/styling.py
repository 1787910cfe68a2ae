# File: bumpwall/ui/styling.py
# ===========================
# UI STYLING AND CSS
# ===========================

def get_custom_css() -> str:
    """Return custom CSS for the app"""
    return """
    <style>
        body {
            background-color: #0a0e27;
            color: #e0e0e0;
        }
        .run-card {
            background-color: #1a1a2e;
            padding: 12px 15px;
            border-radius: 8px;
            border: 1px solid #4a4a6a;
            margin: 8px 0;
        }
        .run-card.fail {
            border-left: 4px solid #e53e3e;
        }
        .run-card.pass {
            border-left: 4px solid #2e7d32;
        }
        .run-card.inconclusive {
            border-left: 4px solid #d69e2e;
        }
        .constant-table td {
            font-family: monospace;
        }
        .stSuccess {
            background-color: #1a472a !important;
            border-color: #2e7d32 !important;
            color: #e0e0e0 !important;
        }
    </style>
    """
