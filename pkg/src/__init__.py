"""
dualvote
Heterogeneous anomaly detector panel with dual ensemble voting fusion
"""

__version__ = "1.0.0"
