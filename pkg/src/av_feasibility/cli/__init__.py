"""Command-line interface for the AV feasibility simulator."""
