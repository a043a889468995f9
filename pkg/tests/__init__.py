"""Test suite for cphase-witness.

Uses pytest with hypothesis for property tests and click's CliRunner for the
CLI. Run with:
    uv run pytest tests/ -v
"""
