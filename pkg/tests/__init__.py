"""Test suite for the crane sway lab.

Run with: pytest
Skip the full-length scenario runs with: pytest -m "not slow"
"""
