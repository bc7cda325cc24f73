"""Sector-preimage areas of analytic functions."""
