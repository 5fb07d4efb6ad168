"""Batch figure rendering for rate-region and sweep CSVs."""

__version__ = "0.1.0"
