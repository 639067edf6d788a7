"""
Utils Layer

This module contains utility functions shared across the recognition pipeline.
"""

from .helpers import (
    LOG_LEVELS,
    batches,
    derive_rng,
    derive_seed,
    format_counts,
    format_percent,
    format_probability,
    normalize_log_level,
    write_csv,
)

__all__ = [
    "LOG_LEVELS",
    "batches",
    "derive_rng",
    "derive_seed",
    "format_counts",
    "format_percent",
    "format_probability",
    "normalize_log_level",
    "write_csv",
]
