"""
Helper Functions Module

Seeding, table output and small formatting helpers shared by the pipeline
"""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Independent random generator for a (seed, key, ...) tuple

    Args:
        seed: Run-level seed
        keys: Further integers identifying the consumer (epoch, sample index, ...)

    Returns:
        Generator: A generator whose stream depends only on the arguments
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]))


def derive_seed(seed: int, *keys: int) -> int:
    """Stable 32-bit integer seed for a (seed, key, ...) tuple"""
    return int(np.random.SeedSequence([int(seed), *(int(k) for k in keys)]).generate_state(1)[0])


def write_csv(frame: pd.DataFrame, path: str | Path) -> bool:
    """
    Write a table as UTF-8 CSV with LF line endings

    Args:
        frame: Table to write
        path: Destination file

    Returns:
        bool: Whether the write succeeded
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    except OSError:
        logger.exception("Error writing %s", path)
        return False
    else:
        logger.debug("Wrote %d rows to %s", len(frame), path)
        return True


def format_percent(value: float, digits: int = 2) -> str:
    """Format a 0..100 value as ``12.34%``"""
    return f"{value:.{digits}f}%"


def format_probability(probability: float) -> str:
    """Format a 0..1 probability as a percentage"""
    return format_percent(100.0 * probability)


def format_counts(counts: dict[str, int]) -> str:
    """``train=700 val=150`` style summary in insertion order"""
    return " ".join(f"{key}={value}" for key, value in counts.items())


def normalize_log_level(level: str | None, default: str = "INFO") -> str:
    """Upper-case a level name, falling back to ``default`` for unknown names"""
    if not level:
        return default
    upper = level.strip().upper()
    if upper not in LOG_LEVELS:
        logger.warning("Unknown log level '%s'. Using %s.", level, default)
        return default
    return upper


def batches(indices: Sequence[int], batch_size: int) -> list[list[int]]:
    """Split indices into consecutive chunks of at most ``batch_size``"""
    return [list(indices[i : i + batch_size]) for i in range(0, len(indices), batch_size)]
