"""
Application settings

A settings file is sectioned ``key = value`` text::

    [train]
    batch_size = 32
    lr = 0.001

    [decoder]
    name = wordbeamsearch

Sections map onto the pydantic models of the owning packages, so unknown
sections and keys are rejected by name. ``HTR_LOG_LEVEL`` and ``HTR_SEED``
from the environment (or a ``.env`` file) supply defaults.
"""

from __future__ import annotations

import configparser
import logging
import os
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from data.charset import DEFAULT_PRESET
from decode import DecoderConfig
from errors import ConfigError
from imaging import PreprocessConfig
from segment import SegmentConfig
from train.config import TrainConfig
from utils import normalize_log_level

logger = logging.getLogger(__name__)

ENV_LOG_LEVEL = "HTR_LOG_LEVEL"
ENV_SEED = "HTR_SEED"
NONE_VALUES = {"", "none", "null"}


class PathsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    charset: str = DEFAULT_PRESET
    dictionary: str | None = None
    lm: str | None = None
    words: str | None = None


class AppConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train: TrainConfig = Field(default_factory=TrainConfig)
    decoder: DecoderConfig = Field(default_factory=DecoderConfig)
    preprocess: PreprocessConfig = Field(default_factory=PreprocessConfig)
    segment: SegmentConfig = Field(default_factory=SegmentConfig)
    paths: PathsConfig = Field(default_factory=PathsConfig)


def _describe(err: ValidationError) -> str:
    parts = []
    for issue in err.errors():
        location = ".".join(str(part) for part in issue["loc"])
        parts.append(f"{location}: {issue['msg']}")
    return "; ".join(parts)


def env_log_level() -> str:
    return normalize_log_level(os.getenv(ENV_LOG_LEVEL))


def env_seed() -> int | None:
    raw = os.getenv(ENV_SEED)
    if raw is None or not raw.strip():
        return None
    try:
        return int(raw)
    except ValueError as err:
        msg = f"{ENV_SEED} must be an integer, got {raw!r}"
        raise ConfigError(msg) from err


def parse_settings(text: str, source: str = "<string>") -> AppConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as err:
        msg = f"Cannot parse {source}: {err}"
        raise ConfigError(msg) from err

    known = set(AppConfig.model_fields)
    unknown = [name for name in parser.sections() if name not in known]
    if unknown:
        msg = f"{source}: unknown section(s) {', '.join(unknown)}; expected {', '.join(sorted(known))}"
        raise ConfigError(msg)

    values: dict[str, dict[str, str | None]] = {}
    for section in parser.sections():
        values[section] = {
            key: None if value.strip().lower() in NONE_VALUES else value.strip()
            for key, value in parser.items(section)
        }
    try:
        config = AppConfig.model_validate(values)
    except ValidationError as err:
        msg = f"{source}: {_describe(err)}"
        raise ConfigError(msg) from err
    return config


def load_settings(path: str | Path | None = None) -> AppConfig:
    """Settings from ``path`` (or defaults), with ``HTR_SEED`` applied when no seed is configured"""
    if path is None:
        config = AppConfig()
        configured_seed = False
    else:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            msg = f"Cannot read settings file {path}: {err}"
            raise ConfigError(msg) from err
        config = parse_settings(text, str(path))
        configured_seed = "seed" in config.train.model_fields_set
        logger.debug("Loaded settings from %s", path)

    seed = env_seed()
    if seed is not None and not configured_seed:
        try:
            config.train = TrainConfig.model_validate({**config.train.model_dump(), "seed": seed})
        except ValidationError as err:
            msg = f"{ENV_SEED}: {_describe(err)}"
            raise ConfigError(msg) from err
    return config
