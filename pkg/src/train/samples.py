"""
In-memory sample sets built from a dataset manifest
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from data.manifest import DatasetManifest, Entry, Split
from imaging import PreprocessConfig, load_image, preprocess

logger = logging.getLogger(__name__)


@dataclass
class Samples:
    images: np.ndarray
    transcripts: list[str]

    def __len__(self) -> int:
        return len(self.transcripts)

    def take(self, indices: list[int]) -> Samples:
        return Samples(self.images[indices], [self.transcripts[i] for i in indices])


def load_entries(
    manifest: DatasetManifest,
    entries: list[Entry],
    width: int,
    height: int,
    preprocess_config: PreprocessConfig | None = None,
) -> Samples:
    """Load and normalise images to ``height × width`` model inputs"""
    images = np.empty((len(entries), height, width), dtype=np.float64)
    for i, entry in enumerate(entries):
        img = load_image(manifest.image_path(entry))
        images[i] = preprocess(img, preprocess_config, width, height).pixels
    return Samples(images, [entry.transcript for entry in entries])


def load_split(
    manifest: DatasetManifest,
    split: Split,
    width: int,
    height: int,
    preprocess_config: PreprocessConfig | None = None,
) -> Samples:
    samples = load_entries(manifest, manifest.subset(split), width, height, preprocess_config)
    logger.debug("Loaded %d %s samples", len(samples), split.value)
    return samples
