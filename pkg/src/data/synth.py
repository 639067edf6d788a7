"""
Synthetic word-image generator

Renders every word with the embedded stroke font and perturbs each sample
with its own seeded augmentation to stand in for different handwriting.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

from data.charset import Charset, nfc
from data.manifest import MANIFEST_NAME, DatasetManifest, Entry, write_manifest
from data.stroke_font import render
from errors import ContractError
from imaging import GrayImage, augment, save_pgm
from utils import derive_rng, derive_seed

logger = logging.getLogger(__name__)

IMAGE_DIR = "images"


def sample_name(word_index: int, sample_index: int) -> str:
    return f"{IMAGE_DIR}/{word_index:03d}_{sample_index:05d}.pgm"


def render_sample(word: str, seed: int, word_index: int, sample_index: int, *, augmented: bool = True) -> GrayImage:
    """One rendering of ``word``; identical arguments give identical pixels"""
    if not augmented:
        return render(word)
    rng = derive_rng(seed, word_index, sample_index)
    img = render(word, rng=rng)
    return augment(img, derive_seed(seed, word_index, sample_index, 1))


def generate(
    words: Sequence[str],
    per_word: int,
    charset: Charset,
    seed: int,
    out_dir: str | Path,
    *,
    augmented: bool = True,
    multiplier: int = 1,
) -> DatasetManifest:
    """
    Render ``per_word × multiplier`` samples of every word into ``out_dir``

    Writes ``images/*.pgm`` and ``manifest.tsv``. With a single sample per
    word and no multiplier the canonical, unperturbed rendering is written.

    Raises:
        EncodingError: A word holds a character outside ``charset``
        ContractError: Non-positive sample counts
    """
    if per_word < 1 or multiplier < 1:
        msg = f"per_word and multiplier must be >= 1, got {per_word} and {multiplier}"
        raise ContractError(msg)
    words = [nfc(word) for word in words]
    for word in words:
        charset.encode(word)

    out_dir = Path(out_dir)
    (out_dir / IMAGE_DIR).mkdir(parents=True, exist_ok=True)
    samples = per_word * multiplier
    perturb = augmented and samples > 1
    entries: list[Entry] = []
    for word_index, word in enumerate(words):
        for sample_index in range(samples):
            name = sample_name(word_index, sample_index)
            img = render_sample(word, seed, word_index, sample_index, augmented=perturb)
            save_pgm(img, out_dir / name)
            entries.append(Entry(name, word))
        logger.debug("Rendered %d samples of %r", samples, word)

    write_manifest(out_dir / MANIFEST_NAME, entries)
    logger.info("Generated %d images for %d words in %s", len(entries), len(words), out_dir)
    return DatasetManifest(entries, root=out_dir)
