"""
Data

Charsets, manifests and splits, and the synthetic word-image generator.
"""

from .charset import DEFAULT_PRESET, KAZAKH_LETTERS, PRESETS, RUSSIAN_LETTERS, Charset, nfc, preset, resolve
from .manifest import (
    MANIFEST_NAME,
    ClassIndex,
    DatasetManifest,
    Entry,
    Split,
    SplitFractions,
    load_dataset,
    read_manifest,
    select_classes,
    split,
    split_train_val,
    write_dataset,
    write_manifest,
)
from .stroke_font import render, supported
from .synth import generate, render_sample
from .words import DEFAULT_WORDS, read_words, write_words

__all__ = [
    "DEFAULT_PRESET",
    "DEFAULT_WORDS",
    "KAZAKH_LETTERS",
    "MANIFEST_NAME",
    "PRESETS",
    "RUSSIAN_LETTERS",
    "Charset",
    "ClassIndex",
    "DatasetManifest",
    "Entry",
    "Split",
    "SplitFractions",
    "generate",
    "load_dataset",
    "nfc",
    "preset",
    "read_manifest",
    "read_words",
    "render",
    "render_sample",
    "resolve",
    "select_classes",
    "split",
    "split_train_val",
    "supported",
    "write_dataset",
    "write_manifest",
    "write_words",
]
