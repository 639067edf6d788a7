#!/usr/bin/env python3
"""
Pytest configuration file
Set up test environment and shared fixtures
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# Put src/ on the path so tests import modules the way the package does
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from data import Charset, Entry, generate, split, write_dataset
from imaging import GrayImage, blank


@pytest.fixture
def rng():
    """Seeded random generator fixture"""
    return np.random.default_rng(1234)


@pytest.fixture
def abc_charset():
    """Three-letter charset fixture"""
    return Charset(("a", "b", "c"), name="abc")


@pytest.fixture
def word_charset():
    """Small Cyrillic charset with a space"""
    return Charset(tuple("абвгклмнорст "), name="tiny")


@pytest.fixture
def text_image():
    """Synthetic 'text': three dark horizontal strokes on white"""
    pixels = np.ones((40, 120))
    pixels[12:15, 10:110] = 0.0
    pixels[20:23, 10:110] = 0.0
    pixels[28:31, 10:110] = 0.0
    return GrayImage(pixels)


@pytest.fixture
def blank_image():
    """All-white page fixture"""
    return blank(64, 32)


@pytest.fixture
def entries():
    """40 words × 25 samples: word counts that allow exact split fractions"""
    return [Entry(f"images/{w:03d}_{s:05d}.pgm", f"w{w:02d}") for w in range(40) for s in range(25)]


@pytest.fixture
def tiny_dataset(tmp_path):
    """Rendered dataset of 6 words × 4 samples with split files"""
    from data import preset

    words = ["актау", "алматы", "астана", "семей", "тараз", "минск"]
    manifest = generate(words, 4, preset("kazakh"), seed=7, out_dir=tmp_path / "ds")
    write_dataset(tmp_path / "ds", split(manifest.entries, seed=7))
    return tmp_path / "ds"


# Test markers
def pytest_configure(config):
    """Configure test markers"""
    config.addinivalue_line("markers", "unit: Unit test marker")
    config.addinivalue_line("markers", "integration: Integration test marker")
    config.addinivalue_line("markers", "e2e: End-to-end test marker")
    config.addinivalue_line("markers", "slow: Slow test marker")
    config.addinivalue_line("markers", "performance: Performance test marker")
