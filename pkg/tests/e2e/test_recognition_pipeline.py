#!/usr/bin/env python3
"""
End-to-end recognition tests: render, train, segment, decode, score
"""

import numpy as np
import pytest

from data import generate, preset, render
from decode import DecoderConfig, DecoderName, PrefixTree
from imaging import GrayImage, normalize_to_model
from metrics import corpus_eval
from models import ModelKind, ModelSpec, Variant, build
from segment import SegmentConfig, segment_page
from train import TrainConfig, fit_htr, load_entries, recognize

WORDS = ["алматы", "астана"]
KAZAKH = preset("kazakh")


@pytest.fixture(scope="module")
def overfit(tmp_path_factory):
    """A small model trained for a few epochs on two words"""
    manifest = generate(WORDS, 6, KAZAKH, seed=11, out_dir=tmp_path_factory.mktemp("overfit"))
    spec = ModelSpec(kind=ModelKind.SIMPLE_HTR, charset_size=len(KAZAKH), variant=Variant.SMALL, seed=2)
    model = build(spec)
    samples = load_entries(manifest, manifest.entries, spec.input_w, spec.input_h)
    cfg = TrainConfig(max_epochs=10, batch_size=4, lr=0.01, seed=4)
    result = fit_htr(model, samples, samples, KAZAKH, cfg)
    return model, result, samples


def page_of(words, spacing=60):
    """Render words side by side on one white line"""
    images = [render(word) for word in words]
    height = max(img.height for img in images) + 20
    width = sum(img.width for img in images) + spacing * (len(images) + 1)
    pixels = np.ones((height, width))
    x = spacing
    for img in images:
        pixels[10 : 10 + img.height, x : x + img.width] = img.pixels
        x += img.width + spacing
    return GrayImage(pixels)


@pytest.mark.e2e
@pytest.mark.slow
class TestRecognitionPipeline:
    """Whole pipeline on rendered words"""

    def test_training_reduces_loss(self, overfit):
        """Test the loss falls while fitting two words"""
        _, result, _ = overfit
        history = result.history
        assert history[-1].train_loss < history[0].train_loss
        assert min(record.val_loss for record in history) < history[0].val_loss

    def test_page_to_dictionary_words(self, overfit):
        """Test segmented word crops decode to dictionary words with word beam search"""
        model, _, _ = overfit
        page = page_of(WORDS)
        lines = segment_page(page, SegmentConfig(min_gap_cols=30))
        assert len(lines) == 1
        assert len(lines[0].words) == len(WORDS)

        tree = PrefixTree.from_words(WORDS, KAZAKH)
        config = DecoderConfig(name=DecoderName.WORD_BEAM_SEARCH, beam_width=10)
        for box in lines[0].words:
            crop = page.crop(*box.as_tuple())
            result = recognize(model, normalize_to_model(crop, model.spec.input_w, model.spec.input_h), KAZAKH, config, tree)
            assert all(word in WORDS for word in result.text.split())
            assert 0.0 <= result.score <= 1.0

    def test_report_over_training_words(self, overfit):
        """Test best-path transcripts of the training set score into a valid report"""
        model, _, samples = overfit
        predictions = [
            recognize(model, image, KAZAKH).text for image in samples.images
        ]
        report = corpus_eval(list(zip(predictions, samples.transcripts, strict=True)))
        assert report.sample_count == len(samples)
        assert 0.0 <= report.war <= 100.0
