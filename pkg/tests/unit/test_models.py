#!/usr/bin/env python3
"""
Model zoo and checkpoint tests
"""

import numpy as np
import pytest
from pydantic import ValidationError

from errors import CheckpointError, ConfigError, ContractError, ShapeError
from models import (
    FORMAT_VERSION,
    MAGIC,
    Checkpoint,
    ModelKind,
    ModelSpec,
    ResumeState,
    TrainingState,
    Variant,
    build,
    forward_classifier,
    forward_htr,
    load_model,
    parameter_count,
    puigcerver_filters,
    restore,
    save_model,
    shape_table,
    to_checkpoint,
)


def _small(kind, **kwargs):
    return ModelSpec(kind=kind, variant=Variant.SMALL, **kwargs)


@pytest.mark.unit
class TestModelSpec:
    """ModelSpec validation"""

    def test_htr_needs_charset(self):
        """Test an HTR kind without charset_size is rejected"""
        with pytest.raises(ValidationError):
            ModelSpec(kind=ModelKind.SIMPLE_HTR)

    def test_classifier_needs_classes(self):
        """Test a classifier without num_classes is rejected"""
        with pytest.raises(ValidationError):
            ModelSpec(kind=ModelKind.SIMPLE_CNN)

    def test_default_geometry(self):
        """Test default input sizes per kind"""
        assert (ModelSpec(kind=ModelKind.BLUCHE, charset_size=5).input_h, ModelSpec(kind=ModelKind.BLUCHE, charset_size=5).input_w) == (32, 128)
        cnn = ModelSpec(kind=ModelKind.SIMPLE_CNN, num_classes=4)
        assert (cnn.input_h, cnn.input_w) == (61, 512)

    def test_output_classes_adds_blank(self):
        """Test HTR output size is charset + blank"""
        assert ModelSpec(kind=ModelKind.SIMPLE_HTR, charset_size=79).output_classes == 80

    def test_bad_input_size(self):
        """Test simple_htr refuses a height other than 32"""
        with pytest.raises(ConfigError, match="height 32"):
            build(ModelSpec(kind=ModelKind.SIMPLE_HTR, charset_size=5, input_h=48))

    def test_puigcerver_filters_grow_linearly(self):
        """Test filter counts are 16, 32, 48, 64, 80"""
        assert puigcerver_filters() == [16, 32, 48, 64, 80]


@pytest.mark.unit
class TestShapes:
    """Layer-by-layer output shapes"""

    def test_simple_htr_output(self):
        """Test simple_htr maps 32×128 to 32 steps × (C+1)"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=79))
        table = shape_table(model)
        assert table[-1].output_shape == (1, 32, 80)
        sequence = next(row for row in table if row.kind == "to_sequence")
        assert sequence.output_shape[1] == 32

    def test_simple_htr_full_variant(self):
        """Test the full variant has the same output geometry"""
        model = build(ModelSpec(kind=ModelKind.SIMPLE_HTR, charset_size=79))
        assert shape_table(model)[-1].output_shape == (1, 32, 80)

    def test_bluche_output(self):
        """Test bluche shrinks height by 16 and width by 4"""
        table = shape_table(build(_small(ModelKind.BLUCHE, charset_size=10)))
        by_name = {row.name: row.output_shape for row in table}
        assert by_name["conv2"][1:3] == (8, 64)
        assert by_name["conv4"][1:3] == (2, 32)
        assert table[-1].output_shape == (1, 32, 11)

    def test_puigcerver_output(self):
        """Test puigcerver pools three times to 16 steps"""
        table = shape_table(build(_small(ModelKind.PUIGCERVER, charset_size=10)))
        assert table[-1].output_shape == (1, 16, 11)

    @pytest.mark.parametrize("kind", [ModelKind.SIMPLE_CNN, ModelKind.MOBILENET_MINI])
    def test_classifier_output(self, kind):
        """Test classifiers emit one logit per class"""
        model = build(_small(kind, num_classes=7, input_h=32, input_w=64))
        assert shape_table(model)[-1].output_shape == (1, 7)

    def test_wrong_input_shape(self):
        """Test forward rejects an image of the wrong size"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=3))
        with pytest.raises(ShapeError):
            model.forward(np.ones((1, 32, 64, 1)))


@pytest.mark.unit
class TestInference:
    """Single-image forward passes"""

    def test_forward_htr_rows_are_distributions(self):
        """Test per-frame probabilities sum to one"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        matrix = forward_htr(model, np.ones((32, 128)))
        np.testing.assert_allclose(matrix.probs.sum(axis=1), 1.0)
        assert matrix.probs.shape == (32, 5)

    def test_forward_htr_rejects_classifier(self):
        """Test forward_htr needs an HTR model"""
        model = build(_small(ModelKind.SIMPLE_CNN, num_classes=3, input_h=32, input_w=32))
        with pytest.raises(ContractError):
            forward_htr(model, np.ones((32, 32)))

    def test_forward_classifier(self):
        """Test classifier probabilities sum to one"""
        model = build(_small(ModelKind.SIMPLE_CNN, num_classes=3, input_h=32, input_w=32))
        probs = forward_classifier(model, np.ones((32, 32)))
        assert probs.shape == (3,)
        assert probs.sum() == pytest.approx(1.0)

    def test_same_seed_same_weights(self):
        """Test weights depend only on the spec seed"""
        a = build(_small(ModelKind.SIMPLE_HTR, charset_size=4, seed=3))
        b = build(_small(ModelKind.SIMPLE_HTR, charset_size=4, seed=3))
        for name, param in a.parameters.items():
            np.testing.assert_array_equal(param.data, b.parameters[name].data)
        assert parameter_count(a) > 0


@pytest.mark.unit
class TestCheckpoint:
    """Checkpoint format"""

    def test_save_load_is_byte_identical(self, tmp_path):
        """Test re-saving a loaded checkpoint reproduces the file"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        path = tmp_path / "model.ckpt"
        save_model(model, path, TrainingState(epoch=3, best_val_loss=1.5, lr=0.01))
        loaded = Checkpoint.load(path)
        assert loaded.to_bytes() == path.read_bytes()
        assert loaded.training == TrainingState(epoch=3, best_val_loss=1.5, lr=0.01)
        assert loaded.spec == model.spec

    def test_loaded_model_predicts_the_same(self, tmp_path):
        """Test float32 storage keeps predictions within rounding"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        save_model(model, tmp_path / "m.ckpt")
        again = load_model(tmp_path / "m.ckpt")
        batch = np.random.default_rng(0).uniform(size=(1, 32, 128, 1))
        np.testing.assert_allclose(again.predict(batch), model.predict(batch), atol=1e-5)

    def test_bad_magic(self):
        """Test a payload without the magic raises"""
        with pytest.raises(CheckpointError, match="magic"):
            Checkpoint.from_bytes(b"NOPE" + bytes(16))

    def test_unsupported_version(self):
        """Test a future version is refused"""
        payload = MAGIC + (FORMAT_VERSION + 1).to_bytes(4, "little") + bytes(8)
        with pytest.raises(CheckpointError, match="version"):
            Checkpoint.from_bytes(payload)

    def test_truncated(self):
        """Test a cut-off file is reported as corrupt"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        payload = to_checkpoint(model).to_bytes()
        with pytest.raises(CheckpointError, match="Corrupt"):
            Checkpoint.from_bytes(payload[: len(payload) // 2])

    def test_missing_file(self, tmp_path):
        """Test an unreadable path raises CheckpointError"""
        with pytest.raises(CheckpointError):
            Checkpoint.load(tmp_path / "absent.ckpt")

    def test_resume_tensors_restore_exactly(self):
        """Test float64 master copies win over float32 parameters"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        name, param = next(iter(model.parameters.items()))
        param.data = param.data + 1e-9
        tensors = {f"param:{key}": value.data.copy() for key, value in model.parameters.items()}
        checkpoint = Checkpoint.from_bytes(
            to_checkpoint(model, resume=ResumeState(metadata={"epoch": 1}, tensors=tensors)).to_bytes(),
        )
        np.testing.assert_array_equal(restore(checkpoint).parameters[name].data, param.data)
        assert checkpoint.resume.metadata == {"epoch": 1}

    def test_shape_mismatch(self):
        """Test a checkpoint whose tensors do not fit the spec raises"""
        model = build(_small(ModelKind.SIMPLE_HTR, charset_size=4))
        checkpoint = to_checkpoint(model)
        name = next(iter(checkpoint.parameters))
        checkpoint.parameters[name] = np.zeros((1, 1))
        with pytest.raises(CheckpointError, match="shape"):
            restore(checkpoint)
