"""
Model zoo

``build(spec)`` assembles one of five architectures from the layers package;
checkpoints carry the spec so a saved model can be rebuilt and restored.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np

from errors import CheckpointError
from layers import Layer
from numerics import Graph

from .base import Activation, Model, ShapeRow, ToSequence, forward_classifier, forward_htr, parameter_count, shape_table
from .checkpoint import FORMAT_VERSION, MAGIC, Checkpoint, ResumeState, TrainingState
from .classifiers import build_mobilenet_mini, build_simple_cnn
from .htr import build_bluche, build_puigcerver, build_simple_htr, puigcerver_filters
from .spec import CLASSIFIER_KINDS, HTR_KINDS, ModelKind, ModelSpec, Variant, validate_input_size

logger = logging.getLogger(__name__)

BUILDERS: dict[ModelKind, Callable[[ModelSpec, Graph, np.random.Generator], list[Layer]]] = {
    ModelKind.SIMPLE_HTR: build_simple_htr,
    ModelKind.BLUCHE: build_bluche,
    ModelKind.PUIGCERVER: build_puigcerver,
    ModelKind.SIMPLE_CNN: build_simple_cnn,
    ModelKind.MOBILENET_MINI: build_mobilenet_mini,
}


def build(spec: ModelSpec) -> Model:
    """Allocate and initialise a model; weights depend only on ``spec.seed``"""
    validate_input_size(spec)
    graph = Graph()
    rng = np.random.default_rng(spec.seed)
    model = Model(spec, graph, BUILDERS[spec.kind](spec, graph, rng))
    logger.debug(
        "Built %s/%s with %d parameters", spec.kind.value, spec.variant.value, parameter_count(model),
    )
    return model


def to_checkpoint(
    model: Model, training: TrainingState | None = None, resume: ResumeState | None = None,
) -> Checkpoint:
    return Checkpoint(
        spec=model.spec,
        parameters={name: param.data.copy() for name, param in model.parameters.items()},
        buffers={name: value.copy() for name, value in model.buffers().items()},
        training=training,
        resume=resume,
    )


def restore(checkpoint: Checkpoint, exact: bool = True) -> Model:
    """Rebuild the model a checkpoint describes and load its values

    With ``exact`` and a resume section present, the float64 master copies
    are used instead of the float32 parameters.
    """
    model = build(checkpoint.spec)
    values = checkpoint.parameters
    if exact and checkpoint.resume is not None:
        master = {
            name[len("param:") :]: value
            for name, value in checkpoint.resume.tensors.items()
            if name.startswith("param:")
        }
        if master:
            values = master
    missing = set(model.parameters) - set(values)
    if missing:
        msg = f"Checkpoint lacks parameters: {', '.join(sorted(missing))}"
        raise CheckpointError(msg)
    for name, param in model.parameters.items():
        if values[name].shape != param.shape:
            msg = f"Parameter {name} has shape {values[name].shape}, model expects {param.shape}"
            raise CheckpointError(msg)
        param.data = np.array(values[name], dtype=np.float64)
    model.load_buffers(checkpoint.buffers)
    if exact and checkpoint.resume is not None:
        model.load_buffers({
            name[len("buffer:") :]: value
            for name, value in checkpoint.resume.tensors.items()
            if name.startswith("buffer:")
        })
    return model


def save_model(model: Model, path: str | Path, training: TrainingState | None = None) -> None:
    to_checkpoint(model, training).save(path)


def load_model(path: str | Path, exact: bool = True) -> Model:
    return restore(Checkpoint.load(path), exact=exact)


__all__ = [
    "BUILDERS",
    "CLASSIFIER_KINDS",
    "FORMAT_VERSION",
    "HTR_KINDS",
    "MAGIC",
    "Activation",
    "Checkpoint",
    "Model",
    "ModelKind",
    "ModelSpec",
    "ResumeState",
    "ShapeRow",
    "ToSequence",
    "TrainingState",
    "Variant",
    "build",
    "forward_classifier",
    "forward_htr",
    "load_model",
    "parameter_count",
    "puigcerver_filters",
    "restore",
    "save_model",
    "shape_table",
    "to_checkpoint",
]
