"""
Training loops

One epoch: seeded shuffle, minibatch forward, loss, backward, clipping and
an optimiser step; then validation, the plateau schedule and checkpointing.
The best-validation checkpoint goes to ``out``; the full resumable state of
the latest epoch goes to ``out.last``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from ctc import Label, ctc_batch_loss, label_feasible
from data.charset import Charset
from data.manifest import ClassIndex, DatasetManifest, Split, split_train_val
from errors import ConfigError, ContractError
from imaging import PreprocessConfig
from models import Checkpoint, Model, ResumeState, TrainingState, to_checkpoint
from numerics import Tensor, backward, log_softmax_rows, scale, sum_all
from train.config import TrainConfig
from train.evaluate import evaluate_classifier, evaluate_htr, output_steps
from train.optimizers import Optimizer, clip_by_global_norm
from train.samples import Samples, load_split
from train.schedule import PlateauSchedule
from utils import batches, derive_rng, write_csv

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_loss", "val_loss", "val_cer", "lr"]

BatchLoss = Callable[[Model, list[int], np.random.Generator], Tensor]
Evaluate = Callable[[Model], tuple[float, float]]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    # Classifier runs store the classification error rate here
    val_cer: float
    lr: float


@dataclass
class TrainResult:
    history: list[EpochRecord]
    checkpoint: Checkpoint
    best_epoch: int
    stopped_early: bool = False
    skipped: list[str] = field(default_factory=list)

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(record) for record in self.history], columns=HISTORY_COLUMNS)

    def write_history(self, path: str | Path) -> bool:
        return write_csv(self.history_frame(), path)


def last_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(f"{path.name}.last")


def _resume_state(
    model: Model,
    optimizer: Optimizer,
    schedule: PlateauSchedule,
    history: list[EpochRecord],
    best: Checkpoint | None,
    best_epoch: int,
    cfg: TrainConfig,
) -> ResumeState:
    tensors = {f"param:{name}": param.data for name, param in model.parameters.items()}
    tensors.update({f"buffer:{name}": value for name, value in model.buffers().items()})
    tensors.update(optimizer.slot_tensors())
    if best is not None:
        tensors.update({f"best:param:{name}": value for name, value in best.parameters.items()})
        tensors.update({f"best:buffer:{name}": value for name, value in best.buffers.items()})
    metadata = {
        "epoch": history[-1].epoch if history else 0,
        "optimizer_step": optimizer.state.step,
        "schedule": schedule.to_dict(),
        "history": [asdict(record) for record in history],
        "best_epoch": best_epoch,
        "best_lr": best.training.lr if best is not None and best.training is not None else None,
        "config": cfg.model_dump(mode="json"),
    }
    return ResumeState(metadata=metadata, tensors=tensors)


def _best_from_resume(model: Model, state: ResumeState) -> Checkpoint | None:
    meta = state.metadata
    params = {k[len("best:param:") :]: v for k, v in state.tensors.items() if k.startswith("best:param:")}
    if not params:
        return None
    buffers = {k[len("best:buffer:") :]: v for k, v in state.tensors.items() if k.startswith("best:buffer:")}
    training = TrainingState(meta["best_epoch"], meta["schedule"]["best"], meta["best_lr"])
    return Checkpoint(spec=model.spec, parameters=params, buffers=buffers, training=training)


def fit(
    model: Model,
    n_train: int,
    batch_loss: BatchLoss,
    evaluate: Evaluate,
    cfg: TrainConfig,
    out: str | Path | None = None,
    history_path: str | Path | None = None,
    resume: Checkpoint | None = None,
) -> TrainResult:
    """Generic epoch loop shared by the CTC and classifier trainers

    ``resume`` must be the ``.last`` checkpoint of an earlier run, restored
    into ``model`` with its float64 master parameters.
    """
    optimizer = Optimizer(cfg.optimizer, cfg.lr)
    schedule = PlateauSchedule(
        lr=cfg.lr,
        factor=cfg.plateau_factor,
        patience=cfg.plateau_patience,
        stop_patience=cfg.early_stop_patience,
        min_delta=cfg.min_delta,
    )
    history: list[EpochRecord] = []
    best: Checkpoint | None = None
    best_epoch = 0
    start = 1
    if resume is not None:
        if resume.resume is None:
            msg = "Checkpoint has no resume section; pass the '.last' file of a run"
            raise ConfigError(msg)
        meta = resume.resume.metadata
        if meta.get("config") != cfg.model_dump(mode="json"):
            logger.warning("Resuming with a training config that differs from the checkpointed one")
        schedule = PlateauSchedule.from_dict(meta["schedule"])
        optimizer.load(meta["optimizer_step"], resume.resume.tensors)
        history = [EpochRecord(**record) for record in meta["history"]]
        best = _best_from_resume(model, resume.resume)
        best_epoch = meta["best_epoch"]
        start = meta["epoch"] + 1
        logger.info("Resuming at epoch %d (lr %.6g, best val loss %.6g)", start, schedule.lr, schedule.best)

    stopped = schedule.should_stop
    for epoch in range(start, cfg.max_epochs + 1):
        if stopped:
            break
        lr = schedule.lr
        optimizer.lr = lr
        order = derive_rng(cfg.seed, epoch).permutation(n_train).tolist()
        total = 0.0
        counted = 0
        for number, chunk in enumerate(batches(order, cfg.batch_size)):
            model.graph.zero_grad()
            loss = batch_loss(model, chunk, derive_rng(cfg.seed, epoch, number, 1))
            value = loss.item()
            if not math.isfinite(value):
                logger.warning("Skipping batch %d of epoch %d: loss is %s", number, epoch, value)
                continue
            grads, _ = clip_by_global_norm(backward(model.graph, loss), cfg.clip_norm)
            optimizer.step(model.parameters, grads)
            total += value * len(chunk)
            counted += len(chunk)

        val_loss, val_cer = evaluate(model)
        record = EpochRecord(epoch, total / counted if counted else math.inf, val_loss, val_cer, lr)
        history.append(record)
        if schedule.update(val_loss):
            best_epoch = epoch
            best = to_checkpoint(model, TrainingState(epoch, val_loss, lr))
            if out is not None:
                best.save(out)
        logger.info(
            "epoch %d: train_loss %.4f val_loss %.4f val_cer %.2f lr %.6g",
            epoch, record.train_loss, val_loss, val_cer, lr,
        )
        if out is not None:
            state = _resume_state(model, optimizer, schedule, history, best, best_epoch, cfg)
            to_checkpoint(model, TrainingState(epoch, schedule.best, schedule.lr), state).save(last_path(out))
        if history_path is not None:
            write_csv(pd.DataFrame([asdict(r) for r in history], columns=HISTORY_COLUMNS), history_path)
        if schedule.should_stop:
            logger.info("No validation improvement for %d epochs; stopping at epoch %d", schedule.stale, epoch)
            stopped = True

    if best is None:
        logger.warning("Validation loss never improved; returning the final weights")
        last_epoch = history[-1].epoch if history else 0
        best = to_checkpoint(model, TrainingState(last_epoch, schedule.best, schedule.lr))
        best_epoch = last_epoch
        if out is not None:
            best.save(out)
    return TrainResult(history, best, best_epoch, stopped)


def _htr_labels(samples: Samples, charset: Charset, t_steps: int) -> tuple[list[int], list[Label], list[str]]:
    keep: list[int] = []
    labels: list[Label] = []
    skipped: list[str] = []
    for i, text in enumerate(samples.transcripts):
        label = charset.encode(text)
        if label_feasible(label, t_steps):
            keep.append(i)
            labels.append(label)
        else:
            logger.warning("Skipping %r: its label cannot be aligned to %d frames", text, t_steps)
            skipped.append(text)
    return keep, labels, skipped


def fit_htr(
    model: Model,
    train_samples: Samples,
    val_samples: Samples,
    charset: Charset,
    cfg: TrainConfig,
    out: str | Path | None = None,
    history_path: str | Path | None = None,
    resume: Checkpoint | None = None,
) -> TrainResult:
    """CTC training on samples already loaded and normalised"""
    if not model.spec.kind.is_htr:
        msg = f"train_htr needs an HTR model, got {model.spec.kind.value}"
        raise ContractError(msg)
    if model.spec.charset_size != len(charset):
        msg = f"Model was built for {model.spec.charset_size} symbols but charset {charset.name} has {len(charset)}"
        raise ConfigError(msg)
    keep, labels, skipped = _htr_labels(train_samples, charset, output_steps(model))
    if not keep:
        msg = "No training sample has a label that fits the model's frame count"
        raise ConfigError(msg)
    images = train_samples.images[keep]

    def batch_loss(m: Model, chunk: list[int], rng: np.random.Generator) -> Tensor:
        logits = m.forward(images[chunk], training=True, rng=rng)
        return ctc_batch_loss(logits, [labels[i] for i in chunk])

    def evaluate(m: Model) -> tuple[float, float]:
        return evaluate_htr(m, val_samples, charset, cfg.batch_size)

    result = fit(model, len(keep), batch_loss, evaluate, cfg, out, history_path, resume)
    result.skipped = skipped
    return result


def train_htr(
    model: Model,
    manifest: DatasetManifest,
    cfg: TrainConfig,
    charset: Charset,
    preprocess_config: PreprocessConfig | None = None,
    out: str | Path | None = None,
    history_path: str | Path | None = None,
    resume: Checkpoint | None = None,
) -> TrainResult:
    """Train a CTC model on the train split, validating on the val split"""
    spec = model.spec
    train_samples = load_split(manifest, Split.TRAIN, spec.input_w, spec.input_h, preprocess_config)
    val_samples = load_split(manifest, Split.VAL, spec.input_w, spec.input_h, preprocess_config)
    logger.info("Training %s on %d samples, validating on %d", spec.kind.value, len(train_samples), len(val_samples))
    return fit_htr(model, train_samples, val_samples, charset, cfg, out, history_path, resume)


def fit_classifier(
    model: Model,
    train_samples: Samples,
    val_samples: Samples,
    classes: ClassIndex,
    cfg: TrainConfig,
    out: str | Path | None = None,
    history_path: str | Path | None = None,
    resume: Checkpoint | None = None,
) -> TrainResult:
    """Cross-entropy training of a word classifier"""
    if model.spec.kind.is_htr:
        msg = f"train_classifier needs a classifier, got {model.spec.kind.value}"
        raise ContractError(msg)
    if model.spec.num_classes != len(classes):
        msg = f"Model has {model.spec.num_classes} outputs but the data has {len(classes)} classes"
        raise ConfigError(msg)
    targets = np.array([classes.label(text) for text in train_samples.transcripts], dtype=np.int64)
    val_targets = np.array([classes.label(text) for text in val_samples.transcripts], dtype=np.int64)
    onehot = np.eye(len(classes))[targets]

    def batch_loss(m: Model, chunk: list[int], rng: np.random.Generator) -> Tensor:
        logits = m.forward(train_samples.images[chunk], training=True, rng=rng)
        picked = sum_all(log_softmax_rows(logits) * onehot[chunk])
        return scale(picked, -1.0 / len(chunk))

    def evaluate(m: Model) -> tuple[float, float]:
        return evaluate_classifier(m, val_samples.images, val_targets, cfg.batch_size)

    return fit(model, len(train_samples), batch_loss, evaluate, cfg, out, history_path, resume)


def train_classifier(
    model: Model,
    manifest: DatasetManifest,
    cfg: TrainConfig,
    classes: ClassIndex | None = None,
    preprocess_config: PreprocessConfig | None = None,
    out: str | Path | None = None,
    history_path: str | Path | None = None,
    resume: Checkpoint | None = None,
) -> TrainResult:
    """Train a classifier; without a val split a ``val_fraction`` holdout is drawn"""
    classes = classes or ClassIndex.from_entries(manifest.entries)
    if Split.VAL not in manifest.assignment or Split.TRAIN not in manifest.assignment:
        holdout = split_train_val(manifest.entries, cfg.seed, cfg.val_fraction)
        manifest = DatasetManifest(manifest.entries, holdout.assignment, manifest.root)
    spec = model.spec
    train_samples = load_split(manifest, Split.TRAIN, spec.input_w, spec.input_h, preprocess_config)
    val_samples = load_split(manifest, Split.VAL, spec.input_w, spec.input_h, preprocess_config)
    return fit_classifier(model, train_samples, val_samples, classes, cfg, out, history_path, resume)
