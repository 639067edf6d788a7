"""
Inference and evaluation over sample sets

Used by the training loop for validation and by the ``recognize`` and
``eval`` commands.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from ctc import ProbMatrix, ctc_loss_from_logits, label_feasible
from data.charset import Charset
from decode import CharLM, DecoderConfig, DecoderName, PrefixTree, best_path, decode, labeling_probability, path_score
from errors import ContractError
from imaging import GrayImage
from metrics import EvalReport, corpus_eval
from models import Model, shape_table
from numerics import log_softmax_array, softmax_array
from train.samples import Samples
from utils import batches

logger = logging.getLogger(__name__)

EVAL_BATCH = 32


@dataclass(frozen=True)
class Recognition:
    text: str
    label: tuple[int, ...]
    score: float
    decoder: DecoderName


def output_steps(model: Model) -> int:
    """Number of CTC frames the model emits per image"""
    return shape_table(model)[-1].output_shape[1]


def logits_for(model: Model, images: np.ndarray, batch_size: int = EVAL_BATCH) -> np.ndarray:
    if len(images) == 0:
        return np.empty((0, 0, 0))
    chunks = [model.forward(images[chunk]).data for chunk in batches(list(range(len(images))), batch_size)]
    return np.concatenate(chunks, axis=0)


def matrices_for(model: Model, images: np.ndarray, batch_size: int = EVAL_BATCH) -> list[ProbMatrix]:
    if not model.spec.kind.is_htr:
        msg = f"CTC matrices need an HTR model, got {model.spec.kind.value}"
        raise ContractError(msg)
    return [ProbMatrix(probs) for probs in softmax_array(logits_for(model, images, batch_size))]


def evaluate_htr(model: Model, samples: Samples, charset: Charset, batch_size: int = EVAL_BATCH) -> tuple[float, float]:
    """Mean CTC loss over feasible samples and best-path CER over all of them

    The loss is ``inf`` when no sample's label fits the model's frame count.
    """
    if len(samples) == 0:
        msg = "evaluate_htr needs at least one sample"
        raise ContractError(msg)
    logits = logits_for(model, samples.images, batch_size)
    losses = []
    pairs = []
    for row, truth in zip(logits, samples.transcripts, strict=True):
        label = charset.encode(truth)
        if label_feasible(label, row.shape[0]):
            losses.append(ctc_loss_from_logits(row, label)[0])
        prediction = charset.decode(best_path(ProbMatrix(softmax_array(row))))
        pairs.append((prediction, truth))
    loss = float(np.mean(losses)) if losses else math.inf
    return loss, corpus_eval(pairs).cer


def evaluate_classifier(
    model: Model, images: np.ndarray, labels: np.ndarray, batch_size: int = EVAL_BATCH,
) -> tuple[float, float]:
    """Mean cross-entropy and classification error rate in percent"""
    if len(labels) == 0:
        msg = "evaluate_classifier needs at least one sample"
        raise ContractError(msg)
    log_probs = log_softmax_array(logits_for(model, images, batch_size))
    picked = log_probs[np.arange(len(labels)), labels]
    errors = int(np.sum(np.argmax(log_probs, axis=1) != labels))
    return float(-np.mean(picked)), 100.0 * errors / len(labels)


def recognize(
    model: Model,
    img: GrayImage | np.ndarray,
    charset: Charset,
    config: DecoderConfig | None = None,
    dictionary: PrefixTree | None = None,
    lm: CharLM | None = None,
) -> Recognition:
    """Transcribe one normalised image

    Best path reports the product of per-frame maxima; the other decoders
    report the total probability of the returned labeling.
    """
    config = config or DecoderConfig()
    pixels = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    (m,) = matrices_for(model, pixels[None])
    label = decode(m, config, dictionary, lm)
    if config.name == DecoderName.BEST_PATH:
        score = path_score(m)
    else:
        score = labeling_probability(m, label)
    return Recognition(charset.decode(label), label, score, config.name)


def transcribe(
    model: Model,
    samples: Samples,
    charset: Charset,
    config: DecoderConfig | None = None,
    dictionary: PrefixTree | None = None,
    lm: CharLM | None = None,
) -> list[str]:
    config = config or DecoderConfig()
    return [charset.decode(decode(m, config, dictionary, lm)) for m in matrices_for(model, samples.images)]


def evaluate_decoder(
    model: Model,
    samples: Samples,
    charset: Charset,
    config: DecoderConfig | None = None,
    dictionary: PrefixTree | None = None,
    lm: CharLM | None = None,
    macro: bool = False,
) -> EvalReport:
    """Decode every sample and score the transcripts against the ground truth"""
    predictions = transcribe(model, samples, charset, config, dictionary, lm)
    report = corpus_eval(list(zip(predictions, samples.transcripts, strict=True)), macro=macro, symbols=charset.symbols)
    logger.info(
        "%s on %d samples: CER %.2f WER %.2f WAR %.2f",
        (config or DecoderConfig()).name.value, len(samples), report.cer, report.wer, report.war,
    )
    return report
