#!/usr/bin/env python3
"""
Cyrillic HTR CLI - Command Line Interface

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

from __future__ import annotations

import functools
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
import pandas as pd
from dotenv import load_dotenv

from data import DEFAULT_WORDS, ClassIndex, generate, load_dataset, read_words, resolve, select_classes, split, write_dataset
from data.charset import Charset
from data.manifest import DatasetManifest, Split
from decode import CharLM, DecoderConfig, DecoderName, PrefixTree
from errors import ConfigError, ContractError, EncodingError, HTRError
from imaging import PreprocessConfig, load_image, preprocess
from models import Checkpoint, Model, ModelKind, ModelSpec, Variant, build, load_model, restore
from segment import Box, segment_page
from settings import AppConfig, env_log_level, load_settings
from train import evaluate_decoder, load_split, recognize, train_classifier, train_htr
from utils import LOG_LEVELS, format_counts, format_percent, format_probability, write_csv

logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

USAGE_ERRORS = (ConfigError, ContractError, EncodingError)
MODEL_KINDS = [kind.value for kind in ModelKind]
DECODERS = [name.value for name in DecoderName]


def _exit_codes(command: Callable[..., None]) -> Callable[..., None]:
    """Map pipeline errors onto exit codes 2 (usage/config) and 1 (runtime)"""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            command(*args, **kwargs)
        except click.ClickException:
            raise
        except USAGE_ERRORS as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(2)
        except HTRError as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(1)
        except Exception as e:  # noqa: BLE001 - CLI surfaces any error message to user
            logger.debug("Unhandled error", exc_info=True)
            click.echo(f"❌ {e}", err=True)
            sys.exit(1)

    return wrapper


def _settings(ctx: click.Context) -> AppConfig:
    return ctx.obj["settings"]


def _use_config(ctx: click.Context, config_path: str | None) -> AppConfig:
    """Replace the group settings with those of a command-level --config"""
    if config_path is not None:
        ctx.obj["settings"] = load_settings(config_path)
    return _settings(ctx)


def _charset(ctx: click.Context, name: str | None) -> Charset:
    return resolve(name or _settings(ctx).paths.charset)


def _preprocess(ctx: click.Context, deslant: bool | None) -> PreprocessConfig:
    config = _settings(ctx).preprocess
    if deslant is None:
        return config
    return config.model_copy(update={"deslant": deslant})


def _decoder_inputs(
    ctx: click.Context,
    decoder: str | None,
    dictionary: str | None,
    lm: str | None,
    beam_width: int | None,
    charset: Charset,
) -> tuple[DecoderConfig, PrefixTree | None, CharLM | None]:
    settings = _settings(ctx)
    config = settings.decoder
    updates: dict[str, Any] = {}
    if decoder is not None:
        updates["name"] = DecoderName(decoder)
    if beam_width is not None:
        updates["beam_width"] = beam_width
    config = DecoderConfig.model_validate({**config.model_dump(), **updates})

    dictionary = dictionary or settings.paths.dictionary
    lm = lm or settings.paths.lm
    if config.name.needs_dictionary and not dictionary:
        msg = f"--decoder {config.name.value} requires --dict"
        raise click.UsageError(msg)
    if config.name == DecoderName.WORD_BEAM_SEARCH_LM and not lm:
        msg = f"--decoder {config.name.value} requires --lm"
        raise click.UsageError(msg)
    tree = PrefixTree.from_file(dictionary, charset) if dictionary and config.name.needs_dictionary else None
    char_lm = CharLM.from_file(lm, charset) if lm and config.name == DecoderName.WORD_BEAM_SEARCH_LM else None
    return config, tree, char_lm


def _load_htr(path: str, charset: Charset) -> Model:
    model = load_model(path)
    if not model.spec.kind.is_htr:
        msg = f"{path} holds a {model.spec.kind.value} classifier; this command needs an HTR model"
        raise ContractError(msg)
    if model.spec.charset_size != len(charset):
        msg = f"{path} was trained for {model.spec.charset_size} symbols but charset {charset.name} has {len(charset)}"
        raise ConfigError(msg)
    return model


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(LOG_LEVELS, case_sensitive=False),
    default=None,
    help="Logging level (default: HTR_LOG_LEVEL or INFO)",
)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="Settings file")
@click.pass_context
def cli(ctx: click.Context, log_level: str | None, config_path: str | None) -> None:
    """Handwritten Cyrillic text recognition"""
    logging.basicConfig(
        level=(log_level or env_log_level()).upper(),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = load_settings(config_path)
    except ConfigError as e:
        click.echo(f"❌ {e}", err=True)
        sys.exit(2)
    ctx.ensure_object(dict)
    ctx.obj["settings"] = settings


@cli.command()
@click.option("--words", "words_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Word list, one per line (default: built-in 42 place names)")
@click.option("--per-word", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, default=None, help="Generation seed (default: settings seed)")
@click.option("--charset", "charset_name", default=None, help="Charset preset or file")
@click.option("--augment-multiplier", type=click.IntRange(min=1), default=1, show_default=True,
              help="Extra augmented samples per requested sample")
@click.option("--augment/--no-augment", default=True, show_default=True)
@click.option("--split/--no-split", "do_split", default=True, show_default=True,
              help="Also write train/val/test1/test2 split files")
@click.pass_context
@_exit_codes
def gen(
    ctx: click.Context,
    words_path: str | None,
    per_word: int,
    out_dir: str,
    seed: int | None,
    charset_name: str | None,
    augment_multiplier: int,
    augment: bool,
    do_split: bool,
) -> None:
    """Render a synthetic word-image dataset"""
    settings = _settings(ctx)
    seed = settings.train.seed if seed is None else seed
    words = read_words(words_path) if words_path else list(DEFAULT_WORDS)
    charset = _charset(ctx, charset_name)
    try:
        manifest = generate(
            words, per_word, charset, seed, out_dir, augmented=augment, multiplier=augment_multiplier,
        )
    except OSError as e:
        msg = f"Cannot write dataset to {out_dir}: {e}"
        raise ConfigError(msg) from e
    click.echo(f"✅ Generated {len(manifest.entries)} images for {len(words)} words in {out_dir}")
    if do_split:
        parts = split(manifest.entries, seed)
        write_dataset(out_dir, parts)
        click.echo(format_counts(parts.counts()))


@cli.command()
@click.option("--model", "kind", type=click.Choice(MODEL_KINDS), required=True)
@click.option("--data", "data_dir", type=click.Path(file_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True, help="Best checkpoint")
@click.option("--variant", type=click.Choice([v.value for v in Variant]), default=Variant.FULL.value, show_default=True)
@click.option("--charset", "charset_name", default=None, help="Charset preset or file")
@click.option("--classes", type=click.IntRange(min=2), default=None, help="Classifier: number of word classes")
@click.option("--epochs", type=click.IntRange(min=1), default=None, help="Override max_epochs")
@click.option("--resume", "resume_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Continue from a '.last' checkpoint")
@click.option("--history", "history_path", type=click.Path(dir_okay=False), default=None,
              help="History CSV (default: next to --out)")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="Settings file (overrides the group --config)")
@click.pass_context
@_exit_codes
def train(
    ctx: click.Context,
    kind: str,
    data_dir: str,
    out_path: str,
    variant: str,
    charset_name: str | None,
    classes: int | None,
    epochs: int | None,
    resume_path: str | None,
    history_path: str | None,
    config_path: str | None,
) -> None:
    """Train a model on a generated or prepared dataset"""
    settings = _use_config(ctx, config_path)
    cfg = settings.train
    if epochs is not None:
        cfg = cfg.model_copy(update={"max_epochs": epochs})
    model_kind = ModelKind(kind)
    manifest = load_dataset(data_dir, cfg.seed)
    history_path = history_path or str(Path(out_path).with_suffix(".history.csv"))

    resume = Checkpoint.load(resume_path) if resume_path else None
    if resume is not None and resume.spec.kind != model_kind:
        msg = f"--resume checkpoint holds a {resume.spec.kind.value} model, not {kind}"
        raise ConfigError(msg)
    if model_kind.is_htr:
        charset = _charset(ctx, charset_name)
        spec = ModelSpec(kind=model_kind, charset_size=len(charset), variant=Variant(variant), seed=cfg.seed)
        model = restore(resume) if resume else build(spec)
        result = train_htr(model, manifest, cfg, charset, settings.preprocess, out_path, history_path, resume)
    else:
        entries = select_classes(manifest.entries, classes) if classes else manifest.entries
        index = ClassIndex.from_entries(entries, classes)
        spec = ModelSpec(kind=model_kind, num_classes=len(index), variant=Variant(variant), seed=cfg.seed)
        model = restore(resume) if resume else build(spec)
        subset = DatasetManifest(entries, {}, manifest.root)
        result = train_classifier(model, subset, cfg, index, settings.preprocess, out_path, history_path, resume)
    best = result.history[result.best_epoch - 1] if result.history else None
    click.echo(f"✅ Trained {len(result.history)} epochs; best epoch {result.best_epoch}")
    if best is not None:
        click.echo(f"val_loss={best.val_loss:.4f} val_cer={format_percent(best.val_cer)}")
    if result.skipped:
        click.echo(f"Skipped {len(result.skipped)} samples whose labels do not fit the model", err=True)
    click.echo(f"Checkpoint: {out_path}  History: {history_path}")


@cli.command(name="recognize")
@click.option("--ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--image", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--decoder", type=click.Choice(DECODERS), default=None, help="Default: settings decoder")
@click.option("--dict", "dictionary", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--lm", type=click.Path(exists=True, dir_okay=False), default=None, help="Text corpus for the character LM")
@click.option("--beam-width", type=click.IntRange(min=1), default=None)
@click.option("--deslant/--no-deslant", default=None, help="Shear-correct cursive before recognition")
@click.option("--charset", "charset_name", default=None)
@click.pass_context
@_exit_codes
def recognize_cmd(
    ctx: click.Context,
    ckpt: str,
    image: str,
    decoder: str | None,
    dictionary: str | None,
    lm: str | None,
    beam_width: int | None,
    deslant: bool | None,
    charset_name: str | None,
) -> None:
    """Transcribe one word image"""
    charset = _charset(ctx, charset_name)
    config, tree, char_lm = _decoder_inputs(ctx, decoder, dictionary, lm, beam_width, charset)
    model = _load_htr(ckpt, charset)
    img = preprocess(load_image(image), _preprocess(ctx, deslant), model.spec.input_w, model.spec.input_h)
    result = recognize(model, img, charset, config, tree, char_lm)
    click.echo(f"{result.text}\t{format_probability(result.score)}")


@cli.command(name="eval")
@click.option("--ckpt", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--data", "data_dir", type=click.Path(file_okay=False), required=True)
@click.option("--split", "split_name", type=click.Choice([s.value for s in Split]), default=Split.TEST1.value,
              show_default=True)
@click.option("--decoder", type=click.Choice(DECODERS), default=None)
@click.option("--dict", "dictionary", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--lm", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--beam-width", type=click.IntRange(min=1), default=None)
@click.option("--deslant/--no-deslant", default=None)
@click.option("--macro", is_flag=True, help="Average CER per sample instead of over all characters")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None, help="Report CSV")
@click.option("--charset", "charset_name", default=None)
@click.pass_context
@_exit_codes
def eval_cmd(
    ctx: click.Context,
    ckpt: str,
    data_dir: str,
    split_name: str,
    decoder: str | None,
    dictionary: str | None,
    lm: str | None,
    beam_width: int | None,
    deslant: bool | None,
    macro: bool,
    out_path: str | None,
    charset_name: str | None,
) -> None:
    """Score a checkpoint on one split and write the CER/WER report"""
    charset = _charset(ctx, charset_name)
    config, tree, char_lm = _decoder_inputs(ctx, decoder, dictionary, lm, beam_width, charset)
    model = _load_htr(ckpt, charset)
    manifest = load_dataset(data_dir, _settings(ctx).train.seed)
    samples = load_split(manifest, Split(split_name), model.spec.input_w, model.spec.input_h, _preprocess(ctx, deslant))
    if len(samples) == 0:
        msg = f"Split {split_name} of {data_dir} is empty"
        raise ContractError(msg)
    report = evaluate_decoder(model, samples, charset, config, tree, char_lm, macro=macro)
    click.echo(
        f"{config.name.value} {split_name}: CER {format_percent(report.cer)} WER {format_percent(report.wer)} "
        f"WAR {format_percent(report.war)} CAR {format_percent(report.car)} (n={report.sample_count})",
    )
    if out_path and not report.write_csv(out_path):
        msg = f"Cannot write report {out_path}"
        raise HTRError(msg)


def _box_row(box: Box, level: str, line: int) -> dict[str, Any]:
    x, y, w, h = box.as_tuple()
    return {"x": x, "y": y, "w": w, "h": h, "level": level, "line": line}


@cli.command()
@click.option("--image", type=click.Path(dir_okay=False), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.pass_context
@_exit_codes
def segment(ctx: click.Context, image: str, out_path: str) -> None:
    """Find line and word boxes on a page image"""
    img = load_image(image)
    lines = segment_page(img, _settings(ctx).segment)
    rows = []
    for number, line in enumerate(lines):
        rows.append(_box_row(line.box, "line", number))
        rows.extend(_box_row(word, "word", number) for word in line.words)
    frame = pd.DataFrame(rows, columns=["x", "y", "w", "h", "level", "line"])
    if not write_csv(frame, out_path):
        msg = f"Cannot write {out_path}"
        raise HTRError(msg)
    click.echo(f"✅ {len(lines)} lines, {sum(len(line.words) for line in lines)} words -> {out_path}")


if __name__ == "__main__":
    cli()
