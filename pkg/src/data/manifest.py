"""
Dataset manifests and splits

A manifest is a UTF-8 TSV of ``relative_path<TAB>transcript`` lines (NFC,
LF endings). A dataset directory holds ``manifest.tsv`` with every entry
and one file per split in the same format.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from data.charset import nfc
from errors import ConfigError, ContractError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.tsv"


class Split(str, Enum):
    TRAIN = "train"
    VAL = "val"
    TEST1 = "test1"
    TEST2 = "test2"

    @property
    def filename(self) -> str:
        return f"{self.value}.tsv"


@dataclass(frozen=True)
class Entry:
    path: str
    transcript: str

    def __post_init__(self) -> None:
        for value in (self.path, self.transcript):
            if "\t" in value or "\n" in value or "\r" in value:
                msg = f"Manifest fields may not contain tabs or line breaks: {value!r}"
                raise ContractError(msg)
        object.__setattr__(self, "transcript", nfc(self.transcript))


class SplitFractions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    val: float = Field(default=0.15, ge=0.0, lt=1.0)
    test1: float = Field(default=0.075, ge=0.0, lt=1.0)
    test2: float = Field(default=0.075, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _leave_training_data(self) -> SplitFractions:
        if self.val + self.test1 + self.test2 >= 1.0:
            msg = "val + test1 + test2 fractions must leave room for training data"
            raise ValueError(msg)
        return self


@dataclass
class DatasetManifest:
    entries: list[Entry]
    assignment: dict[Split, list[int]] = field(default_factory=dict)
    root: Path | None = None

    def subset(self, split: Split) -> list[Entry]:
        if split not in self.assignment:
            msg = f"Dataset has no {split.value} split"
            raise ConfigError(msg)
        return [self.entries[i] for i in self.assignment[split]]

    def counts(self) -> dict[str, int]:
        return {split.value: len(self.assignment.get(split, [])) for split in Split}

    def transcripts(self, split: Split) -> set[str]:
        return {entry.transcript for entry in self.subset(split)}

    def image_path(self, entry: Entry) -> Path:
        return (self.root / entry.path) if self.root else Path(entry.path)


def write_manifest(path: str | Path, entries: Sequence[Entry]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = "".join(f"{entry.path}\t{entry.transcript}\n" for entry in entries)
    path.write_bytes(nfc(text).encode("utf-8"))


def read_manifest(path: str | Path) -> list[Entry]:
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except OSError as err:
        msg = f"Cannot read manifest {path}: {err}"
        raise ConfigError(msg) from err
    entries = []
    for number, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:  # noqa: PLR2004
            msg = f"{path}:{number}: expected 'path<TAB>transcript', got {line!r}"
            raise ConfigError(msg)
        entries.append(Entry(parts[0], parts[1]))
    return entries


def _targets(total: int, fractions: SplitFractions) -> dict[Split, int]:
    test1 = round(total * fractions.test1)
    test2 = round(total * fractions.test2)
    val = round(total * fractions.val)
    return {Split.TEST1: test1, Split.TEST2: test2, Split.VAL: val}


def split(entries: Sequence[Entry], seed: int = 0, fractions: SplitFractions | None = None) -> DatasetManifest:
    """Partition entries into train / val / test1 / test2

    TEST1 holds whole words that never occur in train or val; TEST2 holds
    further samples of words that do occur in train. When whole words cannot
    fill TEST1 exactly, one word is split and its surplus samples are left
    out of every split.
    """
    fractions = fractions or SplitFractions()
    by_word: dict[str, list[int]] = defaultdict(list)
    for index, entry in enumerate(entries):
        by_word[entry.transcript].append(index)
    words = sorted(by_word)
    if len(words) < 2:  # noqa: PLR2004
        msg = f"Splitting needs at least 2 distinct transcripts, got {len(words)}"
        raise ConfigError(msg)

    rng = np.random.default_rng(seed)
    order = [words[i] for i in rng.permutation(len(words))]
    for word in order:
        by_word[word] = [by_word[word][i] for i in rng.permutation(len(by_word[word]))]
    targets = _targets(len(entries), fractions)

    # TEST1: whole words first, then top up from one partial word
    test1: list[int] = []
    unseen: list[str] = []
    for word in order:
        if len(test1) + len(by_word[word]) <= targets[Split.TEST1]:
            test1.extend(by_word[word])
            unseen.append(word)
    remaining = [w for w in order if w not in unseen]
    excluded: list[int] = []
    shortfall = targets[Split.TEST1] - len(test1)
    if shortfall > 0 and remaining:
        word = remaining.pop()
        test1.extend(by_word[word][:shortfall])
        excluded = by_word[word][shortfall:]
        if excluded:
            logger.warning("Left %d samples of %r out of every split to keep TEST1 unseen", len(excluded), word)
    if not remaining:
        msg = "Too few distinct words: TEST1 would take every word, leaving nothing to train on"
        raise ConfigError(msg)

    # One sample of every seen word stays in train so TEST2 words are always seen
    reserved = [by_word[word][0] for word in remaining]
    pool = [i for word in remaining for i in by_word[word][1:]]
    pool = [pool[i] for i in rng.permutation(len(pool))]
    test2 = pool[: targets[Split.TEST2]]
    val = pool[targets[Split.TEST2] : targets[Split.TEST2] + targets[Split.VAL]]
    train = reserved + pool[targets[Split.TEST2] + targets[Split.VAL] :]

    assignment = {
        Split.TRAIN: sorted(train),
        Split.VAL: sorted(val),
        Split.TEST1: sorted(test1),
        Split.TEST2: sorted(test2),
    }
    manifest = DatasetManifest(list(entries), assignment)
    logger.debug("Split %d entries: %s", len(entries), manifest.counts())
    return manifest


def split_train_val(entries: Sequence[Entry], seed: int = 0, val_fraction: float = 0.1) -> DatasetManifest:
    """Plain random train / validation split (90/10 by default)"""
    if not 0.0 < val_fraction < 1.0:
        msg = f"val_fraction must be in (0, 1), got {val_fraction}"
        raise ConfigError(msg)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(entries)).tolist()
    n_val = round(len(entries) * val_fraction)
    return DatasetManifest(
        list(entries),
        {Split.TRAIN: sorted(order[n_val:]), Split.VAL: sorted(order[:n_val])},
    )


def write_dataset(root: str | Path, manifest: DatasetManifest) -> None:
    root = Path(root)
    write_manifest(root / MANIFEST_NAME, manifest.entries)
    for split_name, indices in manifest.assignment.items():
        write_manifest(root / split_name.filename, [manifest.entries[i] for i in indices])


def load_dataset(root: str | Path, seed: int = 0) -> DatasetManifest:
    """Read a dataset directory; splits are recomputed if no split files exist"""
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        msg = f"No {MANIFEST_NAME} in {root}"
        raise ConfigError(msg)
    entries = read_manifest(manifest_path)
    position = {entry: i for i, entry in enumerate(entries)}
    assignment: dict[Split, list[int]] = {}
    for split_name in Split:
        path = root / split_name.filename
        if path.is_file():
            assignment[split_name] = sorted(position[e] for e in read_manifest(path) if e in position)
    if not assignment:
        logger.info("No split files in %s; splitting with seed %d", root, seed)
        return DatasetManifest(entries, split(entries, seed).assignment, root)
    return DatasetManifest(entries, assignment, root)


@dataclass(frozen=True)
class ClassIndex:
    """Class labels for the word-classifier experiments: one class per distinct transcript"""

    names: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.names)

    def label(self, transcript: str) -> int:
        try:
            return self.names.index(nfc(transcript))
        except ValueError as err:
            msg = f"{transcript!r} is not one of the {len(self.names)} classes"
            raise ContractError(msg) from err

    @classmethod
    def from_entries(cls, entries: Sequence[Entry], num_classes: int | None = None) -> ClassIndex:
        names = tuple(sorted({entry.transcript for entry in entries}))
        if num_classes is not None and len(names) != num_classes:
            msg = f"Dataset has {len(names)} distinct classes but {num_classes} were requested"
            raise ConfigError(msg)
        return cls(names)


def select_classes(entries: Sequence[Entry], num_classes: int) -> list[Entry]:
    """Keep the entries of the first ``num_classes`` transcripts in first-seen order"""
    if num_classes < 2:  # noqa: PLR2004
        msg = f"A classifier needs at least 2 classes, got {num_classes}"
        raise ConfigError(msg)
    chosen: list[str] = []
    for entry in entries:
        if entry.transcript not in chosen:
            chosen.append(entry.transcript)
        if len(chosen) == num_classes:
            break
    if len(chosen) < num_classes:
        msg = f"Dataset has only {len(chosen)} distinct transcripts, {num_classes} classes requested"
        raise ConfigError(msg)
    keep = set(chosen)
    return [entry for entry in entries if entry.transcript in keep]
