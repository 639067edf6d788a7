"""
Checkpoint binary format

Layout (all integers little-endian):

    b"HTRK"  u32 version
    u32 n    model spec JSON (n bytes, UTF-8)
    tensors  parameters, as float32
    tensors  running buffers, as float32
    u8 flag  [u32 epoch, f64 best_val_loss, f64 lr]            training state
    u8 flag  [u32 n, metadata JSON, tensors as float64]        exact-resume state

A tensor block is ``u32 count`` followed, per tensor, by ``u16 name length,
name, u8 rank, u32 dims..., data``. Tensors are written in sorted name order
so identical models produce identical bytes.
"""

from __future__ import annotations

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from errors import CheckpointError
from models.spec import ModelSpec

logger = logging.getLogger(__name__)

MAGIC = b"HTRK"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainingState:
    epoch: int
    best_val_loss: float
    lr: float


@dataclass
class ResumeState:
    """Everything needed to continue a run bit-for-bit"""

    metadata: dict[str, Any] = field(default_factory=dict)
    tensors: dict[str, np.ndarray] = field(default_factory=dict)


@dataclass
class Checkpoint:
    spec: ModelSpec
    parameters: dict[str, np.ndarray]
    buffers: dict[str, np.ndarray] = field(default_factory=dict)
    training: TrainingState | None = None
    resume: ResumeState | None = None

    def to_bytes(self) -> bytes:
        out = bytearray(MAGIC)
        out += struct.pack("<I", FORMAT_VERSION)
        _write_blob(out, json.dumps(self.spec.model_dump(mode="json"), sort_keys=True))
        _write_tensors(out, self.parameters, "<f4")
        _write_tensors(out, self.buffers, "<f4")
        if self.training is None:
            out += b"\x00"
        else:
            out += b"\x01" + struct.pack(
                "<Idd", self.training.epoch, self.training.best_val_loss, self.training.lr,
            )
        if self.resume is None:
            out += b"\x00"
        else:
            out += b"\x01"
            _write_blob(out, json.dumps(self.resume.metadata, sort_keys=True))
            _write_tensors(out, self.resume.tensors, "<f8")
        return bytes(out)

    @classmethod
    def from_bytes(cls, payload: bytes) -> Checkpoint:
        if payload[:4] != MAGIC:
            msg = f"Not a checkpoint: expected magic {MAGIC!r}, found {payload[:4]!r}"
            raise CheckpointError(msg)
        reader = _Reader(payload, 4)
        try:
            (version,) = reader.unpack("<I")
            if version != FORMAT_VERSION:
                msg = f"Unsupported checkpoint version {version} (this build reads {FORMAT_VERSION})"
                raise CheckpointError(msg)
            spec = ModelSpec.model_validate(json.loads(reader.blob()))
            parameters = reader.tensors("<f4")
            buffers = reader.tensors("<f4")
            training = None
            if reader.flag():
                epoch, best, lr = reader.unpack("<Idd")
                training = TrainingState(epoch=epoch, best_val_loss=best, lr=lr)
            resume = None
            if reader.flag():
                metadata = json.loads(reader.blob())
                resume = ResumeState(metadata=metadata, tensors=reader.tensors("<f8"))
        except (struct.error, UnicodeDecodeError, json.JSONDecodeError, ValueError) as err:
            msg = f"Corrupt checkpoint: {err}"
            raise CheckpointError(msg) from err
        return cls(spec=spec, parameters=parameters, buffers=buffers, training=training, resume=resume)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.to_bytes())
        logger.debug("Wrote checkpoint %s (%d parameters)", path, len(self.parameters))

    @classmethod
    def load(cls, path: str | Path) -> Checkpoint:
        path = Path(path)
        try:
            payload = path.read_bytes()
        except OSError as err:
            msg = f"Cannot read checkpoint {path}: {err}"
            raise CheckpointError(msg) from err
        return cls.from_bytes(payload)


def _write_blob(out: bytearray, text: str) -> None:
    data = text.encode("utf-8")
    out += struct.pack("<I", len(data)) + data


def _write_tensors(out: bytearray, tensors: dict[str, np.ndarray], dtype: str) -> None:
    out += struct.pack("<I", len(tensors))
    for name in sorted(tensors):
        array = np.asarray(tensors[name])
        encoded = name.encode("utf-8")
        out += struct.pack("<H", len(encoded)) + encoded
        out += struct.pack("<B", array.ndim)
        out += struct.pack(f"<{array.ndim}I", *array.shape)
        out += np.ascontiguousarray(array, dtype=dtype).tobytes()


class _Reader:
    def __init__(self, payload: bytes, offset: int) -> None:
        self.payload = payload
        self.offset = offset

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.payload):
            msg = "unexpected end of data"
            raise struct.error(msg)
        chunk = self.payload[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str) -> tuple[Any, ...]:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def flag(self) -> bool:
        return self.unpack("<B")[0] == 1

    def blob(self) -> str:
        (size,) = self.unpack("<I")
        return self.take(size).decode("utf-8")

    def tensors(self, dtype: str) -> dict[str, np.ndarray]:
        (count,) = self.unpack("<I")
        itemsize = np.dtype(dtype).itemsize
        result = {}
        for _ in range(count):
            (name_len,) = self.unpack("<H")
            name = self.take(name_len).decode("utf-8")
            (rank,) = self.unpack("<B")
            shape = self.unpack(f"<{rank}I") if rank else ()
            size = int(np.prod(shape)) if shape else 1
            data = np.frombuffer(self.take(size * itemsize), dtype=dtype)
            result[name] = data.astype(np.float64).reshape(shape)
        return result
