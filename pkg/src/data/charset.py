"""
Character sets

A charset is an ordered list of symbols; a symbol's position is its class
index and the CTC blank takes the index right after the last symbol.
"""

from __future__ import annotations

import logging
import unicodedata
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from errors import ConfigError, ContractError, EncodingError

logger = logging.getLogger(__name__)

RUSSIAN_LETTERS = "абвгдеёжзийклмнопрстуфхцчшщъыьэюя"
KAZAKH_LETTERS = "әғқңөұүһі"
SPACE = " "


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Charset:
    symbols: tuple[str, ...]
    name: str = "charset"
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        symbols = tuple(nfc(s) for s in self.symbols)
        seen: set[str] = set()
        for symbol in symbols:
            if len(symbol) != 1:
                msg = f"Charset symbols must be single characters, got {symbol!r}"
                raise ConfigError(msg)
            if symbol in seen:
                msg = f"Duplicate symbol {symbol!r} in charset {self.name}"
                raise ConfigError(msg)
            seen.add(symbol)
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(symbols)})

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._index

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def blank_index(self) -> int:
        return len(self.symbols)

    @property
    def space_index(self) -> int | None:
        return self._index.get(SPACE)

    def index(self, symbol: str) -> int:
        return self._index[symbol]

    def encodable(self, text: str) -> bool:
        return all(ch in self._index for ch in nfc(text))

    def encode(self, text: str) -> tuple[int, ...]:
        label = []
        for position, ch in enumerate(nfc(text)):
            if ch not in self._index:
                raise EncodingError(ch, position, f"charset {self.name}")
            label.append(self._index[ch])
        return tuple(label)

    def decode(self, label: Sequence[int]) -> str:
        chars = []
        for position, index in enumerate(label):
            if not 0 <= index < len(self.symbols):
                msg = f"Class {index} at position {position} is not a symbol of charset {self.name}"
                raise ContractError(msg)
            chars.append(self.symbols[index])
        return "".join(chars)

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(f"{s}\n" for s in self.symbols), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path: str | Path, name: str | None = None) -> Charset:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        symbols = [line for line in text.split("\n") if line != ""]
        return cls(tuple(symbols), name=name or path.stem)

    @classmethod
    def from_text(cls, texts: Iterable[str], name: str = "corpus") -> Charset:
        """Every distinct symbol of ``texts`` in code-point order"""
        symbols = sorted({ch for text in texts for ch in nfc(text)})
        return cls(tuple(symbols), name=name)


def _cased(letters: str) -> str:
    return letters.upper() + letters


PRESETS: dict[str, str] = {
    "russian": RUSSIAN_LETTERS + SPACE,
    "kazakh": RUSSIAN_LETTERS + KAZAKH_LETTERS + SPACE,
    "kazakh_cased": _cased(RUSSIAN_LETTERS + KAZAKH_LETTERS) + SPACE,
}
DEFAULT_PRESET = "kazakh"


def preset(name: str = DEFAULT_PRESET) -> Charset:
    if name not in PRESETS:
        msg = f"Unknown charset preset {name!r}; choose one of {', '.join(PRESETS)}"
        raise ConfigError(msg)
    return Charset(tuple(PRESETS[name]), name=name)


def resolve(spec: str) -> Charset:
    """A preset name or a path to a charset file"""
    if spec in PRESETS:
        return preset(spec)
    path = Path(spec)
    if path.is_file():
        logger.debug("Loading charset from %s", path)
        return Charset.load(path)
    msg = f"{spec!r} is neither a charset preset ({', '.join(PRESETS)}) nor a charset file"
    raise ConfigError(msg)
