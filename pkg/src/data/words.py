"""
Default vocabulary: 42 city, region and country names in Cyrillic
"""

from __future__ import annotations

from pathlib import Path

from data.charset import nfc

DEFAULT_WORDS: tuple[str, ...] = (
    "казахстан", "беларусь", "кыргызстан", "таджикистан", "узбекистан", "алматы",
    "актау", "актобе", "атырау", "астана", "караганда", "павлодар",
    "семей", "шымкент", "тараз", "костанай", "кокшетау", "петропавловск",
    "уральск", "экибастуз", "туркестан", "кызылорда", "талдыкорган", "жезказган",
    "балхаш", "темиртау", "рудный", "россия", "москва", "киев",
    "минск", "бишкек", "ташкент", "душанбе", "жаңаөзен", "новосибирск",
    "казань", "самара", "баку", "тбилиси", "түркістан", "өскемен",
)


def read_words(path: str | Path) -> list[str]:
    """One word per line, UTF-8; blank lines are ignored"""
    text = Path(path).read_text(encoding="utf-8")
    return [nfc(line.strip()) for line in text.splitlines() if line.strip()]


def write_words(path: str | Path, words: list[str] | tuple[str, ...]) -> None:
    Path(path).write_text("".join(f"{nfc(w)}\n" for w in words), encoding="utf-8", newline="\n")
