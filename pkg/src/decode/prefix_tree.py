"""
Dictionary prefix tree over charset indices
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from data.charset import Charset, nfc
from errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass
class TrieNode:
    children: dict[int, TrieNode] = field(default_factory=dict)
    is_word: bool = False


class PrefixTree:
    """Trie of dictionary words; ``separator`` is the class that joins words"""

    def __init__(self, words: Iterable[Sequence[int]], separator: int | None = None) -> None:
        self.root = TrieNode()
        self.separator = separator
        self._count = 0
        for word in words:
            self.add(word)
        if self._count == 0:
            msg = "Dictionary is empty"
            raise ConfigError(msg)

    def add(self, word: Sequence[int]) -> None:
        if not word:
            return
        node = self.root
        for symbol in word:
            node = node.children.setdefault(int(symbol), TrieNode())
        if not node.is_word:
            node.is_word = True
            self._count += 1

    def __len__(self) -> int:
        return self._count

    def node(self, prefix: Sequence[int]) -> TrieNode | None:
        node = self.root
        for symbol in prefix:
            node = node.children.get(symbol)
            if node is None:
                return None
        return node

    def is_prefix(self, prefix: Sequence[int]) -> bool:
        return self.node(prefix) is not None

    def __contains__(self, word: object) -> bool:
        node = self.node(word)  # type: ignore[arg-type]
        return node is not None and node.is_word

    def words(self) -> Iterator[tuple[int, ...]]:
        stack: list[tuple[TrieNode, tuple[int, ...]]] = [(self.root, ())]
        while stack:
            node, prefix = stack.pop()
            if node.is_word:
                yield prefix
            for symbol in sorted(node.children, reverse=True):
                stack.append((node.children[symbol], (*prefix, symbol)))

    @classmethod
    def from_words(cls, words: Iterable[str], charset: Charset) -> PrefixTree:
        """Encode words through ``charset``; words it cannot encode are skipped"""
        encoded = []
        for entry in words:
            for word in nfc(entry).split():
                if charset.encodable(word):
                    encoded.append(charset.encode(word))
                else:
                    logger.warning("Dictionary word %r has symbols outside %s; skipped", word, charset.name)
        return cls(encoded, separator=charset.space_index)

    @classmethod
    def from_file(cls, path: str | Path, charset: Charset) -> PrefixTree:
        """One word per line, UTF-8"""
        path = Path(path)
        lines = path.read_text(encoding="utf-8").splitlines()
        tree = cls.from_words(lines, charset)
        logger.info("Loaded %d dictionary words from %s", len(tree), path)
        return tree
