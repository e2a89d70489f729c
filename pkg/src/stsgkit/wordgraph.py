"""Sausage word-graphs: one set of alternative terminals per position."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import ParseError, UnknownSymbol


@dataclass(frozen=True)
class WordGraph:
    positions: tuple[tuple[str, ...], ...]

    def __init__(self, positions: Iterable[Iterable[str]]):
        pos = tuple(tuple(dict.fromkeys(q)) for q in positions)
        if not pos:
            raise ValueError("a word-graph needs at least one position")
        if any(not q for q in pos):
            raise ValueError("every position needs at least one terminal")
        object.__setattr__(self, "positions", pos)

    @classmethod
    def from_sentence(cls, sentence: Sequence[str]) -> WordGraph:
        return cls([w] for w in sentence)

    @classmethod
    def power(cls, alphabet: Sequence[str], length: int) -> WordGraph:
        """``alphabet`` repeated at every one of ``length`` positions."""
        return cls([alphabet] * length)

    def __len__(self):
        return len(self.positions)

    def __getitem__(self, i):
        return self.positions[i]

    @property
    def is_sentence(self) -> bool:
        return all(len(q) == 1 for q in self.positions)

    def sentence_count(self) -> int:
        return math.prod(len(q) for q in self.positions)

    def accepts(self, sentence: Sequence[str]) -> bool:
        return (len(sentence) == len(self.positions)
                and all(w in q for w, q in zip(sentence, self.positions)))

    def check_terminals(self, terminals) -> None:
        for i, q in enumerate(self.positions, 1):
            for w in q:
                if w not in terminals:
                    raise UnknownSymbol("position %d holds undeclared terminal %r" % (i, w))


def sentences_of(wg: WordGraph) -> Iterator[tuple[str, ...]]:
    """Every sentence of ``wg``, lexicographic in per-position order."""
    return itertools.product(*wg.positions)


def as_wordgraph(x) -> WordGraph:
    if isinstance(x, WordGraph):
        return x
    if isinstance(x, str):
        x = x.split()
    return WordGraph.from_sentence(x)


def read_wordgraph(text: str, source: str | None = None) -> WordGraph:
    lines = [(n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(text.splitlines(), 1)]
    lines = [(n, ln) for n, ln in lines if ln]
    if not lines:
        raise ParseError("empty word-graph", None, None, source)
    n0, head = lines[0]
    words = head.split()
    if len(words) != 2 or words[0] != "positions" or not words[1].isdigit():
        raise ParseError("expected 'positions <L>'", n0, 1, source)
    length = int(words[1])
    body = lines[1:]
    if length < 1:
        raise ParseError("a word-graph needs L >= 1", n0, len("positions ") + 1, source)
    if len(body) != length:
        where = body[length][0] if len(body) > length else (body[-1][0] if body else n0)
        raise ParseError("expected %d position lines, found %d" % (length, len(body)),
                         where, 1, source)
    return WordGraph(ln.split() for _, ln in body)


def write_wordgraph(wg: WordGraph) -> str:
    lines = ["positions %d" % len(wg)] + [" ".join(q) for q in wg.positions]
    return "\n".join(lines) + "\n"
