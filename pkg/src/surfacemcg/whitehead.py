"""Whitehead graphs, surface word sets and associated sequences."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .words import (
    Alphabet,
    AlphabetMismatch,
    CyclicWord,
    Word,
    WordSyntaxError,
    letter_key,
    tokenize,
)

WordItem = Word | CyclicWord

SEGMENT_CONDITIONS = ("connectivity", "edge count", "out-degrees", "in-degrees")


class NotSurfaceWordSet(ValueError):
    def __init__(self, failures: Sequence[str]):
        super().__init__("not a surface word set: " + ", ".join(failures))
        self.failures = tuple(failures)


@dataclass(frozen=True)
class WhiteheadGraph:
    alphabet: Alphabet
    edges: tuple[tuple[tuple[int, int], int], ...]  # ((tail, head), multiplicity), sorted

    @property
    def counts(self) -> Counter:
        return Counter(dict(self.edges))

    def edge_count(self) -> int:
        return sum(m for _, m in self.edges)

    def multiplicity(self, a: int, b: int) -> int:
        return dict(self.edges).get((a, b), 0)

    def out_degree(self, v: int) -> int:
        return sum(m for (a, _), m in self.edges if a == v)

    def in_degree(self, v: int) -> int:
        return sum(m for (_, b), m in self.edges if b == v)

    def is_connected(self) -> bool:
        vertices = self.alphabet.letters()
        adj: dict[int, set[int]] = {v: set() for v in vertices}
        for (a, b), _ in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {vertices[0]}
        stack = [vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(vertices)

    def lines(self) -> list[str]:
        name = self.alphabet.letter_name
        return [
            f"{name(a)}->{name(b)}"
            for (a, b), m in self.edges
            for _ in range(m)
        ]


def _pairs(item: WordItem) -> Iterable[tuple[int, int]]:
    w = item.letters
    yield from zip(w, w[1:])
    if isinstance(item, CyclicWord) and w:
        yield w[-1], w[0]


def build_graph(items: Iterable[WordItem], alphabet: Alphabet | None = None) -> WhiteheadGraph:
    """One edge ``a -> b`` for each subword ``a^-1 b`` (cyclically for cyclic words)."""
    items = list(items)
    if alphabet is None:
        if not items:
            raise ValueError("alphabet required for an empty word set")
        alphabet = items[0].alphabet
    counts: Counter = Counter()
    for item in items:
        if item.alphabet != alphabet:
            raise AlphabetMismatch("word set mixes alphabets")
        if isinstance(item, Word):
            if not all(a != -b for a, b in zip(item.letters, item.letters[1:])):
                raise ValueError("plain words must be reduced")
        for u, v in _pairs(item):
            counts[(-u, v)] += 1
    edges = tuple(
        sorted(counts.items(), key=lambda kv: (letter_key(kv[0][0]), letter_key(kv[0][1])))
    )
    return WhiteheadGraph(alphabet, edges)


def segment_failures(graph: WhiteheadGraph) -> list[str]:
    """Failed oriented-segment conditions, in the fixed diagnostic order."""
    vertices = graph.alphabet.letters()
    failures = []
    if not graph.is_connected():
        failures.append("connectivity")
    if graph.edge_count() != len(vertices) - 1:
        failures.append("edge count")
    outs = sorted(graph.out_degree(v) for v in vertices)
    if outs != [0] + [1] * (len(vertices) - 1):
        failures.append("out-degrees")
    ins = sorted(graph.in_degree(v) for v in vertices)
    if ins != [0] + [1] * (len(vertices) - 1):
        failures.append("in-degrees")
    return failures


def _set_key(c: CyclicWord) -> tuple:
    return (len(c), [letter_key(a) for a in c.letters])


@dataclass(frozen=True)
class SurfaceWordSet:
    """One plain word plus cyclic words whose Whitehead graph is a segment.

    Construct through :meth:`build`, which validates; ``cyclic`` is kept
    sorted so equal sets compare equal.
    """

    alphabet: Alphabet
    word: Word
    cyclic: tuple[CyclicWord, ...]

    @classmethod
    def build(cls, word: Word, cyclic: Iterable[CyclicWord]) -> SurfaceWordSet:
        T = cls.unchecked(word, cyclic)
        failures = segment_failures(T.graph())
        if failures:
            raise NotSurfaceWordSet(failures)
        if (T.alphabet.rank - T.p) % 2 or T.p > T.alphabet.rank:
            raise NotSurfaceWordSet(["type"])
        return T

    @classmethod
    def unchecked(cls, word: Word, cyclic: Iterable[CyclicWord]) -> SurfaceWordSet:
        return cls(word.alphabet, word, tuple(sorted(cyclic, key=_set_key)))

    def items(self) -> list[WordItem]:
        return [self.word, *self.cyclic]

    def graph(self) -> WhiteheadGraph:
        return build_graph(self.items(), self.alphabet)

    @property
    def p(self) -> int:
        return len(self.cyclic)

    @property
    def g(self) -> int:
        return (self.alphabet.rank - self.p) // 2

    def __str__(self) -> str:
        return format_set(self.items())


def is_surface_word_set(items: Sequence[WordItem], alphabet: Alphabet | None = None) -> tuple[bool, list[str]]:
    """Return ``(verdict, failed conditions)``."""
    plain = [i for i in items if isinstance(i, Word)]
    graph = build_graph(items, alphabet)
    failures = segment_failures(graph)
    if len(plain) != 1:
        failures.append("plain word count")
    return not failures, failures


def surface_type(T: SurfaceWordSet) -> tuple[int, int]:
    return T.g, T.p


def associated_sequence(T: SurfaceWordSet) -> tuple[int, ...]:
    graph = T.graph()
    succ = {a: b for (a, b), _ in graph.edges}
    heads = {b for (_, b), _ in graph.edges}
    start = next(v for v in graph.alphabet.letters() if v not in heads)
    seq = [start]
    while seq[-1] in succ:
        seq.append(succ[seq[-1]])
    return tuple(seq)


def _successor_map(seq: Sequence[int]) -> dict[int, int]:
    """Letter ``-a_i`` is followed by ``a_{i+1}`` in the recovered words."""
    return {-seq[i]: seq[i + 1] for i in range(len(seq) - 1)}


def recover_set(seq: Sequence[int], alphabet: Alphabet) -> SurfaceWordSet:
    """Inverse of :func:`associated_sequence`.

    The chain starting at ``a_1`` ends at ``a_{2n}^-1`` and is the plain word;
    the remaining successor cycles are the cyclic words.
    """
    if sorted(seq, key=letter_key) != alphabet.letters():
        raise ValueError("sequence must list every signed letter exactly once")
    nxt = _successor_map(seq)
    word = [seq[0]]
    while word[-1] in nxt:
        word.append(nxt[word[-1]])
    used = set(word)
    cycles = []
    for a in alphabet.letters():
        if a in used:
            continue
        cycle = [a]
        used.add(a)
        while nxt[cycle[-1]] != a:
            cycle.append(nxt[cycle[-1]])
            used.add(cycle[-1])
        cycles.append(CyclicWord.of(Word(alphabet, tuple(cycle))))
    return SurfaceWordSet.build(Word(alphabet, tuple(word)), cycles)


# -- text formats ---------------------------------------------------------

_ITEM_RE = re.compile(r"\[([^\]]*)\]|([^\s,\[\]]+)")


def compact(item: WordItem) -> str:
    text = "".join(item.alphabet.letter_name(a) for a in item.letters) or "1"
    return f"[{text}]" if isinstance(item, CyclicWord) else text


def format_set(items: Iterable[WordItem]) -> str:
    return " ".join(compact(i) for i in items)


def format_sequence(seq: Sequence[int], alphabet: Alphabet) -> str:
    return ",".join(alphabet.letter_name(a) for a in seq)


def parse_sequence(text: str, alphabet: Alphabet) -> tuple[int, ...]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    return tuple(alphabet.parse_letter(p) for p in parts)


def split_set(text: str) -> list[tuple[str, bool]]:
    """Split set text into ``(word text, is_cyclic)`` items."""
    items = []
    pos = 0
    text = text.strip()
    for m in _ITEM_RE.finditer(text):
        if text[pos : m.start()].strip(" ,\t\n"):
            raise WordSyntaxError(f"cannot parse word set {text!r}")
        pos = m.end()
        if m.group(1) is not None:
            items.append((m.group(1), True))
        else:
            items.append((m.group(2), False))
    if text[pos:].strip(" ,\t\n"):
        raise WordSyntaxError(f"cannot parse word set {text!r}")
    return items


def parse_set(text: str, alphabet: Alphabet) -> list[WordItem]:
    out: list[WordItem] = []
    for body, cyc in split_set(text):
        w = Word.parse(body, alphabet)
        if cyc:
            out.append(CyclicWord.of(w))
        else:
            raw_len = sum(abs(e) for _, e in tokenize(body))
            if raw_len != len(w):
                raise ValueError(f"plain word {body!r} is not reduced")
            out.append(w)
    return out


def parse_surface_set(text: str, alphabet: Alphabet) -> SurfaceWordSet:
    items = parse_set(text, alphabet)
    plain = [i for i in items if isinstance(i, Word)]
    if len(plain) != 1:
        raise NotSurfaceWordSet(["plain word count"])
    return SurfaceWordSet.build(plain[0], [i for i in items if isinstance(i, CyclicWord)])
