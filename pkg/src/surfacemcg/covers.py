"""Finite-index normal subgroups given as kernels onto permutation groups."""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .folding import FoldedGraph, fold_wedge
from .mccool import MCGElement
from .reports import SuiteReport
from .words import (
    HANDLE_X,
    HANDLE_Y,
    PUNCTURE,
    Alphabet,
    AlphabetMismatch,
    Endomorphism,
    Word,
    boundary_word,
    commutator,
    conjugate_eq,
    reduce,
)

Perm = tuple[int, ...]
BOUNDARY = "boundary"


def perm_mul(p: Perm, q: Perm) -> Perm:
    """Apply ``p`` first, then ``q``."""
    return tuple(q[i] for i in p)


def perm_inv(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def parse_cycles(text: str, degree: int) -> Perm:
    images = list(range(degree))
    for cycle in re.findall(r"\(([^)]*)\)", text):
        points = [int(s) - 1 for s in cycle.replace(",", " ").split()]
        for a, b in zip(points, points[1:] + points[:1]):
            if not (0 <= a < degree and 0 <= b < degree):
                raise ValueError(f"point outside 1..{degree} in {text!r}")
            images[a] = b
    if sorted(images) != list(range(degree)):
        raise ValueError(f"{text!r} is not a permutation")
    return tuple(images)


def format_cycles(p: Perm) -> str:
    seen: set[int] = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cycle = [i]
        seen.add(i)
        while p[cycle[-1]] != i:
            cycle.append(p[cycle[-1]])
            seen.add(cycle[-1])
        parts.append("(" + " ".join(str(j + 1) for j in cycle) + ")")
    return "".join(parts) or "()"


def _infer_surface_alphabet(names: Iterable[str]) -> Alphabet:
    g = p = 0
    for name in names:
        m = re.fullmatch(r"([xyt])([0-9]+)", name)
        if not m:
            raise ValueError(f"cannot infer a surface alphabet from generator {name!r}")
        index = int(m.group(2))
        if m.group(1) == "t":
            p = max(p, index)
        else:
            g = max(g, index)
    return Alphabet.surface(g, p)


@dataclass(frozen=True)
class FiniteQuotientSpec:
    alphabet: Alphabet
    degree: int
    perms: tuple[Perm, ...]

    def __post_init__(self) -> None:
        if len(self.perms) != self.alphabet.rank:
            raise ValueError("need one permutation per generator")
        for perm in self.perms:
            if sorted(perm) != list(range(self.degree)):
                raise ValueError("generator images must be permutations of 1..D")

    @classmethod
    def from_cycles(cls, alphabet: Alphabet, degree: int, images: dict[str, str]) -> FiniteQuotientSpec:
        perms = []
        for name in alphabet.names:
            perms.append(parse_cycles(images.get(name, ""), degree))
        unknown = set(images) - set(alphabet.names)
        if unknown:
            raise AlphabetMismatch(f"generators {sorted(unknown)} not in alphabet")
        return cls(alphabet, degree, tuple(perms))

    @classmethod
    def parse(cls, text: str) -> FiniteQuotientSpec:
        """Parse ``degree D`` then ``name: (cycles)`` lines.

        An optional ``surface G P`` line fixes the alphabet; otherwise it is
        inferred from the generator names.
        """
        degree = None
        surface = None
        images: dict[str, str] = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("degree"):
                degree = int(line.split()[1])
            elif line.startswith("surface"):
                _, g, p = line.split()
                surface = Alphabet.surface(int(g), int(p))
            else:
                name, _, cycles = line.partition(":")
                images[name.strip()] = cycles.strip()
        if degree is None:
            raise ValueError("quotient spec needs a `degree D` header")
        alphabet = surface or _infer_surface_alphabet(images)
        return cls.from_cycles(alphabet, degree, images)

    def format(self) -> str:
        A = self.alphabet
        lines = [f"degree {self.degree}", f"surface {A.g} {A.p}"]
        lines += [f"{n}: {format_cycles(p)}" for n, p in zip(A.names, self.perms)]
        return "\n".join(lines) + "\n"

    def image(self, w: Word) -> Perm:
        result = tuple(range(self.degree))
        inverses = [perm_inv(p) for p in self.perms]
        for a in w.letters:
            result = perm_mul(result, self.perms[a - 1] if a > 0 else inverses[-a - 1])
        return result


@dataclass(frozen=True)
class CosetGraph:
    """Cayley graph of the deck group; its loops at the base spell ``H``.

    ``trans[s][a]`` is the state reached from ``s`` along signed letter ``a``.
    States are numbered in breadth-first order, base state 0.
    """

    spec: FiniteQuotientSpec
    elements: tuple[Perm, ...]
    trans: tuple[dict[int, int], ...]
    tree_words: tuple[tuple[int, ...], ...]

    @property
    def alphabet(self) -> Alphabet:
        return self.spec.alphabet

    @property
    def m(self) -> int:
        return len(self.elements)

    def walk(self, letters: Iterable[int], start: int = 0) -> int:
        s = start
        for a in letters:
            s = self.trans[s][a]
        return s

    def state_of(self, w: Word) -> int:
        return self.walk(w.letters)

    def contains(self, w: Word) -> bool:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch("word over a different alphabet")
        return self.state_of(w) == 0

    def element_order(self, w: Word) -> int:
        s = self.state_of(w)
        step = self.elements[s]
        current = step
        order = 1
        identity = self.elements[0]
        while current != identity:
            current = perm_mul(current, step)
            order += 1
        return order


def build_coset_graph(spec: FiniteQuotientSpec) -> CosetGraph:
    identity = tuple(range(spec.degree))
    n = spec.alphabet.rank
    gens = {}
    for i, p in enumerate(spec.perms, start=1):
        gens[i] = p
        gens[-i] = perm_inv(p)
    letters = [s * i for i in range(1, n + 1) for s in (1, -1)]
    index = {identity: 0}
    elements = [identity]
    tree = [()]
    queue = deque([0])
    while queue:
        s = queue.popleft()
        for a in letters:
            t = perm_mul(elements[s], gens[a])
            if t not in index:
                index[t] = len(elements)
                elements.append(t)
                tree.append(tree[s] + (a,))
                queue.append(index[t])
    trans = tuple(
        {a: index[perm_mul(e, gens[a])] for a in letters} for e in elements
    )
    return CosetGraph(spec, tuple(elements), trans, tuple(tree))


def membership(graph: CosetGraph, w: Word) -> bool:
    return graph.contains(w)


def schreier_basis(graph: CosetGraph) -> list[Word]:
    """Free basis of ``H`` from the breadth-first spanning tree.

    One generator ``u_s a u_{s a}^-1`` per non-tree edge; there are
    ``m (n - 1) + 1`` of them.
    """
    A = graph.alphabet
    tree_edges = set()
    for s, word in enumerate(graph.tree_words):
        if word:
            parent = graph.walk(word[:-1])
            a = word[-1]
            tree_edges.add((parent, a) if a > 0 else (s, -a))
    basis = []
    for s in range(graph.m):
        for a in range(1, A.rank + 1):
            if (s, a) in tree_edges:
                continue
            t = graph.trans[s][a]
            letters = graph.tree_words[s] + (a,) + tuple(-b for b in reversed(graph.tree_words[t]))
            basis.append(reduce(A, letters))
    return basis


def is_invariant(graph: CosetGraph, m: MCGElement | Endomorphism) -> bool:
    e = m.map if isinstance(m, MCGElement) else m
    if e.alphabet != graph.alphabet:
        raise AlphabetMismatch("map over a different alphabet")
    return all(graph.contains(e(w)) for w in schreier_basis(graph))


@dataclass(frozen=True)
class DeckData:
    m: int
    c: int
    b: int
    d: tuple[int, ...]
    m_k: tuple[int, ...]
    q: int
    rank: int
    g_prime: int
    puncture_reps: tuple[tuple[Word, ...], ...]
    boundary_reps: tuple[Word, ...]

    def summary(self) -> dict:
        return {
            "m": self.m,
            "c": self.c,
            "b": self.b,
            "d": list(self.d),
            "m_k": list(self.m_k),
            "q": self.q,
            "rank": self.rank,
            "g_prime": self.g_prime,
        }


def _coset_reps(graph: CosetGraph, step: Word) -> list[int]:
    """One state per orbit of right multiplication by ``step``, in state order."""
    seen: set[int] = set()
    reps = []
    for s in range(graph.m):
        if s in seen:
            continue
        reps.append(s)
        t = s
        while t not in seen:
            seen.add(t)
            t = graph.walk(step.letters, t)
    return reps


def deck_data(graph: CosetGraph) -> DeckData:
    A = graph.alphabet
    m = graph.m
    zbar = boundary_word(A)
    c = graph.element_order(zbar)
    b = m // c
    ds, mks, reps = [], [], []
    for k in range(1, A.p + 1):
        tk = Word.generator(A, A.t(k))
        d = graph.element_order(tk)
        ds.append(d)
        mks.append(m // d)
        reps.append(tuple(Word(A, graph.tree_words[s]) for s in _coset_reps(graph, tk)))
    q = sum(mks)
    rank = m * (A.rank - 1) + 1
    two_g = rank - (b - 1) - q
    if two_g < 0 or two_g % 2:
        raise ValueError(f"deck data inconsistent: 2g' = {two_g}")
    boundary = tuple(Word(A, graph.tree_words[s]) for s in _coset_reps(graph, zbar)[1:])
    return DeckData(m, c, b, tuple(ds), tuple(mks), q, rank, two_g // 2, tuple(reps), boundary)


# -- adapted bases --------------------------------------------------------------

_ROLE_OF_PREFIX = {"x": HANDLE_X, "y": HANDLE_Y, "z": BOUNDARY, "t": PUNCTURE}
_ROLE_ORDER = {HANDLE_X: 0, HANDLE_Y: 1, BOUNDARY: 2, PUNCTURE: 3}


@dataclass(frozen=True)
class AdaptedBasis:
    """Named basis words of ``H``.

    Names are ``x<i>, y<i>`` (handles), ``z<l>`` (lifted boundary components)
    and ``t<j>`` (lifted punctures); the basis alphabet lists them in that
    order, which is also the order of the surface relation.
    """

    source: Alphabet
    names: tuple[str, ...]
    words: tuple[Word, ...]

    def __post_init__(self) -> None:
        for name in self.names:
            if name[0] not in _ROLE_OF_PREFIX:
                raise ValueError(f"basis name {name!r} must start with x, y, z or t")
        for w in self.words:
            if w.alphabet != self.source:
                raise AlphabetMismatch("basis word over a different alphabet")
        order = sorted(
            range(len(self.names)),
            key=lambda i: (_ROLE_ORDER[_ROLE_OF_PREFIX[self.names[i][0]]], int(self.names[i][1:] or 0)),
        )
        if order != list(range(len(self.names))):
            raise ValueError("basis names must be listed as x.., y.., z.., t.. in index order")

    @classmethod
    def parse(cls, text: str, source: Alphabet) -> AdaptedBasis:
        names, words = [], []
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            name, _, body = line.partition("=")
            names.append(name.strip())
            words.append(Word.parse(body, source))
        return cls(source, tuple(names), tuple(words))

    def format(self) -> str:
        return "".join(f"{n} = {w}\n" for n, w in zip(self.names, self.words))

    @cached_property
    def alphabet(self) -> Alphabet:
        roles = tuple(_ROLE_OF_PREFIX[n[0]] for n in self.names)
        return Alphabet(self.names, roles)

    def role_names(self, role: str) -> list[str]:
        return [n for n in self.names if _ROLE_OF_PREFIX[n[0]] == role]

    def word(self, name: str) -> Word:
        return self.words[self.names.index(name)]

    @cached_property
    def folded(self) -> FoldedGraph:
        return fold_wedge([w.letters for w in self.words], self.source.rank)

    def expand(self, w: Word) -> Word:
        """Substitute basis words for basis letters."""
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch("expected a word over the basis alphabet")
        letters: list[int] = []
        for a in w.letters:
            piece = self.words[abs(a) - 1]
            letters.extend(piece.letters if a > 0 else piece.inverse().letters)
        return reduce(self.source, letters)

    def relation_word(self) -> Word:
        """``prod [xhat_i, yhat_i] * prod zhat * prod that`` over the basis alphabet."""
        B = self.alphabet
        w = Word(B, ())
        for xn in self.role_names(HANDLE_X):
            yn = "y" + xn[1:]
            w = w * commutator(Word.generator(B, B.parse_letter(xn)), Word.generator(B, B.parse_letter(yn)))
        for n in self.role_names(BOUNDARY) + self.role_names(PUNCTURE):
            w = w * Word.generator(B, B.parse_letter(n))
        return w


class NotInSubgroup(ValueError):
    pass


def rewrite_in_basis(basis: AdaptedBasis, w: Word) -> Word:
    """Rewrite ``w`` in basis letters by reading it through the folded basis graph."""
    if w.alphabet != basis.source:
        raise AlphabetMismatch("word over a different alphabet")
    result = basis.folded.read(w.letters)
    if result is None or result[0] != basis.folded.base:
        raise NotInSubgroup(f"{w} is not in the subgroup generated by the basis")
    return Word(basis.alphabet, result[1])


@dataclass
class BasisReport:
    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def add(self, name: str, ok: bool, note: str = "") -> None:
        self.checks[name] = ok
        if note and not ok:
            self.notes.append(f"{name}: {note}")


def same_based_graph(folded: FoldedGraph, graph: CosetGraph) -> bool:
    """Label- and base-preserving isomorphism between a folded graph and the coset graph."""
    if len(folded.vertices) != graph.m:
        return False
    match = {folded.base: 0}
    queue = deque([folded.base])
    while queue:
        v = queue.popleft()
        s = match[v]
        edges = folded.out.get(v, {})
        if set(edges) != set(graph.trans[s]):
            return False
        for a, (w, _) in edges.items():
            t = graph.trans[s][a]
            if w in match:
                if match[w] != t:
                    return False
            else:
                match[w] = t
                queue.append(w)
    return len(set(match.values())) == graph.m


def verify_adapted_basis(graph: CosetGraph, basis: AdaptedBasis) -> BasisReport:
    report = BasisReport()
    A = graph.alphabet
    if basis.source != A:
        raise AlphabetMismatch("basis and quotient use different alphabets")
    data = deck_data(graph)
    outside = [n for n, w in zip(basis.names, basis.words) if not graph.contains(w)]
    report.add("membership", not outside, f"not in H: {outside}")
    generates = same_based_graph(basis.folded, graph)
    report.add("generation", generates, "folded basis graph differs from the coset graph")
    report.add(
        "rank",
        len(basis.words) == data.rank,
        f"{len(basis.words)} words for a subgroup of rank {data.rank}",
    )
    counts = (
        len(basis.role_names(HANDLE_X)),
        len(basis.role_names(HANDLE_Y)),
        len(basis.role_names(BOUNDARY)),
        len(basis.role_names(PUNCTURE)),
    )
    expected = (data.g_prime, data.g_prime, data.b - 1, data.q)
    report.add("roles", counts == expected, f"role counts {counts}, expected {expected}")
    zbar_c = boundary_word(A) ** data.c
    relation = basis.expand(basis.relation_word())
    report.add("relation", relation == zbar_c, f"relation expands to {relation}")
    bad = [
        n for n in basis.role_names(BOUNDARY)
        if not conjugate_eq(basis.word(n), zbar_c.inverse())
    ]
    report.add("boundary classes", not bad, f"not conjugate to zbar^-c: {bad}")
    bad = []
    for n in basis.role_names(PUNCTURE):
        w = basis.word(n)
        if not any(
            conjugate_eq(w, Word.generator(A, A.t(k)) ** data.d[k - 1])
            for k in range(1, A.p + 1)
        ):
            bad.append(n)
    report.add("puncture classes", not bad, f"not conjugate to any t_k^d_k: {bad}")
    return report


def target_alphabet(basis: AdaptedBasis) -> Alphabet:
    """Surface alphabet after killing the lifted punctures: ``z_l`` becomes ``t_l``."""
    return Alphabet.surface(len(basis.role_names(HANDLE_X)), len(basis.role_names(BOUNDARY)))


def random_loop(graph: CosetGraph, length: int, rng: random.Random) -> Word:
    """A random element of ``H``: a random walk closed up through the spanning tree."""
    A = graph.alphabet
    letters = A.letters()
    walk = [rng.choice(letters) for _ in range(length)]
    back = tuple(-a for a in reversed(graph.tree_words[graph.walk(walk)]))
    return reduce(A, tuple(walk) + back)


def membership_oracle_suite(spec: FiniteQuotientSpec, samples: int, seed: int, max_length: int = 10) -> SuiteReport:
    """Loop test at the base against the permutation image of the word."""
    report = SuiteReport(f"membership oracle (degree {spec.degree})")
    graph = build_coset_graph(spec)
    identity = tuple(range(spec.degree))
    rng = random.Random(seed)
    letters = spec.alphabet.letters()
    for _ in range(samples):
        w = reduce(spec.alphabet, [rng.choice(letters) for _ in range(rng.randint(0, max_length))])
        report.check(graph.contains(w) == (spec.image(w) == identity), f"{w}")
    return report


def rewrite_roundtrip_suite(graph: CosetGraph, basis: AdaptedBasis, samples: int, seed: int) -> SuiteReport:
    report = SuiteReport("rewrite round trip")
    rng = random.Random(seed)
    for _ in range(samples):
        w = random_loop(graph, rng.randint(0, 12), rng)
        report.check(basis.expand(rewrite_in_basis(basis, w)) == w, f"{w}")
    return report
