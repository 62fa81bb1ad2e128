"""Nielsen moves on surface word sets, mapping-class membership, the
generator catalog and bounded factorization."""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .reports import SuiteReport
from .whitehead import (
    SurfaceWordSet,
    associated_sequence,
    format_set,
    recover_set,
)
from .words import (
    Alphabet,
    AlphabetMismatch,
    CyclicWord,
    Endomorphism,
    Word,
    boundary_word,
    conjugate_eq,
)


class InadmissibleMove(ValueError):
    pass


class MembershipError(ValueError):
    """Rejection by :func:`verify_mcg_membership`; ``kind`` names the reason."""

    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind


NOT_AUTOMORPHISM = "not-an-automorphism"
BOUNDARY_MOVED = "boundary-moved"
PUNCTURE_CLASS_BROKEN = "puncture-class-broken"


@dataclass(frozen=True)
class NielsenMove:
    """Type-1 (signed permutation) or type-2 (``a -> a b``) Nielsen automorphism.

    ``perm`` maps each positive generator to a signed letter.
    """

    kind: str
    perm: tuple[int, ...] = ()
    pair: tuple[int, int] = (0, 0)

    def __post_init__(self) -> None:
        if self.kind == "perm":
            if sorted(abs(a) for a in self.perm) != list(range(1, len(self.perm) + 1)):
                raise ValueError("type-1 move must permute the generators")
        elif self.kind == "right":
            a, b = self.pair
            if a in (b, -b) or 0 in (a, b):
                raise ValueError("type-2 move needs a != b, b^-1")
        else:
            raise ValueError(f"unknown move kind {self.kind!r}")

    @classmethod
    def right(cls, a: int, b: int) -> NielsenMove:
        """``a -> a b``."""
        return cls("right", pair=(a, b))

    @classmethod
    def left(cls, a: int, b: int) -> NielsenMove:
        """``a -> b a``, the same automorphism as ``a^-1 -> a^-1 b^-1``."""
        return cls("right", pair=(-a, -b))

    @classmethod
    def permutation(cls, images: Sequence[int]) -> NielsenMove:
        return cls("perm", perm=tuple(images))

    def letter_image(self, a: int) -> int:
        image = self.perm[abs(a) - 1]
        return image if a > 0 else -image

    def endomorphism(self, alphabet: Alphabet) -> Endomorphism:
        if self.kind == "perm":
            if len(self.perm) != alphabet.rank:
                raise AlphabetMismatch("permutation size differs from rank")
            return Endomorphism(
                alphabet, tuple(Word.generator(alphabet, b) for b in self.perm)
            )
        a, b = self.pair
        if max(abs(a), abs(b)) > alphabet.rank:
            raise AlphabetMismatch("move letter outside alphabet")
        images = list(Endomorphism.identity(alphabet).images)
        image = Word(alphabet, (a, b))
        images[abs(a) - 1] = image if a > 0 else image.inverse()
        return Endomorphism(alphabet, tuple(images))

    def format(self, alphabet: Alphabet) -> str:
        name = alphabet.letter_name
        if self.kind == "perm":
            return "perm: " + ",".join(
                f"{name(i)}->{name(b)}" for i, b in enumerate(self.perm, start=1)
            )
        return f"right: {name(self.pair[0])}*{name(self.pair[1])}"

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> NielsenMove:
        """Accepts :meth:`format` output and the arrow forms ``a -> a b`` / ``a -> b a``."""
        if ":" not in text and "->" in text:
            src, _, dst = text.partition("->")
            a = alphabet.parse_letter(src.strip())
            image = alphabet.word(dst).letters
            if len(image) == 2 and image[0] == a:
                return cls.right(a, image[1])
            if len(image) == 2 and image[1] == a:
                return cls.left(a, image[0])
            raise ValueError(f"{text!r} is not of the form a -> ab or a -> ba")
        kind, _, body = text.partition(":")
        kind = kind.strip()
        if kind == "right":
            a, b = body.split("*")
            return cls.right(alphabet.parse_letter(a.strip()), alphabet.parse_letter(b.strip()))
        if kind == "left":
            a, b = body.split("*")
            return cls.left(alphabet.parse_letter(a.strip()), alphabet.parse_letter(b.strip()))
        if kind == "perm":
            images = list(range(1, alphabet.rank + 1))
            for part in body.split(","):
                if not part.strip():
                    continue
                src, dst = (s.strip() for s in part.split("->"))
                a, b = alphabet.parse_letter(src), alphabet.parse_letter(dst)
                if a < 0:
                    a, b = -a, -b
                images[a - 1] = b
            return cls.permutation(images)
        raise ValueError(f"cannot parse move {text!r}")


def move_sequence(seq: Sequence[int], move: NielsenMove) -> tuple[int, ...]:
    """Sequence rule for a Nielsen move; raises if a type-2 move is inadmissible.

    For ``a -> a b`` the moved entry is ``a^-1 = a_i``.  When ``b = a_{i-1}^-1``
    (the move ``a_i -> a_{i-1} a_i``) it is reinserted immediately before
    ``a_{i-1}^-1``; when ``b = a_{i+1}^-1`` immediately after ``a_{i+1}^-1``.
    """
    if move.kind == "perm":
        return tuple(move.letter_image(a) for a in seq)
    a, b = move.pair
    seq = list(seq)
    i = seq.index(-a)
    if i > 0 and seq[i - 1] == -b:
        seq.pop(i)
        seq.insert(seq.index(b), -a)
    elif i + 1 < len(seq) and seq[i + 1] == -b:
        seq.pop(i)
        seq.insert(seq.index(b) + 1, -a)
    else:
        raise InadmissibleMove(f"move {a}->{a}{b} is not admissible for this set")
    return tuple(seq)


def image_set(T: SurfaceWordSet, e: Endomorphism) -> tuple[Word, tuple[CyclicWord, ...]]:
    return e(T.word), tuple(CyclicWord.of(e(c.word())) for c in T.cyclic)


def apply_nielsen(T: SurfaceWordSet, move: NielsenMove) -> tuple[SurfaceWordSet, tuple[int, ...]]:
    """Apply a move by direct image and by the sequence rule; they must agree."""
    seq = move_sequence(associated_sequence(T), move)
    by_rule = recover_set(seq, T.alphabet)
    word, cyclic = image_set(T, move.endomorphism(T.alphabet))
    direct = SurfaceWordSet.unchecked(word, cyclic)
    if direct != by_rule:
        raise AssertionError(
            f"sequence rule {by_rule} disagrees with direct image {direct}"
        )
    return by_rule, seq


def type1_generators(rank: int) -> list[NielsenMove]:
    """Adjacent generator swaps and the inversion of the first generator."""
    moves = []
    for j in range(1, rank):
        images = list(range(1, rank + 1))
        images[j - 1], images[j] = j + 1, j
        moves.append(NielsenMove.permutation(images))
    moves.append(NielsenMove.permutation([-1] + list(range(2, rank + 1))))
    return moves


def admissible_type2(seq: Sequence[int]) -> list[NielsenMove]:
    moves = []
    for i, ai in enumerate(seq):
        for j in (i - 1, i + 1):
            if 0 <= j < len(seq) and seq[j] != -ai:
                moves.append(NielsenMove.right(-ai, -seq[j]))
    return moves


def enumerate_nielsen_moves(T: SurfaceWordSet) -> list[NielsenMove]:
    moves = admissible_type2(associated_sequence(T)) + type1_generators(T.alphabet.rank)
    return sorted(set(moves), key=lambda m: m.format(T.alphabet))


def standard_surface_set(g: int, p: int) -> SurfaceWordSet:
    if (g, p) == (0, 0):
        raise ValueError("(g, p) = (0, 0) has no standard set")
    A = Alphabet.surface(g, p)
    cyclic = [CyclicWord.of(Word.generator(A, -A.t(k))) for k in range(1, p + 1)]
    return SurfaceWordSet.build(boundary_word(A), cyclic)


@dataclass(frozen=True)
class GroupoidMorphism:
    source: SurfaceWordSet
    target: SurfaceWordSet
    map: Endomorphism

    def __post_init__(self) -> None:
        word, cyclic = image_set(self.source, self.map)
        if SurfaceWordSet.unchecked(word, cyclic) != self.target:
            raise ValueError("source^map differs from target")

    def record(self) -> dict:
        return {
            "source": format_set(self.source.items()),
            "target": format_set(self.target.items()),
            "images": dict(self.map.table()),
        }


@dataclass(frozen=True)
class MCGElement:
    """Certified element of the mapping-class group of ``Sigma_{g,1,p}``.

    ``perm[k-1] = j`` records that ``tbar_k`` maps to a conjugate of ``tbar_j``.
    """

    map: Endomorphism
    perm: tuple[int, ...]
    provenance: tuple[str, ...] = field(default=(), compare=False)

    @property
    def alphabet(self) -> Alphabet:
        return self.map.alphabet

    @property
    def g(self) -> int:
        return self.alphabet.g

    @property
    def p(self) -> int:
        return self.alphabet.p

    def then(self, other: MCGElement) -> MCGElement:
        return MCGElement(
            self.map.then(other.map),
            tuple(other.perm[j - 1] for j in self.perm),
            self.provenance + other.provenance,
        )

    def inverse(self) -> MCGElement:
        inv = [0] * len(self.perm)
        for k, j in enumerate(self.perm, start=1):
            inv[j - 1] = k
        return MCGElement(
            self.map.inverse(), tuple(inv), tuple(invert_name(s) for s in reversed(self.provenance))
        )

    def is_identity(self) -> bool:
        return self.map.is_identity()

    def __call__(self, w: Word) -> Word:
        return self.map(w)


def verify_mcg_membership(e: Endomorphism, g: int, p: int) -> MCGElement:
    A = Alphabet.surface(g, p)
    if e.alphabet != A:
        raise AlphabetMismatch(f"map is over {e.alphabet}, expected {A}")
    if not e.is_automorphism():
        raise MembershipError(NOT_AUTOMORPHISM)
    zbar = boundary_word(A)
    if e(zbar) != zbar:
        raise MembershipError(BOUNDARY_MOVED, f"zbar_1 -> {e(zbar)}")
    perm = []
    for k in range(1, p + 1):
        image = e(Word.generator(A, -A.t(k)))
        match = [
            j for j in range(1, p + 1) if conjugate_eq(image, Word.generator(A, -A.t(j)))
        ]
        if not match:
            raise MembershipError(PUNCTURE_CLASS_BROKEN, f"tbar_{k} -> {image}")
        perm.append(match[0])
    if sorted(perm) != list(range(1, p + 1)):
        raise MembershipError(PUNCTURE_CLASS_BROKEN, "puncture classes not permuted")
    return MCGElement(e, tuple(perm))


# -- catalog ------------------------------------------------------------------

_GEN_RE = re.compile(r"([sSaAbB])([0-9]*)\Z")


def invert_name(name: str) -> str:
    return name.swapcase() if name[0].isalpha() else name


def catalog_names(g: int, p: int) -> list[str]:
    return (
        [f"s{i}" for i in range(1, p)]
        + [f"a{i}" for i in range(1, g + 1)]
        + [f"b{i}" for i in range(1, g + 1)]
    )


def _catalog_map(A: Alphabet, kind: str, i: int) -> Endomorphism:
    if kind == "s":
        return Endomorphism.from_mapping(
            A, {f"t{i}": f"t{i + 1}", f"t{i + 1}": f"T{i + 1} t{i} t{i + 1}"}
        )
    if kind == "a":
        return Endomorphism.from_mapping(A, {f"x{i}": f"Y{i} x{i}"})
    return Endomorphism.from_mapping(A, {f"y{i}": f"x{i} y{i}"})


def catalog_element(g: int, p: int, name: str) -> MCGElement:
    """Catalog generator by name: ``s<i>`` braids, ``a<i>``/``b<i>`` handle twists.

    Uppercase names are inverses; ``a``/``b`` abbreviate ``a1``/``b1``.
    """
    m = _GEN_RE.match(name)
    if not m:
        raise ValueError(f"unknown catalog generator {name!r}")
    letter, index = m.group(1), int(m.group(2) or 1)
    kind = letter.lower()
    limit = p - 1 if kind == "s" else g
    if not 1 <= index <= limit:
        raise ValueError(f"generator {name!r} does not exist for (g,p)=({g},{p})")
    A = Alphabet.surface(g, p)
    element = verify_mcg_membership(_catalog_map(A, kind, index), g, p)
    element = MCGElement(element.map, element.perm, (f"{kind}{index}",))
    return element.inverse() if letter.isupper() else element


def generator_catalog(g: int, p: int) -> list[MCGElement]:
    if (g, p) == (0, 0):
        raise ValueError("(g, p) = (0, 0) has no catalog")
    return [catalog_element(g, p, name) for name in catalog_names(g, p)]


def identity_element(g: int, p: int) -> MCGElement:
    A = Alphabet.surface(g, p)
    return MCGElement(Endomorphism.identity(A), tuple(range(1, p + 1)))


def element_from_word(g: int, p: int, names: Iterable[str]) -> MCGElement:
    result = identity_element(g, p)
    cache: dict[str, MCGElement] = {}
    for name in names:
        if name not in cache:
            cache[name] = catalog_element(g, p, name)
        result = result.then(cache[name])
    return result


def parse_element_word(text: str) -> list[str]:
    return [tok for tok in re.split(r"[\s,*]+", text.strip()) if tok and tok != "1"]


def random_word(g: int, p: int, length: int, rng: random.Random) -> list[str]:
    """Random freely reduced word in the catalog generators."""
    names = catalog_names(g, p)
    if not names:
        raise ValueError(f"catalog for (g,p)=({g},{p}) is empty")
    letters = names + [invert_name(n) for n in names]
    word: list[str] = []
    while len(word) < length:
        choice = rng.choice(letters)
        if word and word[-1] == invert_name(choice):
            continue
        word.append(choice)
    return word


def random_element(g: int, p: int, length: int, seed: int) -> MCGElement:
    word = random_word(g, p, length, random.Random(seed))
    return element_from_word(g, p, word)


# -- bounded factorization ----------------------------------------------------


def factor_bfs(m: GroupoidMorphism, depth_limit: int = 6) -> list[NielsenMove] | None:
    """Breadth-first search for Nielsen moves composing to ``m.map``.

    Moves are tried in lexicographic order of their serialization, so the
    result is deterministic.  ``None`` means nothing was found within the
    depth limit, which proves nothing.
    """
    A = m.source.alphabet
    start = Endomorphism.identity(A)
    goal = m.map.images
    seen = {start.images}
    queue = deque([(m.source, start, [])])
    while queue:
        T, acc, path = queue.popleft()
        if acc.images == goal and T == m.target:
            return path
        if len(path) >= depth_limit:
            continue
        for move in enumerate_nielsen_moves(T):
            nxt = acc.then(move.endomorphism(A))
            if nxt.images in seen:
                continue
            seen.add(nxt.images)
            T2, _ = apply_nielsen(T, move)
            queue.append((T2, nxt, path + [move]))
    return None


def compose_moves(alphabet: Alphabet, moves: Iterable[NielsenMove]) -> Endomorphism:
    acc = Endomorphism.identity(alphabet)
    for move in moves:
        acc = acc.then(move.endomorphism(alphabet))
    return acc


def sequence_rule_suite(samples: int, seed: int, max_rank: int = 5) -> SuiteReport:
    """The sequence rule against the direct image, on random sets and moves.

    Every ordering of the signed letters is the sequence of some surface word
    set, so random shuffles sample the sets uniformly.
    """
    report = SuiteReport("sequence rule vs direct image")
    rng = random.Random(seed)
    for _ in range(samples):
        rank = rng.randint(2, max_rank)
        A = Alphabet.free([chr(ord("a") + i) for i in range(rank)])
        seq = A.letters()
        rng.shuffle(seq)
        T = recover_set(seq, A)
        move = rng.choice(admissible_type2(seq) + type1_generators(rank))
        by_rule = recover_set(move_sequence(seq, move), A)
        word, cyclic = image_set(T, move.endomorphism(A))
        direct = SurfaceWordSet.unchecked(word, cyclic)
        report.check(direct == by_rule, f"{T} under {move.format(A)}: {by_rule} vs {direct}")
    return report
