"""Free-group arithmetic over named alphabets.

Letters are nonzero integers: ``+i`` is the ``i``-th roster generator
(1-based) and ``-i`` its inverse.  Words are stored freely reduced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

HANDLE_X = "handle-x"
HANDLE_Y = "handle-y"
PUNCTURE = "puncture"
GENERIC = "generic"

_NAME_RE = re.compile(r"[a-z][0-9]*\Z")
_TOKEN_RE = re.compile(r"\s*([A-Za-z][0-9]*)(?:\^(-?[0-9]+))?\s*")


class AlphabetMismatch(ValueError):
    """Raised when words over different alphabets are combined."""


class WordSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Ordered generator roster with role tags.

    Surface alphabets list ``x1..xg, y1..yg, t1..tp``; generic alphabets
    (used for examples in ``F_4 = <a, b, c, d>``) carry the ``generic`` role.
    """

    names: tuple[str, ...]
    roles: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.names) != len(self.roles):
            raise ValueError("names and roles differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        for name in self.names:
            if not _NAME_RE.match(name):
                raise ValueError(f"bad generator name {name!r}")

    @classmethod
    def surface(cls, g: int, p: int) -> Alphabet:
        if g < 0 or p < 0:
            raise ValueError("g and p must be nonnegative")
        names = (
            tuple(f"x{i}" for i in range(1, g + 1))
            + tuple(f"y{i}" for i in range(1, g + 1))
            + tuple(f"t{k}" for k in range(1, p + 1))
        )
        roles = (HANDLE_X,) * g + (HANDLE_Y,) * g + (PUNCTURE,) * p
        return cls(names, roles)

    @classmethod
    def free(cls, names: Iterable[str]) -> Alphabet:
        names = tuple(names)
        return cls(names, (GENERIC,) * len(names))

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def g(self) -> int:
        return self.roles.count(HANDLE_X)

    @property
    def p(self) -> int:
        return self.roles.count(PUNCTURE)

    @property
    def is_surface(self) -> bool:
        return GENERIC not in self.roles and self == Alphabet.surface(self.g, self.p)

    def x(self, i: int) -> int:
        return self.names.index(f"x{i}") + 1

    def y(self, i: int) -> int:
        return self.names.index(f"y{i}") + 1

    def t(self, k: int) -> int:
        return self.names.index(f"t{k}") + 1

    def puncture_letters(self) -> frozenset[int]:
        return frozenset(
            i + 1 for i, role in enumerate(self.roles) if role == PUNCTURE
        )

    def letters(self) -> list[int]:
        """All signed letters in the fixed total order used for rotations."""
        return sorted(
            (s * i for i in range(1, self.rank + 1) for s in (1, -1)),
            key=letter_key,
        )

    def letter_name(self, letter: int) -> str:
        name = self.names[abs(letter) - 1]
        return name if letter > 0 else name[0].upper() + name[1:]

    def parse_letter(self, token: str) -> int:
        lower = token[0].lower() + token[1:]
        try:
            index = self.names.index(lower) + 1
        except ValueError:
            raise AlphabetMismatch(
                f"letter {token!r} is not in the alphabet {self.names}"
            ) from None
        return index if token[0].islower() else -index

    def word(self, text: str) -> Word:
        return Word.parse(text, self)

    def __str__(self) -> str:
        return " ".join(self.names)


def letter_key(letter: int) -> int:
    """Order x_1 < x_1^-1 < x_2 < ... along the roster."""
    return 2 * (abs(letter) - 1) + (letter < 0)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


def invert_letters(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-a for a in reversed(letters))


def tokenize(text: str) -> list[tuple[str, int]]:
    """Split word text into ``(token, exponent)`` pairs."""
    stripped = text.strip()
    if stripped in ("", "1"):
        return []
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise WordSyntaxError(f"cannot parse {text!r} at position {pos}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) else 1))
        pos = m.end()
    return out


@dataclass(frozen=True)
class Word:
    alphabet: Alphabet
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.alphabet.rank
        for i, a in enumerate(self.letters):
            if a == 0 or abs(a) > n:
                raise ValueError(f"letter {a} outside alphabet of rank {n}")
            if i and self.letters[i - 1] == -a:
                raise ValueError("Word letters must be freely reduced; use reduce()")

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> Word:
        letters: list[int] = []
        for token, exponent in tokenize(text):
            a = alphabet.parse_letter(token)
            letters.extend([a if exponent > 0 else -a] * abs(exponent))
        return reduce(alphabet, letters)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> Word:
        return cls(alphabet, ())

    @classmethod
    def generator(cls, alphabet: Alphabet, letter: int) -> Word:
        return cls(alphabet, (letter,))

    def _check(self, other: Word) -> None:
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch(
                f"alphabets differ: {self.alphabet} vs {other.alphabet}"
            )

    def __mul__(self, other: Word) -> Word:
        self._check(other)
        return reduce(self.alphabet, self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else self.inverse()
        return reduce(self.alphabet, base.letters * abs(k))

    def inverse(self) -> Word:
        return Word(self.alphabet, invert_letters(self.letters))

    def conjugate_by(self, c: Word) -> Word:
        """Exponent notation ``self^c = c^-1 self c``."""
        return c.inverse() * self * c

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(self.alphabet.letter_name(a) for a in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def cyclic_decomposition(self) -> tuple[Word, Word]:
        """Return ``(s, v)`` with ``self = s v s^-1`` and ``v`` cyclically reduced."""
        w = self.letters
        i, j = 0, len(w) - 1
        while i < j and w[i] == -w[j]:
            i += 1
            j -= 1
        return Word(self.alphabet, w[:i]), Word(self.alphabet, w[i : j + 1])

    def ends_with(self, letter: int) -> bool:
        return bool(self.letters) and self.letters[-1] == letter


def reduce(alphabet: Alphabet, letters: Iterable[int]) -> Word:
    """Freely reduce a raw letter sequence."""
    return Word(alphabet, free_reduce(letters))


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a^-1 b^-1 a b``."""
    return a.inverse() * b.inverse() * a * b


def canonical_rotation(letters: Sequence[int]) -> tuple[int, ...]:
    if not letters:
        return ()
    keys = [letter_key(a) for a in letters]
    n = len(letters)
    best = min(range(n), key=lambda i: keys[i:] + keys[:i])
    return tuple(letters[best:]) + tuple(letters[:best])


@dataclass(frozen=True)
class CyclicWord:
    """Conjugacy class of a word, stored at its canonical rotation."""

    alphabet: Alphabet
    letters: tuple[int, ...]

    @classmethod
    def of(cls, w: Word) -> CyclicWord:
        _, core = w.cyclic_decomposition()
        return cls(w.alphabet, canonical_rotation(core.letters))

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> CyclicWord:
        return cls.of(Word.parse(text, alphabet))

    def __post_init__(self) -> None:
        if canonical_rotation(self.letters) != self.letters:
            raise ValueError("CyclicWord must be built with CyclicWord.of")
        if len(self.letters) > 1 and self.letters[0] == -self.letters[-1]:
            raise ValueError("CyclicWord letters must be cyclically reduced")

    def word(self) -> Word:
        return Word(self.alphabet, self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return f"[{self.word()}]"


def conjugate_eq(u: Word, v: Word) -> bool:
    u._check(v)
    return CyclicWord.of(u) == CyclicWord.of(v)


def is_t_squarefree(w: Word) -> bool:
    punct = w.alphabet.puncture_letters()
    return not any(
        a == b and abs(a) in punct for a, b in zip(w.letters, w.letters[1:])
    )


def boundary_word(alphabet: Alphabet) -> Word:
    """``zbar_1 = prod [x_i, y_i] * t_1 ... t_p``."""
    g, p = alphabet.g, alphabet.p
    w = Word.identity(alphabet)
    for i in range(1, g + 1):
        w = w * commutator(
            Word.generator(alphabet, alphabet.x(i)), Word.generator(alphabet, alphabet.y(i))
        )
    for k in range(1, p + 1):
        w = w * Word.generator(alphabet, alphabet.t(k))
    return w


def boundary_inverse(alphabet: Alphabet) -> Word:
    """``z_1 = tbar_p ... tbar_1 * prod_{i=g..1} [y_i, x_i]``."""
    g, p = alphabet.g, alphabet.p
    w = Word.identity(alphabet)
    for k in range(p, 0, -1):
        w = w * Word.generator(alphabet, -alphabet.t(k))
    for i in range(g, 0, -1):
        w = w * commutator(
            Word.generator(alphabet, alphabet.y(i)), Word.generator(alphabet, alphabet.x(i))
        )
    return w


@dataclass(frozen=True)
class Endomorphism:
    """Endomorphism given by generator images; acts on the right.

    ``e.then(f)`` is the composite ``w -> (w^e)^f``, matching exponent
    notation ``w^{ef}``.
    """

    alphabet: Alphabet
    images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.alphabet.rank:
            raise ValueError("need one image per generator")
        for w in self.images:
            if w.alphabet != self.alphabet:
                raise AlphabetMismatch("image over a different alphabet")

    @classmethod
    def identity(cls, alphabet: Alphabet) -> Endomorphism:
        return cls(
            alphabet,
            tuple(Word.generator(alphabet, i) for i in range(1, alphabet.rank + 1)),
        )

    @classmethod
    def from_mapping(
        cls, alphabet: Alphabet, mapping: Mapping[str, str | Word]
    ) -> Endomorphism:
        """Images by generator name; unspecified generators are fixed."""
        images = list(cls.identity(alphabet).images)
        for name, image in mapping.items():
            letter = alphabet.parse_letter(name)
            w = image if isinstance(image, Word) else Word.parse(image, alphabet)
            if letter < 0:
                letter, w = -letter, w.inverse()
            images[letter - 1] = w
        return cls(alphabet, tuple(images))

    def image_of_letter(self, a: int) -> tuple[int, ...]:
        w = self.images[abs(a) - 1].letters
        return w if a > 0 else invert_letters(w)

    def apply_letters(self, letters: Iterable[int]) -> tuple[int, ...]:
        stack: list[int] = []
        for a in letters:
            for b in self.image_of_letter(a):
                if stack and stack[-1] == -b:
                    stack.pop()
                else:
                    stack.append(b)
        return tuple(stack)

    def __call__(self, w: Word) -> Word:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch(f"word over {w.alphabet}, map over {self.alphabet}")
        return Word(self.alphabet, self.apply_letters(w.letters))

    def then(self, other: Endomorphism) -> Endomorphism:
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch("cannot compose maps over different alphabets")
        return Endomorphism(self.alphabet, tuple(other(w) for w in self.images))

    def is_identity(self) -> bool:
        return all(w.letters == (i,) for i, w in enumerate(self.images, start=1))

    def is_automorphism(self) -> bool:
        from .folding import fold_wedge

        graph = fold_wedge([w.letters for w in self.images], self.alphabet.rank)
        return graph.is_rose(self.alphabet.rank)

    def inverse(self) -> Endomorphism:
        from .folding import fold_wedge

        n = self.alphabet.rank
        graph = fold_wedge([w.letters for w in self.images], n)
        if not graph.is_rose(n):
            raise ValueError("not an automorphism")
        return Endomorphism(
            self.alphabet,
            tuple(Word(self.alphabet, graph.edge(0, i)[1]) for i in range(1, n + 1)),
        )

    def table(self) -> list[tuple[str, str]]:
        return [(name, str(w)) for name, w in zip(self.alphabet.names, self.images)]

    def __str__(self) -> str:
        return ", ".join(f"{a} -> {w}" for a, w in self.table())


def apply_endomorphism(e: Endomorphism, w: Word) -> Word:
    return e(w)


def is_automorphism(e: Endomorphism) -> bool:
    return e.is_automorphism()


def invert_automorphism(e: Endomorphism) -> Endomorphism:
    return e.inverse()
