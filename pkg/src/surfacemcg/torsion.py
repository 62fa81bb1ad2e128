"""Normal forms in the free product of the handle group with ``p`` cyclic
groups of order ``d``, and the induced map on mapping classes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .mccool import MCGElement
from .words import Alphabet, Word, boundary_word, free_reduce, invert_letters

# A syllable is a tuple of handle letters, or ("tau", k, e) for tau_k^e.
HandleSyllable = tuple[int, ...]
TorsionSyllable = tuple[str, int, int]
Syllable = Union[HandleSyllable, TorsionSyllable]


class TorsionMismatch(ValueError):
    pass


def _is_tau(s: Syllable) -> bool:
    return bool(s) and s[0] == "tau"


def _push(stack: list, item, d: int) -> None:
    """Push a handle letter (int) or torsion piece (k, e) onto a syllable stack."""
    if isinstance(item, int):
        if stack and not _is_tau(stack[-1]):
            top = stack.pop()
            merged = free_reduce(top + (item,))
            if merged:
                stack.append(merged)
        else:
            stack.append((item,))
        return
    k, e = item
    e %= d
    if e == 0:
        return
    if stack and _is_tau(stack[-1]) and stack[-1][1] == k:
        _, _, e0 = stack.pop()
        e = (e0 + e) % d
        if e:
            stack.append(("tau", k, e))
    else:
        stack.append(("tau", k, e))


@dataclass(frozen=True)
class TorsionWord:
    alphabet: Alphabet
    d: int
    syllables: tuple[Syllable, ...]

    @classmethod
    def from_pieces(cls, alphabet: Alphabet, d: int, pieces: Iterable) -> TorsionWord:
        if d < 2:
            raise ValueError("torsion order d must be at least 2")
        stack: list = []
        for piece in pieces:
            _push(stack, piece, d)
        return cls(alphabet, d, tuple(stack))

    def pieces(self) -> list:
        out: list = []
        for s in self.syllables:
            if _is_tau(s):
                out.append((s[1], s[2]))
            else:
                out.extend(s)
        return out

    def _check(self, other: TorsionWord) -> None:
        if other.d != self.d:
            raise TorsionMismatch(f"torsion orders differ: {self.d} vs {other.d}")
        if other.alphabet != self.alphabet:
            raise TorsionMismatch("alphabets differ")

    def __mul__(self, other: TorsionWord) -> TorsionWord:
        self._check(other)
        return TorsionWord.from_pieces(self.alphabet, self.d, self.pieces() + other.pieces())

    def inverse(self) -> TorsionWord:
        out: list = []
        for s in reversed(self.syllables):
            if _is_tau(s):
                out.append((s[1], -s[2]))
            else:
                out.extend(invert_letters(s))
        return TorsionWord.from_pieces(self.alphabet, self.d, out)

    def __pow__(self, k: int) -> TorsionWord:
        base = self if k >= 0 else self.inverse()
        return TorsionWord.from_pieces(self.alphabet, self.d, base.pieces() * abs(k))

    def is_identity(self) -> bool:
        return not self.syllables

    def __str__(self) -> str:
        if not self.syllables:
            return "1"
        parts = []
        for s in self.syllables:
            if _is_tau(s):
                parts.append(f"tau{s[1]}^{s[2]}")
            else:
                parts.append(" ".join(self.alphabet.letter_name(a) for a in s))
        return " . ".join(parts)

    def expand(self) -> tuple[int, ...]:
        """Letters of the word with each ``tau_k^e`` written as ``t_k^e``."""
        out: list[int] = []
        for s in self.syllables:
            if _is_tau(s):
                out.extend([self.alphabet.t(s[1])] * s[2])
            else:
                out.extend(s)
        return tuple(out)


def project(w: Word, d: int) -> TorsionWord:
    """Image of ``w`` in the quotient by the ``d``-th powers of the ``t_k``."""
    A = w.alphabet
    punct = A.puncture_letters()
    pieces = []
    for a in w.letters:
        if abs(a) in punct:
            k = int(A.names[abs(a) - 1][1:])
            pieces.append((k, 1 if a > 0 else -1))
        else:
            pieces.append(a)
    return TorsionWord.from_pieces(A, d, pieces)


def torsion_generator(alphabet: Alphabet, d: int, name: str) -> TorsionWord:
    if name.startswith("t"):
        return TorsionWord.from_pieces(alphabet, d, [(int(name[1:]), 1)])
    return TorsionWord.from_pieces(alphabet, d, [alphabet.names.index(name) + 1])


@dataclass(frozen=True)
class TorsionEndomorphism:
    """Images of ``x_i, y_i, tau_k`` (in roster order)."""

    alphabet: Alphabet
    d: int
    images: tuple[TorsionWord, ...]

    def __post_init__(self) -> None:
        for name, img in zip(self.alphabet.names, self.images):
            if img.d != self.d:
                raise TorsionMismatch("image has a different torsion order")
            if name.startswith("t") and not (img ** self.d).is_identity():
                raise ValueError(f"image of tau{name[1:]} does not have order dividing d")

    def __call__(self, w: TorsionWord) -> TorsionWord:
        if w.d != self.d:
            raise TorsionMismatch(f"torsion orders differ: {w.d} vs {self.d}")
        out: list = []
        A = self.alphabet
        for piece in w.pieces():
            if isinstance(piece, int):
                img = self.images[abs(piece) - 1]
                out.extend((img if piece > 0 else img.inverse()).pieces())
            else:
                k, e = piece
                out.extend((self.images[A.t(k) - 1] ** e).pieces())
        return TorsionWord.from_pieces(A, self.d, out)

    def then(self, other: TorsionEndomorphism) -> TorsionEndomorphism:
        return TorsionEndomorphism(self.alphabet, self.d, tuple(other(w) for w in self.images))

    def is_identity(self) -> bool:
        return all(
            img == torsion_generator(self.alphabet, self.d, name)
            for name, img in zip(self.alphabet.names, self.images)
        )

    def table(self) -> list[tuple[str, str]]:
        out = []
        for name, img in zip(self.alphabet.names, self.images):
            label = f"tau{name[1:]}" if name.startswith("t") else name
            out.append((label, str(img)))
        return out


def psi(m: MCGElement, d: int) -> TorsionEndomorphism:
    A = m.alphabet
    images = tuple(project(w, d) for w in m.map.images)
    e = TorsionEndomorphism(A, d, images)
    zbar = boundary_word(A)
    if e(project(zbar, d)) != project(zbar, d):
        raise AssertionError("psi does not fix the boundary word")
    for k in range(1, A.p + 1):
        image = m.map(Word.generator(A, -A.t(k)))
        s, core = image.cyclic_decomposition()
        j = m.perm[k - 1]
        if core.letters != (-A.t(j),):
            raise AssertionError(f"image of tbar_{k} is not a conjugate of tbar_{j}")
        lhs = e(project(Word.generator(A, -A.t(k)), d))
        rhs = project(s, d) * project(Word.generator(A, -A.t(j)), d) * project(s.inverse(), d)
        if lhs != rhs:
            raise AssertionError("psi breaks a puncture class")
    return e


def is_identity_torsion(e: TorsionEndomorphism) -> bool:
    return e.is_identity()
