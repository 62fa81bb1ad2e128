"""Eventually periodic ends of a free group and the order they inherit from a
surface word set."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import islice
from typing import Iterator

from .mccool import (
    MCGElement,
    NielsenMove,
    admissible_type2,
    apply_nielsen,
    catalog_element,
    random_element,
    standard_surface_set,
    type1_generators,
)
from .reports import SuiteReport
from .whitehead import SurfaceWordSet, associated_sequence, recover_set
from .words import (
    Alphabet,
    AlphabetMismatch,
    Endomorphism,
    Word,
    boundary_inverse,
    boundary_word,
    free_reduce,
    is_t_squarefree,
    reduce,
)

LESS, EQUAL, GREATER = "<", "=", ">"


def _primitive_root(letters: tuple[int, ...]) -> tuple[int, ...]:
    n = len(letters)
    for d in range(1, n + 1):
        if n % d == 0 and letters[:d] * (n // d) == letters:
            return letters[:d]
    return letters


@dataclass(frozen=True)
class End:
    """The end ``prefix period period ...``, kept in canonical form.

    Build through :func:`canonicalize`; two ends are equal exactly when their
    canonical forms coincide.
    """

    alphabet: Alphabet
    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def letters(self) -> Iterator[int]:
        yield from self.prefix
        while True:
            yield from self.period

    def take(self, n: int) -> tuple[int, ...]:
        return tuple(islice(self.letters(), n))

    def left_multiply(self, w: Word) -> End:
        """The end ``w e``."""
        return canonicalize(Word(self.alphabet, free_reduce(w.letters + self.prefix)), Word(self.alphabet, self.period))

    def format(self) -> str:
        name = self.alphabet.letter_name
        prefix = " ".join(name(a) for a in self.prefix) or "1"
        return f"{prefix} ~ ({' '.join(name(a) for a in self.period)})"

    __str__ = format

    @classmethod
    def parse(cls, text: str, alphabet: Alphabet) -> End:
        m = re.fullmatch(r"\s*(.*?)\s*~\s*\((.*)\)\s*", text)
        if not m:
            raise ValueError(f"expected `prefix ~ (period)`, got {text!r}")
        return canonicalize(Word.parse(m.group(1) or "1", alphabet), Word.parse(m.group(2), alphabet))

    @classmethod
    def periodic(cls, w: Word) -> End:
        """The end ``w^infinity``."""
        return canonicalize(Word(w.alphabet, ()), w)


def canonicalize(prefix: Word, period: Word) -> End:
    if prefix.alphabet != period.alphabet:
        raise AlphabetMismatch("prefix and period use different alphabets")
    A = period.alphabet
    if not period:
        raise ValueError("the period of an end must be nontrivial")
    s, core = period.cyclic_decomposition()
    pre = list((prefix * s).letters)
    per = list(_primitive_root(core.letters))
    while pre and pre[-1] == -per[0]:
        pre.pop()
        per = per[1:] + per[:1]
    while pre and pre[-1] == per[-1]:
        pre.pop()
        per = per[-1:] + per[:-1]
    return End(A, tuple(pre), tuple(per))


@dataclass(frozen=True)
class OrderContext:
    """The order on ends determined by a surface word set ``T``."""

    T: SurfaceWordSet
    seq: tuple[int, ...]

    @classmethod
    def of(cls, T: SurfaceWordSet) -> OrderContext:
        return cls(T, associated_sequence(T))

    @classmethod
    def standard(cls, g: int, p: int) -> OrderContext:
        return cls.of(standard_surface_set(g, p))

    @property
    def alphabet(self) -> Alphabet:
        return self.T.alphabet

    @property
    def position(self) -> dict[int, int]:
        return {a: i for i, a in enumerate(self.seq, start=1)}

    def child_rank(self, last: int | None, letter: int) -> int:
        """Rank of ``letter`` among the children of a word ending in ``last``."""
        pos = self.position
        if last is None:
            return pos[letter]
        return (pos[letter] - pos[-last] - 1) % len(self.seq)

    def next_min(self, last: int) -> int:
        pos = self.position
        return self.seq[pos[-last] % len(self.seq)]

    def next_max(self, last: int) -> int:
        pos = self.position
        return self.seq[(pos[-last] - 2) % len(self.seq)]


def compare(e: End, f: End, ctx: OrderContext) -> str:
    if e.alphabet != f.alphabet or e.alphabet != ctx.alphabet:
        raise AlphabetMismatch("ends and order use different alphabets")
    if e == f:
        return EQUAL
    lp, lq = len(e.period), len(f.period)
    bound = len(e.prefix) + len(f.prefix) + lp * lq + max(lp, lq)
    last = None
    for b, c in islice(zip(e.letters(), f.letters()), bound):
        if b != c:
            return LESS if ctx.child_rank(last, b) < ctx.child_rank(last, c) else GREATER
        last = b
    raise AssertionError("distinct canonical ends agreed past the divergence bound")


def _shadow_extreme(ctx: OrderContext, u: Word, step) -> End:
    A = ctx.alphabet
    letters = list(u.letters)
    if not letters:
        letters.append(ctx.seq[0] if step == ctx.next_min else ctx.seq[-1])
    seen: dict[int, int] = {}
    while letters[-1] not in seen:
        seen[letters[-1]] = len(letters) - 1
        letters.append(step(letters[-1]))
    start = seen[letters[-1]]
    body = letters[: len(letters) - 1]
    return canonicalize(Word(A, tuple(body[: start + 1])), Word(A, tuple(body[start + 1 :] + [body[start]])))


def shadow_min(ctx: OrderContext, u: Word) -> End:
    """Smallest end beginning with ``u``."""
    return _shadow_extreme(ctx, u, ctx.next_min)


def shadow_max(ctx: OrderContext, u: Word) -> End:
    """Largest end beginning with ``u``."""
    return _shadow_extreme(ctx, u, ctx.next_max)


def in_shadow(e: End, u: Word) -> bool:
    return e.take(len(u)) == u.letters


def apply_aut_to_end(m: MCGElement | Endomorphism, e: End) -> End:
    phi = m.map if isinstance(m, MCGElement) else m
    image = phi(Word(e.alphabet, e.period))
    s, v = image.cyclic_decomposition()
    return canonicalize(phi(Word(e.alphabet, e.prefix)) * s, v)


def is_t_squarefree_end(e: End) -> bool:
    window = Word(e.alphabet, free_reduce(e.prefix + e.period * 3))
    return is_t_squarefree(window)


def random_reduced(alphabet: Alphabet, length: int, rng: random.Random, avoid_first: int | None = None) -> tuple[int, ...]:
    letters = alphabet.letters()
    out: list[int] = []
    while len(out) < length:
        a = rng.choice(letters)
        if out and a == -out[-1]:
            continue
        if not out and avoid_first is not None and a == -avoid_first:
            continue
        out.append(a)
    return tuple(out)


def random_end(alphabet: Alphabet, rng: random.Random, max_prefix: int = 6, max_period: int = 4) -> End:
    prefix = Word(alphabet, random_reduced(alphabet, rng.randint(0, max_prefix), rng))
    while True:
        period = reduce(alphabet, random_reduced(alphabet, rng.randint(1, max_period), rng))
        if period:
            return canonicalize(prefix, period)


def end_with_prefix(u: Word, rng: random.Random, tail: int = 4, max_period: int = 3) -> End:
    """A random end of the shadow of ``u`` (``u`` reduced)."""
    A = u.alphabet
    last = u.letters[-1] if u.letters else None
    rest = random_reduced(A, tail, rng, avoid_first=last)
    while True:
        period = random_reduced(A, rng.randint(1, max_period), rng, avoid_first=(rest or u.letters or (None,))[-1])
        w = Word(A, free_reduce(u.letters + rest))
        e = canonicalize(w, Word(A, period)) if reduce(A, period) else None
        if e is not None and in_shadow(e, u):
            return e


# -- suites -------------------------------------------------------------------


def _le(e: End, f: End, ctx: OrderContext) -> bool:
    return compare(e, f, ctx) != GREATER


def _lt(e: End, f: End, ctx: OrderContext) -> bool:
    return compare(e, f, ctx) == LESS


def minmax_suite(g: int, p: int, samples: int, seed: int) -> SuiteReport:
    """``zbar^inf`` is below and ``z^inf`` above every sampled end."""
    report = SuiteReport(f"min/max ({g},{p})")
    ctx = OrderContext.standard(g, p)
    A = ctx.alphabet
    low, high = End.periodic(boundary_word(A)), End.periodic(boundary_inverse(A))
    report.check(shadow_min(ctx, Word(A, ())) == low, "min of all ends is not zbar^inf")
    report.check(shadow_max(ctx, Word(A, ())) == high, "max of all ends is not z^inf")
    rng = random.Random(seed)
    for _ in range(samples):
        e = random_end(A, rng)
        report.check(_le(low, e, ctx) and _le(e, high, ctx), f"{e} outside [zbar^inf, z^inf]")
    return report


def lemma_rep_cases(g: int, p: int, samples: int, seed: int) -> list[tuple[int, Word, int]]:
    """``(k0, w, i0)`` with ``w`` not ending in ``t_k0^{+-1}``; the first cases use ``w = 1``."""
    A = Alphabet.surface(g, p)
    rng = random.Random(seed)
    cases = [(k, Word(A, ()), 1) for k in range(1, p + 1)]
    while len(cases) < samples:
        k0 = rng.randint(1, p)
        letters = random_reduced(A, rng.randint(1, 6), rng)
        if abs(letters[-1]) == A.t(k0):
            continue
        cases.append((k0, Word(A, letters), rng.randint(1, max(g, 1))))
    return cases[:samples]


def lemma_rep_suite(g: int, p: int, samples: int, seed: int) -> SuiteReport:
    """Every part of the shadow-interval lemma, checked on random ``(k0, w, i0)``."""
    report = SuiteReport(f"shadow-interval lemma ({g},{p})")
    if p < 1:
        raise ValueError("the lemma needs at least one puncture")
    ctx = OrderContext.standard(g, p)
    A = ctx.alphabet
    zbar_inf = End.periodic(boundary_word(A))
    z_inf = End.periodic(boundary_inverse(A))
    rng = random.Random(seed + 1)
    for k0, w, i0 in lemma_rep_cases(g, p, samples, seed):
        tk = Word.generator(A, A.t(k0))
        tag = f"k0={k0} w={w}"
        low = zbar_inf.left_multiply(w * tk * w.inverse())
        high = z_inf.left_multiply(w * tk.inverse() * w.inverse())
        up, down = w * tk * tk, w * tk.inverse() * tk.inverse()
        # (i)
        handles = Word(A, boundary_word(A).letters[: 4 * g])
        rotated = Word(A, tuple(A.t(k) for k in range(k0, p + 1))) * handles * Word(
            A, tuple(A.t(k) for k in range(1, k0))
        )
        closed_min = End.periodic(rotated).left_multiply(w * tk)
        report.check(closed_min == shadow_min(ctx, up), f"(i) closed form of min shadow, {tag}")
        report.check(_le(low, closed_min, ctx), f"(i) {tag}")
        # (ii)
        report.check(_lt(shadow_max(ctx, up), shadow_min(ctx, down), ctx), f"(ii) {tag}")
        # (iii)
        tail = Word(A, tuple(-A.t(k) for k in range(p, k0, -1)))
        rotated = Word(A, tuple(-A.t(k) for k in range(k0, 0, -1))) * Word(
            A, boundary_inverse(A).letters[p:]
        ) * tail
        closed_max = End.periodic(rotated).left_multiply(w * tk.inverse())
        report.check(closed_max == shadow_max(ctx, down), f"(iii) closed form of max shadow, {tag}")
        report.check(_le(closed_max, high, ctx), f"(iii) {tag}")
        # (iv)
        for u in (up, down):
            e = end_with_prefix(u, rng)
            report.check(_le(low, e, ctx) and _le(e, high, ctx), f"(iv) {e} escapes, {tag}")
        # (v)
        if 2 * g + p >= 3:
            e5 = zbar_inf.left_multiply(Word.generator(A, -A.t(p)))
            report.check(_lt(high, e5, ctx) or _lt(e5, low, ctx), f"(v) {tag}")
        # (vi)
        if g >= 1:
            for a in (A.x(i0), -A.x(i0), A.y(i0), -A.y(i0)):
                e6 = z_inf.left_multiply(Word.generator(A, a))
                report.check(_lt(high, e6, ctx) or _lt(e6, low, ctx), f"(vi) a={A.letter_name(a)} {tag}")
    return report


def random_surface_set(alphabet: Alphabet, rng: random.Random) -> SurfaceWordSet:
    """Every ordering of the signed letters is the sequence of a surface word set."""
    seq = alphabet.letters()
    rng.shuffle(seq)
    return recover_set(seq, alphabet)


def random_move(T: SurfaceWordSet, rng: random.Random) -> NielsenMove:
    seq = associated_sequence(T)
    pool = admissible_type2(seq) + type1_generators(T.alphabet.rank)
    return rng.choice(pool)


def order_preservation_suite(samples: int, seed: int, rank: int = 4, max_moves: int = 4) -> SuiteReport:
    """Nielsen moves carry ``<_T1`` to ``<_T2`` for random sets, moves and end pairs."""
    report = SuiteReport("order preservation")
    A = Alphabet.free([chr(ord("a") + i) for i in range(rank)])
    rng = random.Random(seed)
    for case in range(samples):
        T1 = random_surface_set(A, rng)
        T = T1
        phi = Endomorphism.identity(A)
        for _ in range(1 if case % 2 == 0 else rng.randint(1, max_moves)):
            move = random_move(T, rng)
            T, _ = apply_nielsen(T, move)
            phi = phi.then(move.endomorphism(A))
        ctx1, ctx2 = OrderContext.of(T1), OrderContext.of(T)
        e, f = random_end(A, rng), random_end(A, rng)
        verdict = compare(e, f, ctx1)
        if verdict == EQUAL:
            report.check(apply_aut_to_end(phi, e) == apply_aut_to_end(phi, f), f"{e}: image not equal")
            continue
        if verdict == GREATER:
            e, f = f, e
        ee, ff = apply_aut_to_end(phi, e), apply_aut_to_end(phi, f)
        report.check(compare(ee, ff, ctx2) == LESS, f"T1={T1} e={e} f={f} images {ee} {ff}")
    return report


def orbit_closed_form(m_max: int = 5) -> tuple[set[str], set[str]]:
    """The orbit of ``t2`` under the (0,2) braid and its closed form, as word strings."""
    A = Alphabet.surface(0, 2)
    t1, t2 = Word.parse("t1", A), Word.parse("t2", A)
    c = t1 * t2
    closed = {str(t.conjugate_by(c ** m)) for m in range(-m_max, m_max + 1) for t in (t1, t2)}
    s = catalog_element(0, 2, "s1")
    s_inv = s.inverse()
    # s^(2m) t2 = t2^(c^m) and s^(2m-1) t2 = t1^(c^m): exponents -2m_max-1 .. 2m_max
    orbit = {str(t2)}
    w = t2
    for _ in range(2 * m_max):
        w = s(w)
        orbit.add(str(w))
    w = t2
    for _ in range(2 * m_max + 1):
        w = s_inv(w)
        orbit.add(str(w))
    return orbit, closed


def t_squarefree_theorem_suite(g: int, p: int, samples: int, seed: int, max_length: int = 8) -> SuiteReport:
    report = SuiteReport(f"t-squarefree images ({g},{p})")
    A = Alphabet.surface(g, p)
    rng = random.Random(seed)
    z_inf = End.periodic(boundary_inverse(A))
    zbar_inf = End.periodic(boundary_word(A))
    for case in range(samples):
        phi = random_element(g, p, rng.randint(1, max_length), seed * 100003 + case)
        for i, img in enumerate(phi.map.images, start=1):
            report.check(is_t_squarefree(img), f"{A.names[i - 1]} -> {img} via {phi.provenance}")
        if 2 * g + p >= 3:
            if p:
                e = zbar_inf.left_multiply(phi(Word.generator(A, -A.t(p))))
                report.check(is_t_squarefree_end(e), f"tbar_p end {e} via {phi.provenance}")
            for i0 in range(1, g + 1):
                for a in (A.x(i0), -A.x(i0), A.y(i0), -A.y(i0)):
                    e = z_inf.left_multiply(phi(Word.generator(A, a)))
                    report.check(is_t_squarefree_end(e), f"{A.letter_name(a)} end {e} via {phi.provenance}")
    if (g, p) == (0, 2):
        orbit, closed = orbit_closed_form()
        report.check(orbit == closed, "(0,2) orbit of t2 differs from its closed form")
    return report
