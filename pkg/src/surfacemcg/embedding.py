"""Restriction of mapping classes to an invariant finite-index subgroup and
the induced map after killing the lifted punctures."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .covers import (
    BOUNDARY,
    AdaptedBasis,
    CosetGraph,
    DeckData,
    FiniteQuotientSpec,
    build_coset_graph,
    deck_data,
    is_invariant,
    rewrite_in_basis,
    target_alphabet,
)
from .mccool import MCGElement, generator_catalog, random_element, verify_mcg_membership
from .reports import SuiteReport
from .torsion import project, psi
from .words import HANDLE_X, HANDLE_Y, PUNCTURE, Alphabet, Endomorphism, Word, conjugate_eq, reduce


class EmbeddingError(ValueError):
    pass


class NotInvariant(EmbeddingError):
    pass


@dataclass(frozen=True)
class EmbeddingContext:
    spec: FiniteQuotientSpec
    graph: CosetGraph
    data: DeckData
    basis: AdaptedBasis
    d: int | None
    target: Alphabet

    @property
    def source(self) -> tuple[int, int]:
        A = self.spec.alphabet
        return A.g, A.p


def common_order(data: DeckData) -> int | None:
    """The shared order ``d`` of the puncture images (``None`` without punctures)."""
    if not data.d:
        return None
    groups: dict[int, list[int]] = {}
    for k, d in enumerate(data.d, start=1):
        groups.setdefault(d, []).append(k)
    if len(groups) > 1:
        detail = "; ".join(f"d={d} at punctures {ks}" for d, ks in sorted(groups.items()))
        raise EmbeddingError(f"puncture orders differ ({detail})")
    d = data.d[0]
    if d < 2:
        raise EmbeddingError("punctures lie in H (d = 1): they are not branching points")
    return d


def build_context(
    spec: FiniteQuotientSpec, basis: AdaptedBasis, check_invariance: bool = True
) -> EmbeddingContext:
    A = spec.alphabet
    graph = build_coset_graph(spec)
    data = deck_data(graph)
    d = common_order(data)
    if (A.g, A.p, d) == (0, 2, 2):
        raise EmbeddingError("(g, p, d) = (0, 2, 2) is excluded: injectivity fails there")
    if check_invariance and (A.g, A.p) != (0, 0):
        for m in generator_catalog(A.g, A.p):
            if not is_invariant(graph, m):
                raise NotInvariant(f"H is not invariant under {m.provenance[0]}")
    return EmbeddingContext(spec, graph, data, basis, d, target_alphabet(basis))


def restrict(ctx: EmbeddingContext, m: MCGElement) -> Endomorphism:
    """The automorphism of ``H`` induced by ``m``, over the basis letters."""
    if not is_invariant(ctx.graph, m):
        raise NotInvariant("H is not invariant under this element")
    basis = ctx.basis
    images = tuple(rewrite_in_basis(basis, m(w)) for w in basis.words)
    return Endomorphism(basis.alphabet, images)


def _kill_map(ctx: EmbeddingContext) -> dict[int, int | None]:
    """Basis letter -> target letter, ``None`` for the lifted punctures."""
    basis, T = ctx.basis, ctx.target
    out: dict[int, int | None] = {}
    for i, name in enumerate(basis.names, start=1):
        role = basis.alphabet.roles[i - 1]
        index = int(name[1:])
        if role == HANDLE_X:
            out[i] = T.x(index)
        elif role == HANDLE_Y:
            out[i] = T.y(index)
        elif role == BOUNDARY:
            out[i] = T.t(index)
        else:
            out[i] = None
    return out


def kill_punctures(ctx: EmbeddingContext, w: Word) -> Word:
    """Substitute ``that -> 1`` and ``zhat_l -> t_l`` in a basis word."""
    table = _kill_map(ctx)
    letters = []
    for a in w.letters:
        b = table[abs(a)]
        if b is not None:
            letters.append(b if a > 0 else -b)
    return reduce(ctx.target, letters)


def eliminate_punctures(ctx: EmbeddingContext, e: Endomorphism) -> MCGElement:
    basis = ctx.basis
    table = _kill_map(ctx)
    images: list[Word] = [Word(ctx.target, ())] * ctx.target.rank
    for i in range(1, basis.alphabet.rank + 1):
        b = table[i]
        if b is not None:
            images[b - 1] = kill_punctures(ctx, e.images[i - 1])
    result = Endomorphism(ctx.target, tuple(images))
    return verify_mcg_membership(result, ctx.target.g, ctx.target.p)


def embed(ctx: EmbeddingContext, m: MCGElement) -> MCGElement:
    image = eliminate_punctures(ctx, restrict(ctx, m))
    return MCGElement(image.map, image.perm, m.provenance)


@dataclass
class ClosureReport:
    conjugators: int = 0
    samples: int = 0
    failures: list[str] = field(default_factory=list)
    vacuous: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures


def reduced_words(alphabet: Alphabet, max_length: int):
    """All reduced words of length at most ``max_length``, shortest first."""
    letters = alphabet.letters()
    yield Word(alphabet, ())
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(max_length):
        frontier = [w + (a,) for w in frontier for a in letters if not w or w[-1] != -a]
        for w in frontier:
            yield Word(alphabet, w)


def check_normal_closure_lemma(ctx: EmbeddingContext, max_length: int = 4) -> ClosureReport:
    """Both containments between the normal closures of ``t_k^d`` and of the ``that_j``.

    Each ``that_j`` must be conjugate to some ``t_k^d``; every conjugate
    ``(t_k^d)^w`` with ``|w| <= max_length`` must die once the ``that`` are killed.
    """
    report = ClosureReport()
    basis = ctx.basis
    A = ctx.spec.alphabet
    lifted = basis.role_names(PUNCTURE)
    if not lifted:
        report.vacuous = True
        return report
    powers = [Word.generator(A, A.t(k)) ** ctx.d for k in range(1, A.p + 1)]
    for name in lifted:
        if not any(conjugate_eq(basis.word(name), pw) for pw in powers):
            report.failures.append(f"{name} is not conjugate to any t_k^d")
    for w, (k, pw) in itertools.product(reduced_words(A, max_length), enumerate(powers, 1)):
        report.samples += 1
        killed = kill_punctures(ctx, rewrite_in_basis(basis, pw.conjugate_by(w)))
        if killed:
            report.failures.append(f"(t{k}^{ctx.d})^({w}) survives as {killed}")
    report.conjugators = report.samples // len(powers)
    return report


def embed_table(e: MCGElement) -> list[tuple[str, str]]:
    return e.map.table()


def random_nonidentity(g: int, p: int, rng: random.Random, max_length: int = 6) -> MCGElement:
    while True:
        m = random_element(g, p, rng.randint(1, max_length), rng.randrange(2**32))
        if not m.is_identity():
            return m


def injectivity_suite(
    g: int, p: int, d: int, samples: int, seed: int, ctx: EmbeddingContext | None = None
) -> SuiteReport:
    """Nonidentity elements stay nonidentity under psi and, given a cover, under embed."""
    name = f"injectivity ({g},{p}) d={d}" + (" with cover" if ctx else "")
    report = SuiteReport(name)
    rng = random.Random(seed)
    for _ in range(samples):
        m = random_nonidentity(g, p, rng)
        report.check(not psi(m, d).is_identity(), f"psi kills {' '.join(m.provenance)}")
        if ctx is not None:
            report.check(not embed(ctx, m).is_identity(), f"embed kills {' '.join(m.provenance)}")
    return report


def homomorphism_suite(ctx: EmbeddingContext, samples: int, seed: int) -> SuiteReport:
    g, p = ctx.source
    report = SuiteReport(f"embed is multiplicative ({g},{p})")
    rng = random.Random(seed)
    for _ in range(samples):
        m1, m2 = random_nonidentity(g, p, rng), random_nonidentity(g, p, rng)
        lhs = embed(ctx, m1.then(m2))
        rhs = embed(ctx, m1).then(embed(ctx, m2))
        report.check(lhs.map == rhs.map, f"{m1.provenance} then {m2.provenance}")
    return report


def commutative_square_suite(g: int, p: int, d: int, samples: int, seed: int) -> SuiteReport:
    """Projecting to the torsion quotient commutes with the action."""
    report = SuiteReport(f"torsion square ({g},{p}) d={d}")
    A = Alphabet.surface(g, p)
    rng = random.Random(seed)
    letters = A.letters()
    for _ in range(samples):
        m = random_nonidentity(g, p, rng)
        w = reduce(A, [rng.choice(letters) for _ in range(rng.randint(0, 8))])
        report.check(project(m(w), d) == psi(m, d)(project(w, d)), f"{m.provenance} on {w}")
    return report
