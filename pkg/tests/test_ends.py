"""Eventually periodic ends and the order a surface word set puts on them."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from surfacemcg.ends import (
    EQUAL,
    GREATER,
    LESS,
    End,
    OrderContext,
    apply_aut_to_end,
    canonicalize,
    compare,
    end_with_prefix,
    in_shadow,
    is_t_squarefree_end,
    lemma_rep_suite,
    minmax_suite,
    order_preservation_suite,
    orbit_closed_form,
    random_end,
    random_reduced,
    shadow_max,
    shadow_min,
    t_squarefree_theorem_suite,
)
from surfacemcg.mccool import NielsenMove, catalog_element, generator_catalog, random_element
from surfacemcg.whitehead import associated_sequence, format_sequence, parse_surface_set
from surfacemcg.words import Alphabet, Endomorphism, Word, boundary_inverse, boundary_word, free_reduce

F4 = Alphabet.free("abcd")
a, b, c, d = 1, 2, 3, 4
T_F4 = parse_surface_set("aDBc [Ab] [Cd]", F4)


def end(text: str, alphabet: Alphabet = F4) -> End:
    return End.parse(text, alphabet)


def naive_compare(e: End, f: End, ctx: OrderContext, depth: int = 400) -> str:
    """Walk both ends letter by letter and rank the first disagreement directly."""
    seq = list(ctx.seq)
    last = None
    for x, y in zip(e.take(depth), f.take(depth)):
        if x != y:
            if last is None:
                order = seq
            else:
                i = seq.index(-last)
                order = seq[i + 1 :] + seq[: i + 1]
            return LESS if order.index(x) < order.index(y) else GREATER
        last = x
    return EQUAL


class TestCanonicalForm:
    def test_absorbs_trailing_period(self):
        assert end("a b c ~ (b c)") == end("a ~ (b c)")

    def test_primitive_root(self):
        assert end("1 ~ (a b a b)") == end("1 ~ (a b)")

    def test_cancels_into_period(self):
        A = Alphabet.surface(1, 1)
        e = canonicalize(A.word("x1 t1"), A.word("T1 y1"))
        assert str(e) == "x1 ~ (y1 T1)"

    def test_conjugated_period(self):
        # (b a B)^inf = b a^inf
        assert end("1 ~ (b a B)") == end("b ~ (a)")

    def test_rotation(self):
        assert end("a ~ (b a)") == end("1 ~ (a b)")

    def test_empty_period(self):
        with pytest.raises(ValueError):
            canonicalize(F4.word("a"), Word(F4, ()))

    def test_parse_round_trip(self):
        rng = random.Random(1)
        for _ in range(100):
            e = random_end(F4, rng)
            assert end(str(e)) == e

    @settings(max_examples=80)
    @given(st.integers(0, 2**31))
    def test_same_letter_stream(self, seed):
        rng = random.Random(seed)
        prefix = Word(F4, random_reduced(F4, rng.randint(0, 5), rng))
        period = Word(F4, random_reduced(F4, rng.randint(1, 4), rng))
        e = canonicalize(prefix, period)
        # canonical forms describe the same limit as the raw reduced stream
        n = 30
        raw = free_reduce(prefix.letters + period.letters * (n + 10))
        assert e.take(n) == raw[:n]


class TestCompare:
    ctx = OrderContext.of(T_F4)

    def test_sequence(self):
        assert format_sequence(self.ctx.seq, F4) == "a,b,c,d,B,A,D,C"

    def test_reflexive(self):
        e = end("a ~ (b)")
        assert compare(e, e, self.ctx) == EQUAL

    def test_first_letter_follows_sequence(self):
        assert compare(end("a ~ (b)"), end("b ~ (a)"), self.ctx) == LESS
        assert compare(end("C ~ (b)"), end("B ~ (a)"), self.ctx) == GREATER

    def test_extremes(self):
        assert str(shadow_min(self.ctx, Word(F4, ()))) == "1 ~ (a D B c)"
        assert str(shadow_max(self.ctx, Word(F4, ()))) == "1 ~ (C b d A)"

    def test_long_common_prefix(self):
        e, f = end("a b a b a b a ~ (c)"), end("1 ~ (a b)")
        assert compare(e, f, self.ctx) == naive_compare(e, f, self.ctx)

    def test_alphabet_mismatch(self):
        A = Alphabet.free("abc")
        with pytest.raises(Exception):
            compare(end("1 ~ (a)", A), end("1 ~ (a)"), self.ctx)

    @settings(max_examples=150)
    @given(st.integers(0, 2**31))
    def test_matches_naive_walk(self, seed):
        rng = random.Random(seed)
        e, f = random_end(F4, rng), random_end(F4, rng)
        if rng.random() < 0.3:
            f = e.left_multiply(Word(F4, ())) if rng.random() < 0.5 else canonicalize(
                Word(F4, e.prefix + e.period[:1]), Word(F4, e.period[1:] + e.period[:1])
            )
        assert compare(e, f, self.ctx) == naive_compare(e, f, self.ctx)

    @settings(max_examples=100)
    @given(st.integers(0, 2**31))
    def test_strict_total_order(self, seed):
        rng = random.Random(seed)
        e, f, g = (random_end(F4, rng) for _ in range(3))
        flip = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}
        assert compare(f, e, self.ctx) == flip[compare(e, f, self.ctx)]
        if compare(e, f, self.ctx) == LESS and compare(f, g, self.ctx) == LESS:
            assert compare(e, g, self.ctx) == LESS

    @pytest.mark.parametrize("u", ["a", "a b", "D c", "B A D", "c c"])
    def test_shadow_extremes_bound_the_shadow(self, u):
        w = F4.word(u)
        lo, hi = shadow_min(self.ctx, w), shadow_max(self.ctx, w)
        assert in_shadow(lo, w) and in_shadow(hi, w)
        rng = random.Random(len(u))
        for _ in range(40):
            e = end_with_prefix(w, rng)
            assert compare(lo, e, self.ctx) != GREATER
            assert compare(e, hi, self.ctx) != GREATER


class TestSurfaceExtremes:
    @pytest.mark.parametrize("g,p", [(0, 3), (1, 1), (1, 2), (2, 0), (2, 2)])
    def test_boundary_ends(self, g, p):
        ctx = OrderContext.standard(g, p)
        A = ctx.alphabet
        assert shadow_min(ctx, Word(A, ())) == End.periodic(boundary_word(A))
        assert shadow_max(ctx, Word(A, ())) == End.periodic(boundary_inverse(A))


class TestAction:
    def test_identity(self):
        rng = random.Random(2)
        ident = Endomorphism.identity(F4)
        for _ in range(30):
            e = random_end(F4, rng)
            assert apply_aut_to_end(ident, e) == e

    @pytest.mark.parametrize("g,p", [(0, 3), (1, 1), (1, 2)])
    def test_boundary_end_fixed(self, g, p):
        A = Alphabet.surface(g, p)
        zbar_inf = End.periodic(boundary_word(A))
        for m in generator_catalog(g, p):
            assert apply_aut_to_end(m, zbar_inf) == zbar_inf

    def test_braid_moves_puncture_end(self):
        A = Alphabet.surface(0, 2)
        s1 = catalog_element(0, 2, "s1")
        assert apply_aut_to_end(s1, End.periodic(A.word("t1"))) == End.periodic(A.word("t2"))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31))
    def test_limit_of_prefixes(self, seed):
        rng = random.Random(seed)
        m = random_element(1, 2, rng.randint(1, 4), rng.randrange(2**31))
        A = m.map.alphabet
        e = random_end(A, rng)
        image = apply_aut_to_end(m, e)
        n = 12
        k = n + 5 * (len(e.prefix) + 1)
        approx = m(Word(A, e.prefix + e.period * k))
        assert approx.letters[:n] == image.take(n)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31))
    def test_functorial(self, seed):
        rng = random.Random(seed)
        m1 = random_element(0, 3, rng.randint(0, 4), rng.randrange(2**31))
        m2 = random_element(0, 3, rng.randint(0, 4), rng.randrange(2**31))
        e = random_end(m1.map.alphabet, rng)
        assert apply_aut_to_end(m1.then(m2), e) == apply_aut_to_end(m2, apply_aut_to_end(m1, e))


class TestMoveTables:
    """How c -> b c acts on word suffixes and on end shadows for the F4 set.

    In the sequence a,b,c,d,B,A,D,C the letter b sits just before c, so the
    move is the admissible one with a_{i-1} = b and a_i = c.
    """

    move = NielsenMove.left(c, b)
    phi = move.endomorphism(F4)

    def test_move_is_admissible(self):
        seq = associated_sequence(T_F4)
        assert seq.index(b) + 1 == seq.index(c)

    @staticmethod
    def ends_in(w: tuple[int, ...], suffix: tuple[int, ...]) -> bool:
        return len(w) >= len(suffix) and w[len(w) - len(suffix) :] == suffix

    @pytest.mark.parametrize(
        "source,excluded,target",
        [
            ((-c, b), None, (-c,)),
            ((b,), (-c, b), (b,)),
            ((c,), None, (c,)),
            ((-b,), None, (-b,)),
            ((-c,), None, (-c, -b)),
            ((a,), None, (a,)),
            ((-a,), None, (-a,)),
            ((d,), None, (d,)),
            ((-d,), None, (-d,)),
        ],
    )
    def test_word_suffixes(self, source, excluded, target):
        rng = random.Random(hash(source) & 0xFFFF)
        hits = 0
        for _ in range(400):
            w = random_reduced(F4, rng.randint(1, 8), rng)
            if not self.ends_in(w, source) or (excluded and self.ends_in(w, excluded)):
                continue
            hits += 1
            assert self.ends_in(self.phi(Word(F4, w)).letters, target), w
        assert hits > 5

    @pytest.mark.parametrize(
        "source,excluded,target,target_excluded",
        [
            ((b,), None, (b,), (b, c)),
            ((c,), None, (b, c), None),
            ((a,), None, (a,), None),
            ((d,), None, (d,), None),
            ((-b, c), None, (c,), None),
            ((-b,), (-b, c), (-b,), None),
            ((-c,), None, (-c,), None),
        ],
    )
    def test_end_shadows(self, source, excluded, target, target_excluded):
        rng = random.Random(sum(source))
        for _ in range(60):
            e = end_with_prefix(Word(F4, source), rng)
            if excluded and in_shadow(e, Word(F4, excluded)):
                continue
            image = apply_aut_to_end(self.phi, e)
            assert in_shadow(image, Word(F4, target)), (str(e), str(image))
            if target_excluded:
                assert not in_shadow(image, Word(F4, target_excluded)), (str(e), str(image))


class TestSquarefreeEnds:
    def test_examples(self):
        A = Alphabet.surface(1, 2)
        assert is_t_squarefree_end(End.parse("x1 ~ (t1 y1)", A))
        assert not is_t_squarefree_end(End.parse("x1 ~ (t1)", A))
        assert not is_t_squarefree_end(End.parse("t2 t2 ~ (x1)", A))

    @pytest.mark.parametrize("g,p", [(0, 2), (1, 1), (2, 3)])
    def test_boundary_end(self, g, p):
        A = Alphabet.surface(g, p)
        assert is_t_squarefree_end(End.periodic(boundary_word(A)))


class TestSuites:
    @pytest.mark.parametrize("g,p", [(0, 3), (1, 2), (2, 1)])
    def test_minmax(self, g, p):
        report = minmax_suite(g, p, 60, seed=3)
        assert report.ok, report.failures

    @pytest.mark.parametrize("g,p", [(0, 2), (0, 3), (1, 1), (1, 2), (2, 2)])
    def test_shadow_lemma(self, g, p):
        report = lemma_rep_suite(g, p, 25, seed=4)
        assert report.ok, report.failures

    def test_shadow_lemma_needs_puncture(self):
        with pytest.raises(ValueError):
            lemma_rep_suite(1, 0, 5, seed=1)

    def test_order_preservation(self):
        report = order_preservation_suite(80, seed=5)
        assert report.ok, report.failures

    @pytest.mark.parametrize("g,p", [(0, 2), (0, 4), (1, 2)])
    def test_t_squarefree_images(self, g, p):
        report = t_squarefree_theorem_suite(g, p, 20, seed=6)
        assert report.ok, report.failures

    def test_braid_orbit(self):
        orbit, closed = orbit_closed_form(4)
        assert orbit == closed
