"""Restriction to an invariant cover and elimination of the lifted punctures."""

import pytest

from surfacemcg.covers import AdaptedBasis, FiniteQuotientSpec, build_coset_graph, deck_data
from surfacemcg.embedding import (
    EmbeddingError,
    NotInvariant,
    build_context,
    check_normal_closure_lemma,
    commutative_square_suite,
    common_order,
    eliminate_punctures,
    embed,
    homomorphism_suite,
    injectivity_suite,
    kill_punctures,
    restrict,
)
from surfacemcg.fixtures import example1_spec, example2_basis, fixture_basis, fixture_spec
from surfacemcg.mccool import catalog_element, element_from_word, identity_element
from surfacemcg.words import Alphabet, Endomorphism, Word, conjugate_eq


def context(name: str):
    return build_context(fixture_spec(name), fixture_basis(name))


@pytest.fixture(scope="module")
def ctx2():
    return context("paper-2")


def basis_word(ctx, text: str) -> Word:
    return Word.parse(text, ctx.basis.alphabet)


def conj(ctx, base: str, by: str) -> Word:
    return basis_word(ctx, base).conjugate_by(basis_word(ctx, by))


# Example-2 tables over the basis letters x1, y1 (handles) and z1..z3 (the three
# lifted boundary loops, printed as t-hats in the worked example).
def alpha_hat_table(ctx) -> dict[str, Word]:
    return {
        "x1": basis_word(ctx, "Y1 x1 y1 z2 z3 Z2 Y1"),
        "y1": basis_word(ctx, "y1"),
        "z1": conj(ctx, "z3", "Z2 Y1 X1 Y1 x1 y1 z2 z3 Z2"),
        "z2": basis_word(ctx, "z2"),
        "z3": conj(ctx, "z1", "z2 z3"),
    }


def beta_hat_table(ctx, printed: bool = False) -> dict[str, Word]:
    # The printed conjugator of z1 has y1 where Y1 is needed (fifth letter).
    fifth = "y1" if printed else "Y1"
    return {
        "x1": basis_word(ctx, "x1"),
        "y1": basis_word(ctx, "x1 y1 z2"),
        "z1": conj(ctx, "z1", f"Y1 X1 y1 Z2 {fifth} x1 y1 z2"),
        "z2": basis_word(ctx, "z3"),
        "z3": conj(ctx, "z2", "Y1 x1 y1 z2 z3"),
    }


class TestExampleTables:
    @pytest.mark.parametrize("gen,table", [("a1", alpha_hat_table), ("b1", beta_hat_table)])
    def test_tables_by_expansion(self, ctx2, gen, table):
        # each entry expands to the image of the matching basis word
        m = catalog_element(1, 0, gen)
        basis = ctx2.basis
        for name, entry in table(ctx2).items():
            assert basis.expand(entry) == m(basis.word(name)), name

    def test_printed_beta_entry_is_only_conjugate(self, ctx2):
        basis = ctx2.basis
        printed = beta_hat_table(ctx2, printed=True)["z1"]
        true_image = catalog_element(1, 0, "b1")(basis.word("z1"))
        assert basis.expand(printed) != true_image
        assert conjugate_eq(basis.expand(printed), true_image)

    def test_restrict_alpha(self, ctx2):
        e = restrict(ctx2, catalog_element(1, 0, "a1"))
        assert dict(zip(ctx2.basis.names, e.images)) == alpha_hat_table(ctx2)

    def test_restrict_beta(self, ctx2):
        e = restrict(ctx2, catalog_element(1, 0, "b1"))
        assert dict(zip(ctx2.basis.names, e.images)) == beta_hat_table(ctx2)

    def test_embed_alpha_printed(self, ctx2):
        image = embed(ctx2, catalog_element(1, 0, "a1"))
        assert image.map.table() == [
            ("x1", "Y1 x1 y1 t2 t3 T2 Y1"),
            ("y1", "y1"),
            ("t1", "t2 T3 T2 Y1 X1 y1 x1 y1 t2 t3 T2 Y1 X1 Y1 x1 y1 t2 t3 T2"),
            ("t2", "t2"),
            ("t3", "T3 T2 t1 t2 t3"),
        ]

    def test_embed_beta_printed(self, ctx2):
        image = embed(ctx2, catalog_element(1, 0, "b1"))
        assert image.map.table() == [
            ("x1", "x1"),
            ("y1", "x1 y1 t2"),
            ("t1", "T2 Y1 X1 y1 t2 Y1 x1 y1 t1 Y1 X1 y1 T2 Y1 x1 y1 t2"),
            ("t2", "t3"),
            ("t3", "T3 T2 Y1 X1 y1 t2 Y1 x1 y1 t2 t3"),
        ]

    def test_target_type(self, ctx2):
        assert (ctx2.target.g, ctx2.target.p) == (1, 3)
        assert ctx2.d is None

    def test_nothing_to_kill(self, ctx2):
        # with q = 0, elimination only renames z_l to t_l
        e = restrict(ctx2, catalog_element(1, 0, "a1"))
        image = eliminate_punctures(ctx2, e)
        assert [len(w) for w in image.map.images] == [len(w) for w in e.images]

    def test_identity(self, ctx2):
        assert restrict(ctx2, identity_element(1, 0)).is_identity()
        assert embed(ctx2, identity_element(1, 0)).is_identity()

    def test_torus_braid_relation(self, ctx2):
        aba = embed(ctx2, element_from_word(1, 0, ["a1", "b1", "a1"]))
        bab = embed(ctx2, element_from_word(1, 0, ["b1", "a1", "b1"]))
        assert aba.map == bab.map


@pytest.fixture(scope="module")
def ctx1():
    return context("paper-1-odd")


class TestExampleOne:
    def test_lands_in_closed_torus(self, ctx1):
        assert (ctx1.target.g, ctx1.target.p) == (1, 0)

    def test_braid_images(self, ctx1):
        s1 = embed(ctx1, catalog_element(0, 3, "s1"))
        s2 = embed(ctx1, catalog_element(0, 3, "s2"))
        assert s1.map.table() == [("x1", "x1"), ("y1", "x1 y1")]
        assert s2.map.table() == [("x1", "Y1"), ("y1", "y1 x1 y1")]
        assert not s1.is_identity()

    def test_braid_relation(self, ctx1):
        s1 = embed(ctx1, catalog_element(0, 3, "s1"))
        s2 = embed(ctx1, catalog_element(0, 3, "s2"))
        assert s1.then(s2).then(s1).map == s2.then(s1).then(s2).map

    def test_kill_substitution(self):
        ctx = context("paper-3a")
        assert str(kill_punctures(ctx, basis_word(ctx, "t1 y1 T1"))) == "y1"
        assert str(kill_punctures(ctx, basis_word(ctx, "z2 t5"))) == "t2"


class TestConfiguration:
    def test_excluded_triple(self):
        spec = example1_spec(2)
        basis = fixture_basis("paper-1-even", 2)
        with pytest.raises(EmbeddingError, match="excluded"):
            build_context(spec, basis)

    def test_orders_must_agree(self):
        A = Alphabet.surface(0, 2)
        graph = build_coset_graph(FiniteQuotientSpec.from_cycles(A, 3, {"t1": "(1 2)", "t2": "(1 2 3)"}))
        with pytest.raises(EmbeddingError, match=r"punctures \[1\].*punctures \[2\]"):
            common_order(deck_data(graph))

    def test_puncture_inside_subgroup(self):
        A = Alphabet.surface(0, 2)
        graph = build_coset_graph(FiniteQuotientSpec.from_cycles(A, 2, {"t1": "(1 2)", "t2": "(1 2)"}))
        assert common_order(deck_data(graph)) == 2
        graph = build_coset_graph(FiniteQuotientSpec.from_cycles(Alphabet.surface(1, 1), 2, {"x1": "(1 2)"}))
        with pytest.raises(EmbeddingError, match="d = 1"):
            common_order(deck_data(graph))

    def test_not_invariant(self):
        A = Alphabet.surface(1, 1)
        spec = FiniteQuotientSpec.from_cycles(A, 2, {"x1": "(1 2)", "t1": "(1 2)"})
        basis = AdaptedBasis(A, ("x1",), (A.word("x1 x1"),))
        with pytest.raises(NotInvariant):
            build_context(spec, basis)


class TestNormalClosure:
    @pytest.mark.parametrize("name", ["paper-1-odd", "paper-3a"])
    def test_fixtures(self, name):
        report = check_normal_closure_lemma(context(name), max_length=3)
        assert report.ok, report.failures[:3]
        assert report.samples > 0 and not report.vacuous

    def test_vacuous_without_punctures(self, ctx2):
        report = check_normal_closure_lemma(ctx2)
        assert report.vacuous and report.ok


class TestSuites:
    def test_injectivity_with_cover(self):
        ctx = context("paper-3b")
        report = injectivity_suite(1, 1, 2, 25, seed=5, ctx=ctx)
        assert report.ok, report.failures

    def test_homomorphism(self):
        report = homomorphism_suite(context("paper-3a"), 15, seed=6)
        assert report.ok, report.failures

    @pytest.mark.parametrize("g,p,d", [(0, 3, 2), (1, 2, 3), (2, 1, 4)])
    def test_commutative_square(self, g, p, d):
        report = commutative_square_suite(g, p, d, 40, seed=7)
        assert report.ok, report.failures


def test_restrict_is_automorphism(ctx2):
    e = restrict(ctx2, element_from_word(1, 0, ["a1", "B1", "a1"]))
    assert isinstance(e, Endomorphism) and e.is_automorphism()
