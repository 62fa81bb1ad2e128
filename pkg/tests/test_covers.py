"""Coset graphs, deck data and adapted bases of the bundled covers."""

import pytest
from hypothesis import given, settings, strategies as st

from surfacemcg.covers import (
    AdaptedBasis,
    FiniteQuotientSpec,
    NotInSubgroup,
    build_coset_graph,
    deck_data,
    format_cycles,
    is_invariant,
    membership,
    membership_oracle_suite,
    parse_cycles,
    perm_inv,
    perm_mul,
    rewrite_in_basis,
    rewrite_roundtrip_suite,
    same_based_graph,
    schreier_basis,
    verify_adapted_basis,
)
from surfacemcg.fixtures import EXAMPLE_SPECS, example1_spec, example2_basis, fixture_basis, fixture_spec
from surfacemcg.folding import fold_wedge
from surfacemcg.mccool import generator_catalog
from surfacemcg.words import Alphabet, Word, reduce

GRAPHS = {name: build_coset_graph(fixture_spec(name)) for name in EXAMPLE_SPECS}


def example1_graph(p: int):
    return build_coset_graph(example1_spec(p))


class TestPermutations:
    def test_cycle_round_trip(self):
        perm = parse_cycles("(1 3 2)(4 5)", 6)
        assert format_cycles(perm) == "(1 3 2)(4 5)"

    def test_product_applies_left_first(self):
        p, q = parse_cycles("(1 2)", 3), parse_cycles("(2 3)", 3)
        # 1 -> 2 under p, then 2 -> 3 under q
        assert perm_mul(p, q)[0] == 2

    @given(st.permutations(range(6)))
    def test_inverse(self, perm):
        perm = tuple(perm)
        assert perm_mul(perm, perm_inv(perm)) == tuple(range(6))

    def test_spec_file_round_trip(self):
        spec = fixture_spec("paper-3b")
        assert FiniteQuotientSpec.parse(spec.format()) == spec

    def test_spec_file_infers_alphabet(self):
        spec = FiniteQuotientSpec.parse("degree 2\nt1: (1 2)\nt2: (1 2)\nt3: (1 2)\n")
        assert spec == example1_spec(3)

    def test_spec_needs_degree(self):
        with pytest.raises(ValueError):
            FiniteQuotientSpec.parse("t1: (1 2)\n")

    def test_non_permutation_rejected(self):
        A = Alphabet.surface(0, 1)
        with pytest.raises(ValueError):
            FiniteQuotientSpec(A, 2, ((0, 0),))


class TestCosetGraph:
    @pytest.mark.parametrize("name,m", [("paper-1-odd", 2), ("paper-2", 4), ("paper-3a", 8), ("paper-3b", 8)])
    def test_order(self, name, m):
        assert GRAPHS[name].m == m

    def test_example1_membership(self):
        graph = GRAPHS["paper-1-odd"]
        A = graph.alphabet
        assert membership(graph, Word.identity(A))
        assert membership(graph, A.word("t1 t2"))
        assert not membership(graph, A.word("t1"))

    def test_example1_listed_basis_generates(self):
        # t1^2, t1 t_k, t1 T_k for k >= 2
        for p in (2, 3, 4, 5):
            graph = example1_graph(p)
            A = graph.alphabet
            words = [A.word("t1 t1")]
            words += [A.word(f"t1 t{k}") for k in range(2, p + 1)]
            words += [A.word(f"t1 T{k}") for k in range(2, p + 1)]
            assert all(membership(graph, w) for w in words)
            assert len(words) == 2 * p - 1
            assert same_based_graph(fold_wedge([w.letters for w in words], A.rank), graph)

    def test_example2_membership(self):
        graph = GRAPHS["paper-2"]
        assert membership(graph, graph.alphabet.word("x1 x1"))

    @pytest.mark.parametrize("name,rank", [("paper-1-odd", 5), ("paper-2", 5), ("paper-3a", 17), ("paper-3b", 17)])
    def test_schreier_rank(self, name, rank):
        graph = GRAPHS[name]
        basis = schreier_basis(graph)
        n = graph.alphabet.rank
        assert len(basis) == rank == graph.m * (n - 1) + 1
        assert all(membership(graph, w) for w in basis)
        assert same_based_graph(fold_wedge([w.letters for w in basis], n), graph)

    @pytest.mark.parametrize("name", sorted(EXAMPLE_SPECS))
    def test_membership_oracle(self, name):
        report = membership_oracle_suite(fixture_spec(name), 150, seed=3)
        assert report.ok, report.failures


class TestInvariance:
    def test_example1_braids(self):
        graph = example1_graph(3)
        assert all(is_invariant(graph, m) for m in generator_catalog(0, 3))

    def test_example2_generators(self):
        graph = GRAPHS["paper-2"]
        assert all(is_invariant(graph, m) for m in generator_catalog(1, 0))

    def test_lopsided_kernel(self):
        A = Alphabet.surface(0, 2)
        graph = build_coset_graph(FiniteQuotientSpec.from_cycles(A, 2, {"t1": "(1 2)"}))
        assert not is_invariant(graph, generator_catalog(0, 2)[0])

    @pytest.mark.parametrize("name", ["paper-3a", "paper-3b"])
    def test_example3(self, name):
        graph = GRAPHS[name]
        A = graph.alphabet
        assert all(is_invariant(graph, m) for m in generator_catalog(A.g, A.p))


class TestDeckData:
    @pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
    def test_example1(self, p):
        data = deck_data(example1_graph(p))
        if p % 2 == 0:
            assert (data.b, data.q, data.g_prime) == (2, p, (p - 2) // 2)
        else:
            assert (data.b, data.q, data.g_prime) == (1, p, (p - 1) // 2)
        assert data.d == (2,) * p and data.rank == 2 * p - 1

    def test_example2(self):
        data = deck_data(GRAPHS["paper-2"])
        assert (data.m, data.c, data.b, data.q, data.g_prime, data.rank) == (4, 1, 4, 0, 1, 5)

    def test_example3a(self):
        data = deck_data(GRAPHS["paper-3a"])
        assert (data.c, data.b, data.q, data.g_prime, data.rank) == (2, 4, 12, 1, 17)
        assert data.d == (2, 2, 2) and data.m_k == (4, 4, 4)

    def test_example3b(self):
        data = deck_data(GRAPHS["paper-3b"])
        assert (data.c, data.b, data.q, data.g_prime, data.rank) == (2, 4, 4, 5, 17)

    @pytest.mark.parametrize("name", sorted(EXAMPLE_SPECS))
    def test_identities(self, name):
        graph = GRAPHS[name]
        data = deck_data(graph)
        n = graph.alphabet.rank
        assert data.m == data.b * data.c
        assert data.q == sum(data.m // d for d in data.d)
        assert 2 * data.g_prime + data.b - 1 + data.q == data.m * (n - 1) + 1
        assert all(d >= 2 for d in data.d)
        assert len(data.boundary_reps) == data.b - 1
        assert [len(r) for r in data.puncture_reps] == list(data.m_k)


class TestAdaptedBasis:
    def test_example2_basis(self):
        report = verify_adapted_basis(GRAPHS["paper-2"], example2_basis())
        assert report.ok, report.notes

    def test_example2_words(self):
        basis = example2_basis()
        assert str(basis.word("x1")) == "x1 x1" and str(basis.word("y1")) == "y1 y1"
        assert str(basis.word("z2")) == "Y1 Y1 X1 y1 x1 y1"

    @pytest.mark.parametrize("name", ["paper-1-odd", "paper-1-even", "paper-3a", "paper-3b"])
    def test_bundled_bases(self, name):
        report = verify_adapted_basis(GRAPHS[name], fixture_basis(name))
        assert report.ok, report.notes

    @pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
    def test_example1_bases(self, p):
        name = "paper-1-even" if p % 2 == 0 else "paper-1-odd"
        report = verify_adapted_basis(example1_graph(p), fixture_basis(name, p))
        assert report.ok, report.notes

    def test_squared_word_fails_generation(self):
        basis = example2_basis()
        words = list(basis.words)
        words[0] = words[0] ** 2
        bad = AdaptedBasis(basis.source, basis.names, tuple(words))
        report = verify_adapted_basis(GRAPHS["paper-2"], bad)
        assert not report.checks["generation"]
        assert not report.ok

    def test_swapped_roles_fail(self):
        basis = fixture_basis("paper-3a")
        names = list(basis.names)
        i, j = names.index("z1"), names.index("t1")
        words = list(basis.words)
        words[i], words[j] = words[j], words[i]
        report = verify_adapted_basis(GRAPHS["paper-3a"], AdaptedBasis(basis.source, basis.names, tuple(words)))
        assert not report.ok

    def test_file_round_trip(self):
        basis = fixture_basis("paper-3b")
        assert AdaptedBasis.parse(basis.format(), basis.source) == basis

    def test_names_must_be_ordered(self):
        A = Alphabet.surface(1, 0)
        with pytest.raises(ValueError):
            AdaptedBasis(A, ("y1", "x1"), (A.word("y1 y1"), A.word("x1 x1")))

    def test_example1_parity_guard(self):
        with pytest.raises(ValueError):
            fixture_spec("paper-1-odd", 4)


class TestRewrite:
    def test_basis_word(self):
        basis = example2_basis()
        assert str(rewrite_in_basis(basis, basis.word("x1"))) == "x1"

    def test_alpha_image_of_xhat(self):
        basis = example2_basis()
        A = basis.source
        w = A.word("Y1 x1 Y1 x1")
        out = rewrite_in_basis(basis, w)
        assert str(out) == "Y1 x1 y1 z2 z3 Z2 Y1"
        assert basis.expand(out) == w

    def test_beta_image_of_yhat(self):
        basis = example2_basis()
        w = basis.source.word("x1 y1 x1 y1")
        out = rewrite_in_basis(basis, w)
        assert str(out) == "x1 y1 z2"
        assert basis.expand(out) == w

    def test_outside(self):
        basis = example2_basis()
        with pytest.raises(NotInSubgroup):
            rewrite_in_basis(basis, basis.source.word("x1"))

    @pytest.mark.parametrize("name", sorted(EXAMPLE_SPECS))
    def test_round_trip(self, name):
        report = rewrite_roundtrip_suite(GRAPHS[name], fixture_basis(name), 150, seed=4)
        assert report.ok, report.failures

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(-17, 17).filter(bool), max_size=8))
    def test_expand_then_rewrite(self, letters):
        basis = fixture_basis("paper-3a")
        w = reduce(basis.alphabet, letters)
        assert rewrite_in_basis(basis, basis.expand(w)) == w
