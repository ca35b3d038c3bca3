from fractions import Fraction

import pytest
from hypothesis import given, settings

from Fas_Lab.backend.constructions import (
    c4_arrow,
    oriented_complete_bipartite,
    random_oriented_graph,
    random_tournament,
)
from Fas_Lab.backend.discrepancy import (
    bfree_fas,
    disjoint_witness,
    extend_ordering,
    find_biased_pair,
    ordering_from_biased_pair,
    prefix_cut_witness,
    sample_edge_difference,
)
from Fas_Lab.backend.errors import GraphFormatError, PreconditionError
from Fas_Lab.backend.exact_oracle import ExactBudget, tau_exact, tau_star_exact
from Fas_Lab.backend.graph_core import VertexOrdering, surplus, verify_fas, witness_from_sets

from .conftest import oriented_digraphs


class TestWitnessConversions:
    def test_disjoint_witness_of_transitive_triangle(self, t3):
        _, witness = tau_exact(t3)
        best = disjoint_witness(t3, witness)
        assert best.disjoint
        assert best.difference == 1

    def test_disjoint_witness_passes_disjoint_through(self, t3):
        witness = witness_from_sets(t3, {0}, {1, 2})
        assert disjoint_witness(t3, witness) is witness

    def test_prefix_cut(self, t3):
        witness = prefix_cut_witness(t3, VertexOrdering.identity(3))
        assert witness.difference == 2
        assert witness.sources == frozenset({0})

    def test_prefix_cut_flips_negative_sides(self, t3):
        witness = prefix_cut_witness(t3, VertexOrdering([2, 1, 0]))
        assert witness.difference == 2
        assert witness.disjoint

    @given(oriented_digraphs(min_n=1, max_n=8))
    @settings(max_examples=80, deadline=None)
    def test_disjoint_piece_keeps_a_third(self, G):
        tau, witness = tau_exact(G, ExactBudget(max_n_tau_full=8))
        best = disjoint_witness(G, witness)
        assert best.disjoint
        assert 3 * best.difference >= tau
        assert best.difference <= tau_star_exact(G)[0]


class TestOrderingFromPair:
    def test_extend_ordering(self, c3):
        assert extend_ordering(c3, [0]).order == (0, 1, 2)
        assert extend_ordering(c3, [1]).order == (0, 1, 2)

    def test_extend_rejects_repeats(self, c3):
        with pytest.raises(GraphFormatError):
            extend_ordering(c3, [0, 0])

    def test_transitive_triangle(self, t3):
        ordering = ordering_from_biased_pair(t3, witness_from_sets(t3, {0}, {1, 2}))
        assert ordering.order == (0, 1, 2)
        assert surplus(t3, ordering) == Fraction(3, 2)

    def test_preconditions(self, t3):
        with pytest.raises(PreconditionError):
            ordering_from_biased_pair(t3, witness_from_sets(t3, {0, 1}, {1, 2}))
        with pytest.raises(PreconditionError):
            ordering_from_biased_pair(t3, witness_from_sets(t3, {2}, {0}))

    @given(oriented_digraphs(max_n=10))
    @settings(max_examples=80, deadline=None)
    def test_surplus_at_least_half_of_tau_star(self, G):
        value, witness = tau_star_exact(G)
        ordering = ordering_from_biased_pair(G, witness)
        assert 2 * surplus(G, ordering) >= value


class TestSampling:
    def test_estimate_within_half_width(self, one_way_k22):
        est = sample_edge_difference(one_way_k22, {0, 1}, {2, 3}, samples=20000, seed=3)
        assert abs(est.estimate - 0.25) <= est.half_width
        assert est.samples == 20000

    def test_empty_side(self, one_way_k22):
        assert sample_edge_difference(one_way_k22, set(), {2, 3}, samples=10).estimate == 0.0

    def test_arguments_checked(self, one_way_k22):
        with pytest.raises(PreconditionError):
            sample_edge_difference(one_way_k22, {0}, {2}, samples=0)
        with pytest.raises(PreconditionError):
            sample_edge_difference(one_way_k22, {0}, {2}, samples=10, confidence=1.5)


class TestFindBiasedPair:
    def test_one_way_k88(self):
        G = oriented_complete_bipartite(8, 8)
        outcome = find_biased_pair(G, c4_arrow(), (0, 2), threshold=1, seed=0)
        assert outcome.found
        assert outcome.witness.difference == 49
        assert outcome.witness.disjoint
        assert outcome.copies_found >= 1

    def test_rejects_non_edge(self):
        G = oriented_complete_bipartite(3, 3)
        with pytest.raises(PreconditionError):
            find_biased_pair(G, c4_arrow(), (2, 0), threshold=1)

    def test_rejects_non_bipartite_pattern(self, c3):
        with pytest.raises(PreconditionError):
            find_biased_pair(oriented_complete_bipartite(3, 3), c3, (0, 1), threshold=1)

    def test_host_too_small(self, single_edge):
        outcome = find_biased_pair(single_edge, c4_arrow(), (0, 2), threshold=1)
        assert not outcome.found
        assert outcome.attempts == 0


class TestBfreeFas:
    def test_dense_one_way_bipartite(self):
        G = oriented_complete_bipartite(8, 8)
        result = bfree_fas(G, c4_arrow(), seed=0, trials=5)
        assert result.notes["regime"] == "dense"
        assert result.notes["source"] == "witness"
        assert result.notes["threshold"] == 1
        assert result.notes["witness_difference"] >= 8
        assert result.notes["t"] == 4
        assert result.size == 0

    def test_sparse_random_digraph(self):
        G = random_oriented_graph(100, 200, seed=7)
        result = bfree_fas(G, c4_arrow(), seed=7, trials=10)
        assert result.notes["regime"] == "sparse"
        assert result.notes["source"] == "randomized"
        assert 2 * result.size <= G.m
        verify_fas(G, result)

    def test_deterministic(self):
        G = oriented_complete_bipartite(6, 6, mode="random", seed=2)
        first = bfree_fas(G, c4_arrow(), seed=4, trials=5, samples=50)
        second = bfree_fas(G, c4_arrow(), seed=4, trials=5, samples=50)
        assert first.ordering == second.ordering
        assert first.notes == second.notes

    def test_falls_back_when_no_pair_clears_threshold(self):
        G = random_tournament(10, seed=1)
        result = bfree_fas(G, c4_arrow(), regime="dense", threshold=10 ** 9, samples=20, trials=5)
        assert result.notes["source"] == "randomized"
        verify_fas(G, result)

    def test_unknown_regime(self, c3):
        with pytest.raises(PreconditionError):
            bfree_fas(c3, c4_arrow(), regime="medium")
