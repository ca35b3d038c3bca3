from fractions import Fraction

import pytest

from Fas_Lab.backend import constructions
from Fas_Lab.backend.constructions import (
    FAMILIES,
    c4_arrow,
    complete_bipartite_graph,
    complete_graph,
    cycle_blowup,
    directed_cycle,
    directed_girth,
    dyadic_pair_check,
    generate,
    girth_surplus_exponent,
    near_acyclic_gadget,
    orient_until_dyadic,
    oriented_complete_bipartite,
    random_oriented_graph,
    random_tournament,
    surplus_exponent,
)
from Fas_Lab.backend.errors import OrientationExhaustedError, PreconditionError
from Fas_Lab.backend.exact_oracle import beta_exact
from Fas_Lab.backend.graph_core import Digraph, VertexOrdering, underlying_undirected


class TestFamilies:
    def test_tournament_is_complete_and_seeded(self):
        G = random_tournament(10, seed=3)
        assert G.m == 45
        assert G == random_tournament(10, seed=3)
        assert G != random_tournament(10, seed=4)

    def test_one_way_bipartite(self):
        G = oriented_complete_bipartite(2, 3)
        assert G.m == 6
        assert all(u < 2 <= v for u, v in G.edges)
        assert c4_arrow() == Digraph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])

    def test_random_bipartite_orientation_keeps_pairs(self):
        G = oriented_complete_bipartite(4, 4, mode="random", seed=9)
        assert G.m == 16
        assert underlying_undirected(G) == complete_bipartite_graph(4, 4)
        assert 2 * beta_exact(G).beta <= 16

    def test_random_oriented_graph(self):
        G = random_oriented_graph(10, 20, seed=1)
        assert (G.n, G.m) == (10, 20)
        with pytest.raises(PreconditionError):
            random_oriented_graph(4, 7)

    def test_blowup_shape(self):
        G = cycle_blowup(3, 2)
        assert (G.n, G.m) == (8, 16)
        with pytest.raises(PreconditionError):
            cycle_blowup(1, 2)

    def test_generate_by_name(self):
        assert generate("cycle", {"r": 5}) == directed_cycle(5)
        assert generate("tournament", {"n": 6}, seed=2) == random_tournament(6, seed=2)
        assert generate("bipartite-random", {"a": 2, "b": 2}, seed=1).m == 4
        assert set(FAMILIES) >= {"tournament", "bipartite", "blowup", "gadget", "random"}

    @pytest.mark.parametrize(
        "family, params",
        [
            ("tournament", {"n": 5}),
            ("transitive", {"n": 4}),
            ("bipartite", {"a": 2, "b": 3}),
            ("bipartite-random", {"a": 3, "b": 1}),
            ("blowup", {"r": 3, "t": 2}),
            ("gadget", {"N": 3}),
            ("cycle", {"r": 4}),
            ("random", {"n": 6, "m": 5}),
            ("empty", {"n": 2}),
        ],
    )
    def test_vertex_count_matches_generated_graph(self, family, params):
        assert FAMILIES[family].vertices(**params) == generate(family, params).n

    def test_generate_rejects_unknown_and_missing(self):
        with pytest.raises(PreconditionError):
            generate("petersen", {})
        with pytest.raises(PreconditionError):
            generate("blowup", {"r": 3})


class TestExtremalExamples:
    @pytest.mark.parametrize("r, t", [(2, 1), (2, 2), (2, 3), (3, 2), (3, 3), (4, 2)])
    def test_blowup_beta_is_t_squared(self, r, t):
        assert beta_exact(cycle_blowup(r, t)).beta == t * t

    @pytest.mark.slow
    @pytest.mark.parametrize("r, t", [(2, 5), (3, 4), (4, 3)])
    def test_blowup_beta_large(self, r, t):
        assert beta_exact(cycle_blowup(r, t)).beta == t * t

    @pytest.mark.parametrize("N", [2, 3, 4, 5, 6])
    def test_gadget_beta_and_girth(self, N):
        G = near_acyclic_gadget(N)
        assert directed_girth(G) == 2 * N
        assert beta_exact(G).beta == 2

    def test_girth(self, c3, t3):
        assert directed_girth(c3) == 3
        assert directed_girth(t3) is None
        assert directed_girth(cycle_blowup(3, 2)) == 4


class TestDyadicCheck:
    def test_triangle_pads_to_four(self, c3):
        check = dyadic_pair_check(c3)
        assert check.passed
        assert check.padded_n == 4
        assert check.pairs_checked == 3
        assert check.scope == "dyadic pairs only"

    def test_empty_graph_passes(self):
        assert dyadic_pair_check(Digraph.empty(8)).passed

    def test_one_way_k22_passes(self, one_way_k22):
        check = dyadic_pair_check(one_way_k22, VertexOrdering([0, 1, 2, 3]))
        assert check.passed
        assert check.worst_excess <= 0

    def test_one_way_k64_64_fails_at_top_level(self):
        G = oriented_complete_bipartite(64, 64)
        check = dyadic_pair_check(G)
        assert not check.passed
        violation = check.violation
        assert (violation.level, violation.k) == (6, 0)
        assert violation.edges_forward == violation.edges_total == 4096
        assert violation.deviation == 2048
        assert violation.allowed == pytest.approx(1998.6, abs=0.5)
        assert check.pairs_checked == 127

    def test_labeling_must_cover_vertices(self, c3):
        with pytest.raises(PreconditionError):
            dyadic_pair_check(c3, VertexOrdering.identity(2))


class TestOrientUntilDyadic:
    def test_small_graph_accepted_first_try(self):
        outcome = orient_until_dyadic(complete_bipartite_graph(3, 3), seed=5)
        assert outcome.tries == 1
        assert underlying_undirected(outcome.digraph) == complete_bipartite_graph(3, 3)

    def test_exhaustion(self, monkeypatch):
        real = constructions.dyadic_pair_check

        def always_fail(G, labeling=None):
            return real(G, labeling)._replace(passed=False, worst_excess=1.5)

        monkeypatch.setattr(constructions, "dyadic_pair_check", always_fail)
        with pytest.raises(OrientationExhaustedError) as info:
            orient_until_dyadic(complete_bipartite_graph(2, 2), max_tries=4)
        assert info.value.tries == 4
        assert info.value.worst_excess == 1.5


class TestExponents:
    @pytest.mark.parametrize(
        "q, r, exponent",
        [
            (0, Fraction(2), Fraction(3, 4)),
            (Fraction(1, 8), Fraction(4, 3), Fraction(7, 8)),
            (Fraction(1, 4), Fraction(1), Fraction(1)),
        ],
    )
    def test_surplus_exponent(self, q, r, exponent):
        result = surplus_exponent(q)
        assert result.r == r
        assert result.epsilon == 2 - r
        assert result.exponent == exponent
        assert result.exponent == Fraction(3, 4) + Fraction(q)

    def test_surplus_exponent_accepts_strings(self):
        assert surplus_exponent("1/8").r == Fraction(4, 3)

    def test_surplus_exponent_range(self):
        with pytest.raises(PreconditionError):
            surplus_exponent(Fraction(1, 2))

    def test_girth_exponent(self):
        assert girth_surplus_exponent(4) == Fraction(5, 6)
        for r in (2, 5):
            with pytest.raises(PreconditionError):
                girth_surplus_exponent(r)


@pytest.mark.parametrize("H", [complete_bipartite_graph(4, 4), complete_graph(8)], ids=["K44", "K8"])
def test_orientation_succeeds_for_master_seeds(H):
    accepted = 0
    for seed in range(100):
        try:
            outcome = orient_until_dyadic(H, max_tries=100, seed=seed)
        except OrientationExhaustedError:
            continue
        assert dyadic_pair_check(outcome.digraph).passed
        accepted += 1
    assert accepted >= 95
