from fractions import Fraction

import pytest
from hypothesis import given, settings

from Fas_Lab.backend.errors import GraphFormatError, InvariantError
from Fas_Lab.backend.graph_core import (
    Digraph,
    FasResult,
    VertexOrdering,
    backward_edges,
    fas_from_ordering,
    format_edge_list,
    induced_subgraph,
    is_acyclic,
    parse_edge_list,
    popcount,
    read_edge_list,
    remove_edges,
    surplus,
    underlying_undirected,
    verify_fas,
    witness_from_sets,
    write_edge_list,
)

from .conftest import oriented_digraphs


class TestDigraph:
    def test_degrees_follow_in_out_convention(self, t3):
        assert [t3.in_degree(v) for v in range(3)] == [0, 1, 2]
        assert [t3.out_degree(v) for v in range(3)] == [2, 1, 0]
        assert t3.degrees() == [2, 2, 2]

    def test_edge_count_between_allows_overlap(self, t3):
        assert t3.edge_count_between({0, 1}, {1, 2}) == 3
        assert t3.edge_count_between({1, 2}, {0, 1}) == 0

    @pytest.mark.parametrize("edges", [[(0, 0)], [(0, 1), (1, 0)], [(0, 1), (0, 1)], [(0, 3)]])
    def test_rejects_invalid_pairs(self, edges):
        with pytest.raises(GraphFormatError):
            Digraph(3, edges)

    def test_equality_ignores_edge_order(self):
        assert Digraph(3, [(0, 1), (1, 2)]) == Digraph(3, [(1, 2), (0, 1)])


class TestVertexOrdering:
    def test_positions_are_inverse(self):
        rho = VertexOrdering([2, 0, 1])
        assert rho.positions == (1, 2, 0)
        assert rho.reversed().order == (1, 0, 2)

    @pytest.mark.parametrize("sequence", [[0, 0, 1], [0, 2], [1, 2, 3]])
    def test_rejects_non_permutations(self, sequence):
        with pytest.raises(GraphFormatError):
            VertexOrdering(sequence)


class TestEdgeListFormat:
    def test_canonical_output_is_sorted(self):
        G = Digraph(3, [(2, 0), (1, 2), (0, 1)])
        assert format_edge_list(G) == "3 3\n0 1\n1 2\n2 0\n"

    def test_parse_reads_back(self, c3):
        assert parse_edge_list("3 3\n0 1\n1 2\n2 0\n") == c3

    @pytest.mark.parametrize(
        "text, line",
        [
            ("2 1\n0 0\n", 2),
            ("2 2\n0 1\n1 0\n", 3),
            ("3 2\n0 1\n0 1\n", 3),
            ("2 1\n0 5\n", 2),
            ("2 1\n0  1\n", 2),
            ("2 1\n0 1\n1 0\n", 3),
            ("x y\n", 1),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line):
        with pytest.raises(GraphFormatError) as info:
            parse_edge_list(text)
        assert info.value.line == line
        assert f"line {line}" in str(info.value)

    def test_missing_edges(self):
        with pytest.raises(GraphFormatError):
            parse_edge_list("3 2\n0 1\n")

    def test_rejects_crlf(self):
        with pytest.raises(GraphFormatError):
            parse_edge_list("2 1\r\n0 1\r\n")

    @pytest.mark.parametrize("text, line", [("\uff12 \uff11\n0 1\n", 1), ("2 1\n\u0660 \u0661\n", 2)])
    def test_rejects_non_ascii_digits(self, text, line):
        with pytest.raises(GraphFormatError) as info:
            parse_edge_list(text)
        assert info.value.line == line

    def test_non_ascii_bytes_in_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"2 1\n0 \xff\n")
        with pytest.raises(GraphFormatError) as info:
            read_edge_list(path)
        assert info.value.line == 2
        assert "0xff" in str(info.value)

    def test_file_round_trip(self, tmp_path, c3):
        path = tmp_path / "g.txt"
        write_edge_list(c3, path)
        assert path.read_bytes() == b"3 3\n0 1\n1 2\n2 0\n"
        assert read_edge_list(path) == c3

    @given(oriented_digraphs(max_n=7))
    @settings(max_examples=50, deadline=None)
    def test_format_parse_identity(self, G):
        assert parse_edge_list(format_edge_list(G)) == G


class TestOrderingsAndFas:
    def test_backward_split_of_triangle(self, c3):
        split = backward_edges(c3, VertexOrdering.identity(3))
        assert (split.forward, split.backward) == (2, 1)
        assert split.backward_edges == {(2, 0)}
        assert surplus(c3, VertexOrdering.identity(3)) == Fraction(1, 2)

    def test_fas_from_ordering_reverses_bad_orderings(self, t3):
        result = fas_from_ordering(t3, VertexOrdering([2, 1, 0]))
        assert result.size == 0
        assert result.ordering.order == (0, 1, 2)
        assert result.surplus == Fraction(3, 2)

    def test_is_acyclic(self, t3, c3):
        check = is_acyclic(t3)
        assert check.acyclic and check.ordering.order == (0, 1, 2)
        assert not is_acyclic(c3).acyclic

    def test_verify_fas_rejects_forward_deletion(self, c3):
        bogus = FasResult(
            deleted=frozenset({(0, 1)}),
            ordering=VertexOrdering.identity(3),
            size=1,
            surplus=Fraction(1, 2),
        )
        with pytest.raises(InvariantError):
            verify_fas(c3, bogus)

    def test_remove_edges_and_induced_subgraph(self, c3):
        assert remove_edges(c3, [(2, 0)]).m == 2
        sub = induced_subgraph(c3, [1, 2])
        assert sub == Digraph(2, [(0, 1)])

    def test_underlying_undirected(self, c3):
        assert underlying_undirected(c3).edges == {(0, 1), (1, 2), (0, 2)}

    def test_witness_recount(self, c3):
        w = witness_from_sets(c3, {0}, {1})
        assert (w.difference, w.disjoint) == (1, True)
        assert not witness_from_sets(c3, {0, 1}, {1}).disjoint

    @given(oriented_digraphs(max_n=8))
    @settings(max_examples=60, deadline=None)
    def test_every_ordering_gives_valid_fas(self, G):
        result = fas_from_ordering(G, VertexOrdering.identity(G.n))
        assert verify_fas(G, result)
        assert 2 * result.size <= G.m
        assert surplus(G, result.ordering) == -surplus(G, result.ordering.reversed())


@pytest.mark.parametrize("mask, bits", [(0, 0), (1, 1), (0b1011, 3), ((1 << 70) - 1, 70)])
def test_popcount(mask, bits):
    assert popcount(mask) == bits
