"""
Shared fixtures and hypothesis strategies
"""
import itertools
from typing import Iterator, List

import networkx as nx
import numpy as np
import pytest
from hypothesis import strategies as st
from hypothesis.strategies import composite

from Fas_Lab.backend.exact_oracle import ExactBudget
from Fas_Lab.backend.graph_core import Digraph, UndirectedGraph


def digraph_from_states(n: int, states) -> Digraph:
    """Pair i of combinations(range(n), 2): state 0 absent, 1 forward, 2 backward"""
    edges = []
    for (u, v), state in zip(itertools.combinations(range(n), 2), states):
        if state == 1:
            edges.append((u, v))
        elif state == 2:
            edges.append((v, u))
    return Digraph(n, edges)


def all_oriented_digraphs(n: int) -> Iterator[Digraph]:
    """Every oriented digraph on n labelled vertices (3^C(n,2) of them)"""
    pairs = n * (n - 1) // 2
    for states in itertools.product((0, 1, 2), repeat=pairs):
        yield digraph_from_states(n, states)


def seeded_digraphs(count: int, min_n: int, max_n: int, seed: int = 0) -> List[Digraph]:
    rng = np.random.default_rng(seed)
    corpus = []
    for _ in range(count):
        n = int(rng.integers(min_n, max_n + 1))
        corpus.append(digraph_from_states(n, rng.integers(0, 3, size=n * (n - 1) // 2).tolist()))
    return corpus


def small_patterns(max_edges: int) -> List[UndirectedGraph]:
    """One graph per isomorphism class with 1..max_edges edges and no isolated vertex"""
    level = [UndirectedGraph(2, [(0, 1)])]
    found = list(level)
    for _ in range(max_edges - 1):
        grown_level: List[UndirectedGraph] = []
        for H in level:
            n = H.n
            options = [p for p in itertools.combinations(range(n), 2) if not H.has_edge(*p)]
            options += [(u, n) for u in range(n)] + [(n, n + 1)]
            for u, v in options:
                grown = UndirectedGraph(max(n, v + 1), list(H.edges) + [(u, v)])
                g = grown.to_networkx()
                if not any(nx.is_isomorphic(g, other.to_networkx()) for other in grown_level):
                    grown_level.append(grown)
        found.extend(grown_level)
        level = grown_level
    return found


@composite
def oriented_digraphs(draw, min_n: int = 0, max_n: int = 8):
    """Random oriented digraphs drawn pair by pair with three states each"""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = n * (n - 1) // 2
    states = draw(st.lists(st.integers(min_value=0, max_value=2), min_size=pairs, max_size=pairs))
    return digraph_from_states(n, states)


@composite
def undirected_graphs(draw, min_n: int = 0, max_n: int = 8):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return UndirectedGraph(n, [p for p, k in zip(pairs, keep) if k])


@composite
def dense_undirected_graphs(draw, min_n: int = 4, max_n: int = 10):
    """Undirected graphs where each pair is present with probability about 3/4"""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.integers(min_value=0, max_value=3), min_size=len(pairs), max_size=len(pairs)))
    return UndirectedGraph(n, [p for p, k in zip(pairs, keep) if k])


@pytest.fixture
def c3() -> Digraph:
    """Directed triangle 0 -> 1 -> 2 -> 0"""
    return Digraph(3, [(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def t3() -> Digraph:
    return Digraph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def single_edge() -> Digraph:
    return Digraph(2, [(0, 1)])


@pytest.fixture
def one_way_k22() -> Digraph:
    return Digraph(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def wide_budget() -> ExactBudget:
    return ExactBudget(max_n_tau_full=12, max_n_tau=12)
