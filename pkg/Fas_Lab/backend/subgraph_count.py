"""
Subgraph counting
Width and exponent of bipartite patterns, the copy-count lower bound as a checkable
inequality, the discrepancy lower bound for B-free digraphs and orientation spreads
"""
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, NamedTuple, Optional, Tuple

import networkx as nx

from .errors import InvariantError, PreconditionError
from .exact_oracle import (
    ExactBudget,
    count_homomorphisms_undirected,
    count_labeled,
    count_labeled_undirected,
    require_budget,
)
from .graph_core import Digraph, UndirectedGraph, underlying_undirected

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BipartiteProfile:
    """Bipartition minimizing the width, with e(H), w(H) and t(H) = e(H) + w(H)"""

    parts: Tuple[FrozenSet[int], FrozenSet[int]]
    edges: int
    width: int
    exponent: int


def _width(H: UndirectedGraph, left: FrozenSet[int], right: FrozenSet[int]) -> int:
    candidates = [len(right) - H.degree(x) for x in left] + [len(left) - H.degree(x) for x in right]
    return min(candidates)


def bipartite_profile(H: UndirectedGraph, budget: Optional[ExactBudget] = None) -> BipartiteProfile:
    """
    Width by brute force over every vertex and both sides. A disconnected H has one
    2-colouring per component; all 2^c side assignments are tried and the smallest
    width wins.
    """
    budget = budget or ExactBudget.from_settings()
    if H.m == 0:
        raise PreconditionError("pattern has no edges", n=H.n)
    g = H.to_networkx()
    if not nx.is_bipartite(g):
        raise PreconditionError("pattern is not bipartite", n=H.n, m=H.m)

    components = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
    require_budget("bipartite_profile components", len(components), budget.max_components)
    colourings = []
    for comp in components:
        colour = nx.bipartite.color(g.subgraph(comp))
        colourings.append((
            frozenset(v for v in comp if colour[v] == 0),
            frozenset(v for v in comp if colour[v] == 1),
        ))

    best = None
    for assignment in range(1 << len(components)):
        left, right = set(), set()
        for idx, (zero, one) in enumerate(colourings):
            if (assignment >> idx) & 1:
                zero, one = one, zero
            left |= zero
            right |= one
        left_f, right_f = frozenset(left), frozenset(right)
        width = _width(H, left_f, right_f)
        if best is None or width < best[0]:
            best = (width, left_f, right_f)

    width, left, right = best
    return BipartiteProfile(parts=(left, right), edges=H.m, width=width, exponent=H.m + width)


class CopyCheck(NamedTuple):
    count: int
    bound: float
    condition_holds: bool


def min_copies_check(H: UndirectedGraph, G: UndirectedGraph, budget: Optional[ExactBudget] = None) -> CopyCheck:
    """N_L(H, G) against n^k p^t / 2 with p = 2m/n^2, asserted whenever p >= (k^2/n)^(1/t)"""
    budget = budget or ExactBudget.from_settings()
    t = bipartite_profile(H, budget).exponent
    k, n = H.n, G.n
    p = 2 * G.m / n ** 2 if n else 0.0
    bound = 0.5 * n ** k * p ** t
    condition = n > 0 and p >= (k ** 2 / n) ** (1 / t)
    count = count_labeled_undirected(H, G, budget)
    if condition and count < bound:
        raise InvariantError("labeled copy count below n^k p^t / 2", f">= {bound}", count)
    return CopyCheck(count, bound, condition)


class TauLowerBound(NamedTuple):
    value: float
    density_threshold: float
    precondition_met: bool

    @property
    def tag(self) -> str:
        return "ok" if self.precondition_met else "precondition-unmet"


def tau_lower_bound_bfree(B: Digraph, n: int, m: int) -> TauLowerBound:
    """m^t / (2 e(B) n^(2t-2)); meaningful once m >= k^(2/t) n^(2-1/t) / 2"""
    if n < 1:
        raise PreconditionError("n must be positive", n=n)
    profile = bipartite_profile(underlying_undirected(B))
    t, k = profile.exponent, B.n
    value = m ** t / (2 * B.m * float(n) ** (2 * t - 2))
    threshold = 0.5 * k ** (2 / t) * n ** (2 - 1 / t)
    met = m >= threshold
    if not met:
        logger.warning(f"tau_lower_bound_bfree: m={m} is below the density threshold {threshold:.1f}")
    return TauLowerBound(value, threshold, met)


def orient(Bbar: UndirectedGraph, mask: int) -> Digraph:
    """Orientation of Bbar: sorted edge i is reversed when bit i of mask is set"""
    edges = Bbar.sorted_edges()
    return Digraph(Bbar.n, [(v, u) if (mask >> i) & 1 else (u, v) for i, (u, v) in enumerate(edges)])


class OrientationSpread(NamedTuple):
    counts: Dict[int, int]
    total: int
    undirected_count: int
    spread: int


def orientation_spread(Bbar: UndirectedGraph, G: Digraph, budget: Optional[ExactBudget] = None) -> OrientationSpread:
    """N_L of every orientation of Bbar in G, keyed by orientation mask; they sum to N_L(Bbar, G-bar)"""
    budget = budget or ExactBudget.from_settings()
    require_budget("orientation_spread edges", Bbar.m, budget.max_orientation_edges)
    counts = {mask: count_labeled(orient(Bbar, mask), G, budget) for mask in range(1 << Bbar.m)}
    total = sum(counts.values())
    undirected = count_labeled_undirected(Bbar, underlying_undirected(G), budget)
    if total != undirected:
        raise InvariantError("orientation counts vs undirected count", undirected, total)
    return OrientationSpread(counts, total, undirected, max(counts.values()) - min(counts.values()))


def homomorphism_count(H: UndirectedGraph, G: UndirectedGraph) -> int:
    """h_H(G) for patterns on at most five vertices"""
    return count_homomorphisms_undirected(H, G, max_vertices=5)


def homomorphism_density(H: UndirectedGraph, G: UndirectedGraph) -> float:
    if G.n == 0:
        return 0.0
    return homomorphism_count(H, G) / G.n ** H.n
