"""
Exact oracles
Exponential-time ground truth for the minimum feedback arc set, the directed surplus,
the three directional discrepancies, labeled subgraph counts and switch-walk counts.
Every operation refuses inputs beyond its budget instead of running forever.
"""
import itertools
import logging
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .config import Settings, get_settings
from .errors import BudgetExceededError, InvariantError, PreconditionError
from .graph_core import (
    Digraph,
    DiscrepancyWitness,
    FasResult,
    UndirectedGraph,
    VertexOrdering,
    fas_from_ordering,
    mask_of,
    members,
    popcount,
    verify_fas,
    witness_from_sets,
)

logger = logging.getLogger(__name__)

_PERMUTATION_LIMIT = 8
_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class ExactBudget:
    """Size limits for the exponential oracles"""

    max_n_beta: int = 20
    max_n_tau: int = 12
    max_n_tau_full: int = 10
    max_n_tau_enumeration: int = 6
    max_n_bias: int = 12
    max_pattern_vertices: int = 6
    max_orientation_edges: int = 6
    max_switch_enum_n: int = 5
    max_switch_enum_k: int = 6
    max_components: int = 10

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise PreconditionError("budgets must be positive", **{f.name: getattr(self, f.name)})

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "ExactBudget":
        settings = settings or get_settings()
        values = {f.name: getattr(settings, f.name) for f in fields(cls)}
        if settings.budget_override is not None:
            # The override only ever raises a limit
            values = {k: max(v, settings.budget_override) for k, v in values.items()}
        return cls(**values)


def _budget(budget: Optional[ExactBudget]) -> ExactBudget:
    return budget if budget is not None else ExactBudget.from_settings()


def require_budget(what: str, requested: int, limit: int) -> None:
    if requested > limit:
        logger.warning(f"Refusing {what}: size {requested} exceeds budget {limit}")
        raise BudgetExceededError(what, requested, limit)


def popcount_table(n: int) -> np.ndarray:
    """popcount of every mask in [0, 2^n)"""
    pc = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pc[1 << b: 1 << (b + 1)] = pc[: 1 << b] + 1
    return pc


class BetaResult(NamedTuple):
    beta: int
    ordering: VertexOrdering
    fas: FasResult


def beta_exact(G: Digraph, budget: Optional[ExactBudget] = None) -> BetaResult:
    """
    Minimum feedback arc set size by subset DP over bitsets.

    f(S) = min over v in S of f(S - v) + |{u in S - v : (v, u) in E}|, with v taken
    as the last vertex of S. Masks are processed one popcount layer at a time so each
    layer only reads final values from the layer below.
    """
    budget = _budget(budget)
    require_budget("beta_exact", G.n, budget.max_n_beta)
    n = G.n
    if n == 0:
        ordering = VertexOrdering([])
        return BetaResult(0, ordering, fas_from_ordering(G, ordering))

    size = 1 << n
    pc = popcount_table(n)
    out = G.out_masks
    f = np.full(size, np.iinfo(np.int64).max // 4, dtype=np.int64)
    f[0] = 0

    by_layer = np.argsort(pc, kind="stable")
    bounds = np.cumsum(np.bincount(pc, minlength=n + 1))
    logger.debug(f"beta_exact: n={n}, table size {size}")
    for k in range(1, n + 1):
        layer = by_layer[bounds[k - 1]: bounds[k]]
        for v in range(n):
            sel = layer[((layer >> v) & 1) == 1]
            prev = sel ^ (1 << v)
            cand = f[prev] + pc[prev & out[v]]
            f[sel] = np.minimum(f[sel], cand)

    # Backtrack: peel off the last vertex of the optimal arrangement of S
    sequence: List[int] = []
    S = size - 1
    while S:
        for v in range(n):
            if (S >> v) & 1:
                prev = S ^ (1 << v)
                if int(f[prev]) + popcount(out[v] & prev) == int(f[S]):
                    sequence.append(v)
                    S = prev
                    break
        else:
            raise InvariantError("beta_exact backtracking found no predecessor", "a predecessor", bin(S))
    sequence.reverse()

    beta = int(f[size - 1])
    ordering = VertexOrdering(sequence)
    fas = fas_from_ordering(G, ordering)
    if fas.size != beta:
        raise InvariantError("beta_exact witness ordering", beta, fas.size)
    verify_fas(G, fas)
    return BetaResult(beta, fas.ordering, fas)


def pi_exact(G: Digraph, budget: Optional[ExactBudget] = None) -> Fraction:
    """Directed surplus m/2 - beta(G) as an exact half-integer"""
    return Fraction(G.m, 2) - beta_exact(G, budget).beta


def beta_by_permutations(G: Digraph) -> int:
    """Reference oracle: minimum backward-edge count over all n! orderings"""
    require_budget("beta_by_permutations", G.n, _PERMUTATION_LIMIT)
    if G.n == 0:
        return 0
    best = G.m
    edges = list(G.edges)
    for perm in itertools.permutations(range(G.n)):
        pos = [0] * G.n
        for idx, v in enumerate(perm):
            pos[v] = idx
        back = sum(1 for u, v in edges if pos[u] > pos[v])
        if back < best:
            best = back
    return best


def _marginal_table(G: Digraph) -> np.ndarray:
    """
    gain[w, A] = |{u in A : u -> w}| - |{u in A : w -> u}|

    For a fixed A the difference e(A, B) - e(B, A) is the sum of gain[w, A] over w in B,
    so the best B for that A keeps exactly the vertices with positive gain.
    """
    n = G.n
    masks = np.arange(1 << n, dtype=np.int64)
    pc = popcount_table(n)
    gain = np.empty((n, 1 << n), dtype=np.int64)
    for w in range(n):
        gain[w] = pc[masks & G.in_masks[w]] - pc[masks & G.out_masks[w]]
    return gain


def _best_pair(G: Digraph, mode: str) -> DiscrepancyWitness:
    n = G.n
    if n == 0:
        return witness_from_sets(G, (), ())
    gain = _marginal_table(G)
    masks = np.arange(1 << n, dtype=np.int64)
    inside = np.stack([((masks >> w) & 1) == 1 for w in range(n)])
    if mode == "all":
        contrib = np.maximum(gain, 0)
    elif mode == "disjoint":
        contrib = np.where(inside, 0, np.maximum(gain, 0))
    else:
        contrib = np.where(inside, 0, gain)
    values = contrib.sum(axis=0)
    best = int(np.argmax(values))
    if mode == "partition":
        targets = [w for w in range(n) if not (best >> w) & 1]
    else:
        targets = [w for w in range(n) if contrib[w, best] > 0]
    witness = witness_from_sets(G, members(best), targets)
    if witness.difference != int(values[best]):
        raise InvariantError(f"tau ({mode}) witness recount", int(values[best]), witness.difference)
    return witness


def tau_exact(G: Digraph, budget: Optional[ExactBudget] = None) -> Tuple[int, DiscrepancyWitness]:
    """tau(G): max of e(A,B) - e(B,A) over all pairs of vertex sets"""
    budget = _budget(budget)
    require_budget("tau_exact", G.n, budget.max_n_tau_full)
    witness = _best_pair(G, "all")
    return witness.difference, witness


def tau_star_exact(G: Digraph, budget: Optional[ExactBudget] = None) -> Tuple[int, DiscrepancyWitness]:
    """tau*(G): as tau but over disjoint pairs"""
    budget = _budget(budget)
    require_budget("tau_star_exact", G.n, budget.max_n_tau)
    witness = _best_pair(G, "disjoint")
    return witness.difference, witness


def tau_partition_exact(G: Digraph, budget: Optional[ExactBudget] = None) -> int:
    """tau-partition(G): max over bipartitions A + B = V"""
    budget = _budget(budget)
    require_budget("tau_partition_exact", G.n, budget.max_n_tau)
    return _best_pair(G, "partition").difference


def tau_by_enumeration(G: Digraph, mode: str = "all", budget: Optional[ExactBudget] = None) -> int:
    """
    Literal assignment enumeration: each vertex is A-only, B-only, both or neither ("all"),
    drops "both" for "disjoint", and uses only A-only/B-only for "partition".
    """
    budget = _budget(budget)
    require_budget("tau_by_enumeration", G.n, budget.max_n_tau_enumeration)
    states = {"all": (1, 2, 3, 0), "disjoint": (1, 2, 0), "partition": (1, 2)}[mode]
    best = None
    for assignment in itertools.product(states, repeat=G.n):
        a = mask_of(v for v, s in enumerate(assignment) if s & 1)
        b = mask_of(v for v, s in enumerate(assignment) if s & 2)
        value = G.edge_count_between(a, b) - G.edge_count_between(b, a)
        if best is None or value > best:
            best = value
    return best if best is not None else 0


def _count_maps(k: int, constraints: List[List[Tuple[int, bool]]], out_masks, in_masks, n: int, injective: bool) -> int:
    """
    Count maps phi of pattern vertices 0..k-1 into 0..n-1 honouring constraints.

    constraints[i] lists (j, forward) for earlier pattern vertices j: forward means the
    pattern edge j -> i (phi(i) must be an out-neighbour of phi(j)), otherwise i -> j.
    """
    if k == 0:
        return 1
    full = (1 << n) - 1
    phi = [0] * k

    def extend(i: int, used: int) -> int:
        cand = full & ~used if injective else full
        for j, forward in constraints[i]:
            cand &= out_masks[phi[j]] if forward else in_masks[phi[j]]
        if i == k - 1:
            return popcount(cand)
        total = 0
        while cand:
            low = cand & -cand
            cand ^= low
            phi[i] = low.bit_length() - 1
            total += extend(i + 1, used | low)
        return total

    return extend(0, 0)


def _directed_constraints(B: Digraph) -> List[List[Tuple[int, bool]]]:
    cons: List[List[Tuple[int, bool]]] = [[] for _ in range(B.n)]
    for u, v in B.sorted_edges():
        if u < v:
            cons[v].append((u, True))
        else:
            cons[u].append((v, False))
    return cons


def _undirected_constraints(F: UndirectedGraph) -> List[List[Tuple[int, bool]]]:
    cons: List[List[Tuple[int, bool]]] = [[] for _ in range(F.n)]
    for u, v in F.sorted_edges():
        cons[v].append((u, True))
    return cons


def count_labeled(B: Digraph, G: Digraph, budget: Optional[ExactBudget] = None) -> int:
    """N_L(B, G): injective vertex maps sending every edge of B onto an edge of G (not induced)"""
    budget = _budget(budget)
    require_budget("count_labeled pattern", B.n, budget.max_pattern_vertices)
    if B.n > G.n:
        return 0
    return _count_maps(B.n, _directed_constraints(B), G.out_masks, G.in_masks, G.n, injective=True)


def count_labeled_undirected(F: UndirectedGraph, H: UndirectedGraph, budget: Optional[ExactBudget] = None) -> int:
    """N_L(F, H) for undirected graphs, same contract as count_labeled"""
    budget = _budget(budget)
    require_budget("count_labeled_undirected pattern", F.n, budget.max_pattern_vertices)
    if F.n > H.n:
        return 0
    return _count_maps(F.n, _undirected_constraints(F), H.adj_masks, H.adj_masks, H.n, injective=True)


def count_homomorphisms_undirected(F: UndirectedGraph, H: UndirectedGraph, max_vertices: int = 5) -> int:
    """Vertex maps (not necessarily injective) sending edges of F to edges of H"""
    require_budget("count_homomorphisms pattern", F.n, max_vertices)
    return _count_maps(F.n, _undirected_constraints(F), H.adj_masks, H.adj_masks, H.n, injective=False)


class SwitchCounts(NamedTuple):
    even: int
    odd: int
    method: str


def exact_matrix_power(matrix: np.ndarray, k: int) -> np.ndarray:
    """Integer matrix power, switching to Python integers when int64 could overflow"""
    if k < 1:
        raise PreconditionError("matrix power needs k >= 1", k=k)
    n = matrix.shape[0]
    peak = int(np.abs(matrix).max()) if matrix.size else 0
    if n == 0 or peak == 0:
        return np.zeros_like(matrix, dtype=np.int64)
    if n ** (k - 1) * peak ** k < _INT64_SAFE:
        return np.linalg.matrix_power(matrix.astype(np.int64), k)
    logger.debug(f"exact_matrix_power: n={n}, k={k} may overflow int64, using Python integers")
    base = matrix.astype(object)
    result = None
    while k:
        if k & 1:
            result = base if result is None else result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def switch_counts_by_enumeration(G: Digraph, k: int) -> SwitchCounts:
    """Enumerate closed k-walks of the underlying graph, split by parity of reversed steps"""
    counts = [0, 0]
    out, inn = G.out_masks, G.in_masks

    def walk(start: int, current: int, steps: int, parity: int) -> None:
        if steps == k:
            if current == start:
                counts[parity] += 1
            return
        for nxt in members(out[current]):
            walk(start, nxt, steps + 1, parity)
        for nxt in members(inn[current]):
            walk(start, nxt, steps + 1, parity ^ 1)

    for v in range(G.n):
        walk(v, v, 0, 0)
    return SwitchCounts(counts[0], counts[1], "enumeration")


def switch_counts_by_transfer(G: Digraph, k: int) -> SwitchCounts:
    """
    Parity transfer matrix on 2n states (vertex, parity of reversed steps so far).
    A forward step keeps the parity block, a reversed step swaps it.
    """
    n = G.n
    if n == 0:
        return SwitchCounts(0, 0, "transfer")
    forward = np.zeros((n, n), dtype=np.int64)
    for u, v in G.edges:
        forward[u, v] = 1
    reverse = forward.T.copy()
    transfer = np.block([[forward, reverse], [reverse, forward]])
    power = exact_matrix_power(transfer, k)
    even = sum(int(power[v, v]) for v in range(n))
    odd = sum(int(power[v, n + v]) for v in range(n))
    return SwitchCounts(even, odd, "transfer")


def even_odd_switch_counts(G: Digraph, k: int, budget: Optional[ExactBudget] = None, method: str = "auto") -> SwitchCounts:
    """(E_k, O_k): closed k-walks of the underlying graph with an even / odd number of reversed steps"""
    if k < 4 or k % 2:
        raise PreconditionError("switch counts need an even k >= 4", k=k)
    budget = _budget(budget)
    if method == "enumeration" or (
        method == "auto" and G.n <= budget.max_switch_enum_n and k <= budget.max_switch_enum_k
    ):
        if method == "enumeration":
            require_budget("switch enumeration", G.n, budget.max_switch_enum_n)
            require_budget("switch enumeration walk length", k, budget.max_switch_enum_k)
        return switch_counts_by_enumeration(G, k)
    return switch_counts_by_transfer(G, k)
