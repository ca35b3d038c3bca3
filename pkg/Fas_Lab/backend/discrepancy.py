"""
Discrepancy
Turning biased vertex-set pairs into orderings and back, the sampling search for a
biased pair in B-free digraphs, and the two-regime FAS pipeline built on it
"""
import itertools
import logging
import math
from collections import deque
from dataclasses import replace
from fractions import Fraction
from typing import Iterable, List, NamedTuple, Optional, Sequence

import numpy as np

from .config import get_settings
from .errors import GraphFormatError, InvariantError, PreconditionError
from .exact_oracle import ExactBudget, require_budget
from .graph_core import (
    Digraph,
    DiscrepancyWitness,
    Edge,
    FasResult,
    VertexOrdering,
    fas_from_ordering,
    induced_subgraph,
    mask_of,
    members,
    popcount,
    surplus,
    underlying_undirected,
    verify_fas,
    witness_from_sets,
)
from .greedy_fas import derive_seed, randomized_fas
from .subgraph_count import bipartite_profile

logger = logging.getLogger(__name__)

__all__ = [
    "DiscrepancyWitness",
    "witness_from_sets",
    "disjoint_witness",
    "prefix_cut_witness",
    "extend_ordering",
    "ordering_from_biased_pair",
    "sample_edge_difference",
    "find_biased_pair",
    "bfree_fas",
]


def disjoint_witness(G: Digraph, witness: DiscrepancyWitness) -> DiscrepancyWitness:
    """
    Split an overlapping pair (A, B) around C = A & B into (A-C, B-C), (C, B-C) and (A-C, C).
    Their differences sum to the original one, so the best keeps at least a third of it.
    """
    if witness.disjoint:
        return witness
    a, b = witness.sources, witness.targets
    c = a & b
    pieces = [witness_from_sets(G, a - c, b - c), witness_from_sets(G, c, b - c), witness_from_sets(G, a - c, c)]
    best = max(pieces, key=lambda w: w.difference)
    if 3 * best.difference < witness.difference:
        raise InvariantError("disjoint piece below a third of the difference", f">= {witness.difference}/3", best.difference)
    return best


def prefix_cut_witness(G: Digraph, ordering: VertexOrdering) -> DiscrepancyWitness:
    """Best (prefix, suffix) split of an ordering, oriented so the difference is non-negative"""
    order = ordering.order
    best = witness_from_sets(G, (), order)
    for cut in range(1, len(order)):
        w = witness_from_sets(G, order[:cut], order[cut:])
        if w.difference < 0:
            w = DiscrepancyWitness(w.targets, w.sources, -w.difference, True)
        if w.difference > best.difference:
            best = w
    return best


def extend_ordering(G: Digraph, partial: Sequence[int]) -> VertexOrdering:
    """
    Extend an ordering of U to all of V. Each missing vertex, in increasing index,
    goes to the front when that adds more forward than backward edges against the
    vertices already placed, otherwise to the back; the surplus never decreases.
    """
    seq = [int(v) for v in partial]
    if len(set(seq)) != len(seq) or any(not 0 <= v < G.n for v in seq):
        raise GraphFormatError(f"partial ordering is not injective on 0..{G.n - 1}: {seq}")
    placed = mask_of(seq)
    line = deque(seq)
    for v in range(G.n):
        if (placed >> v) & 1:
            continue
        front_gain = popcount(G.out_masks[v] & placed) - popcount(G.in_masks[v] & placed)
        if front_gain > 0:
            line.appendleft(v)
        else:
            line.append(v)
        placed |= 1 << v
    return VertexOrdering(line)


def _half_forward(G: Digraph, vertices: Iterable[int]) -> List[int]:
    seq = sorted(vertices)
    pos = {v: i for i, v in enumerate(seq)}
    forward = backward = 0
    for u, v in G.edges:
        if u in pos and v in pos:
            if pos[u] < pos[v]:
                forward += 1
            else:
                backward += 1
    return seq if forward >= backward else seq[::-1]


def ordering_from_biased_pair(G: Digraph, witness: DiscrepancyWitness) -> VertexOrdering:
    """Ordering with surplus at least difference/2: A before B, each internally at least half forward"""
    if not witness.disjoint:
        raise PreconditionError("witness sets must be disjoint", overlap=sorted(witness.sources & witness.targets))
    if witness.difference < 0:
        raise PreconditionError("witness difference must be non-negative", difference=witness.difference)
    partial = _half_forward(G, witness.sources) + _half_forward(G, witness.targets)
    ordering = extend_ordering(G, partial)
    achieved = surplus(G, ordering)
    if achieved < Fraction(witness.difference, 2):
        raise InvariantError("surplus of the biased-pair ordering", f">= {Fraction(witness.difference, 2)}", achieved)
    return ordering


class EdgeDifferenceEstimate(NamedTuple):
    estimate: float
    half_width: float
    samples: int


def sample_edge_difference(
    G: Digraph,
    su: Iterable[int],
    sv: Iterable[int],
    samples: int,
    seed: int = 0,
    confidence: float = 0.01,
) -> EdgeDifferenceEstimate:
    """Estimate (e(Su,Sv) - e(Sv,Su)) / n^2 from uniform ordered vertex pairs drawn with replacement"""
    if samples < 1:
        raise PreconditionError("sample count must be at least 1", samples=samples)
    if not 0 < confidence < 1:
        raise PreconditionError("confidence must lie in (0, 1)", confidence=confidence)
    half_width = 3 * math.sqrt(math.log(1 / confidence) / samples)
    su, sv = set(su), set(sv)
    if G.n == 0 or not su or not sv:
        return EdgeDifferenceEstimate(0.0, half_width, samples)

    adjacency = np.zeros((G.n, G.n), dtype=bool)
    for u, v in G.edges:
        adjacency[u, v] = True
    in_u = np.zeros(G.n, dtype=bool)
    in_u[list(su)] = True
    in_v = np.zeros(G.n, dtype=bool)
    in_v[list(sv)] = True

    rng = np.random.default_rng(seed)
    tails = rng.integers(0, G.n, size=samples)
    heads = rng.integers(0, G.n, size=samples)
    hit = adjacency[tails, heads]
    forward = np.count_nonzero(hit & in_u[tails] & in_v[heads])
    backward = np.count_nonzero(hit & in_v[tails] & in_u[heads])
    return EdgeDifferenceEstimate((forward - backward) / samples, half_width, samples)


class BiasedPairOutcome(NamedTuple):
    witness: Optional[DiscrepancyWitness]
    attempts: int
    copies_found: int
    flip_edge: Edge
    sampled_difference: Optional[float] = None

    @property
    def found(self) -> bool:
        return self.witness is not None


def _check_pattern(B: Digraph, budget: ExactBudget) -> None:
    require_budget("biased-pair pattern", B.n, budget.max_pattern_vertices)
    bipartite_profile(underlying_undirected(B), budget)


def _extension_set(G: Digraph, B: Digraph, x: int, skip: int, phi: dict, image: int) -> int:
    """Vertices outside the D-copy that can play x, using B's edges at x except the one to `skip`"""
    cand = ((1 << G.n) - 1) & ~image
    for a, b in B.edges:
        if a == x and b != skip:
            cand &= G.in_masks[phi[b]]
        elif b == x and a != skip:
            cand &= G.out_masks[phi[a]]
    return cand


def find_biased_pair(
    G: Digraph,
    B: Digraph,
    flip_edge: Edge,
    threshold: float,
    samples: int = 500,
    pair_samples: int = 2000,
    seed: int = 0,
    confidence: float = 0.01,
    budget: Optional[ExactBudget] = None,
) -> BiasedPairOutcome:
    """
    Sample (v(B)-2)-subsets of V(G) looking for a copy of D = B minus the endpoints of
    flip_edge = (u, v). For a copy, S_u collects the vertices completing it to B - v and
    S_v those completing it to B - u. A pair whose sampled difference clears the
    threshold is recounted exactly; only the recount decides success.
    """
    budget = budget or ExactBudget.from_settings()
    _check_pattern(B, budget)
    u, v = flip_edge
    if not (0 <= u < B.n and 0 <= v < B.n and B.has_edge(u, v)):
        raise PreconditionError("flip edge is not an edge of the pattern", flip_edge=flip_edge)
    if samples < 1:
        raise PreconditionError("sample count must be at least 1", samples=samples)

    rest = [x for x in range(B.n) if x not in (u, v)]
    D = induced_subgraph(B, rest)
    d_edges = D.sorted_edges()
    copies = 0
    if G.n < B.n or G.m == 0:
        logger.warning("find_biased_pair: host too small or empty, no biased pair")
        return BiasedPairOutcome(None, 0, 0, flip_edge)

    for attempt in range(samples):
        trial_seed = derive_seed(seed, attempt)
        rng = np.random.default_rng(trial_seed)
        subset = rng.choice(G.n, size=len(rest), replace=False).tolist()
        for perm in itertools.permutations(subset):
            if not all(G.has_edge(perm[a], perm[b]) for a, b in d_edges):
                continue
            copies += 1
            phi = {x: perm[i] for i, x in enumerate(rest)}
            image = mask_of(perm)
            s_u = _extension_set(G, B, u, v, phi, image)
            s_v = _extension_set(G, B, v, u, phi, image)
            if not s_u or not s_v:
                break
            est = sample_edge_difference(G, members(s_u), members(s_v), pair_samples,
                                         derive_seed(trial_seed, 1), confidence)
            if abs(est.estimate) * G.n ** 2 < threshold:
                break
            witness = witness_from_sets(G, members(s_u), members(s_v))
            if witness.difference < 0:
                witness = witness_from_sets(G, witness.targets, witness.sources)
            if witness.difference >= threshold:
                logger.info(f"find_biased_pair: attempt {attempt + 1} found difference {witness.difference}")
                return BiasedPairOutcome(witness, attempt + 1, copies, flip_edge, est.estimate)
            break

    logger.warning(f"find_biased_pair: no pair reached threshold {threshold} in {samples} samples")
    return BiasedPairOutcome(None, samples, copies, flip_edge)


def bfree_fas(
    G: Digraph,
    B: Digraph,
    regime: str = "auto",
    threshold: Optional[float] = None,
    samples: int = 500,
    pair_samples: int = 2000,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    budget: Optional[ExactBudget] = None,
) -> FasResult:
    """
    FAS for a B-free digraph. Sparse graphs go straight to randomized restricted greedy;
    dense ones look for a biased pair first and keep whichever FAS is smaller.
    """
    settings = get_settings()
    budget = budget or ExactBudget.from_settings(settings)
    seed = settings.default_seed if seed is None else seed
    if regime not in ("auto", "dense", "sparse"):
        raise PreconditionError("regime must be auto, dense or sparse", regime=regime)
    _check_pattern(B, budget)

    t = bipartite_profile(underlying_undirected(B), budget).exponent
    alpha = Fraction(1, 2 * t - 1)
    epsilon = Fraction(1, 16 * t - 12)
    n, m = G.n, G.m
    if regime == "auto":
        density = 2 * m / n ** 2 if n else 0.0
        dense = m > n ** (2 - float(alpha)) or (m > 0 and density >= settings.dense_density)
        regime = "dense" if dense else "sparse"
    logger.info(f"bfree_fas: n={n}, m={m}, t={t}, regime {regime}")

    notes = {"regime": regime, "t": t, "alpha": alpha, "epsilon": epsilon}
    fallback = randomized_fas(G, trials=trials, seed=seed)
    best = fallback
    source = "randomized"

    if regime == "dense" and m > 0:
        if threshold is None:
            threshold = max(1, math.ceil(m ** t / (2 * B.m * n ** (2 * t - 2))))
        notes["threshold"] = threshold
        for index, edge in enumerate(B.sorted_edges()):
            outcome = find_biased_pair(G, B, edge, threshold, samples, pair_samples,
                                       derive_seed(seed, index), budget=budget)
            if not outcome.found:
                continue
            witness = disjoint_witness(G, outcome.witness)
            candidate = fas_from_ordering(G, ordering_from_biased_pair(G, witness))
            notes.update({"flip_edge": edge, "witness_difference": witness.difference})
            if candidate.size <= best.size:
                best, source = candidate, "witness"
            break
        else:
            logger.warning("bfree_fas: no biased pair found, keeping the randomized result")

    notes["source"] = source
    result = replace(best, notes={**best.notes, **notes})
    verify_fas(G, result)
    return result
