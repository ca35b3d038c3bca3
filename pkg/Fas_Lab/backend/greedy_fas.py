"""
Greedy feedback arc sets
Restricted greedy placement with an exact per-step surplus ledger, seeded randomized
restarts, an insertion post-pass, and the degree-sum lower bounds on the surplus
"""
import logging
import math
from collections import deque
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional

import numpy as np

from .config import get_settings
from .errors import GraphFormatError, InvariantError, PreconditionError
from .graph_core import Digraph, FasResult, VertexOrdering, backward_edges, fas_from_ordering, popcount

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, index: int) -> int:
    """splitmix64 of (master, index): independent per-trial seeds from one master seed"""
    z = ((master & _MASK64) + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class GreedyStep(NamedTuple):
    """One placement: d_in = edges from S into v, d_out = edges from v into S"""

    vertex: int
    d_in: int
    d_out: int
    side: str


def restricted_greedy(G: Digraph, order: VertexOrdering) -> FasResult:
    """
    Place each vertex of `order` before or after everything placed so far,
    whichever side creates fewer backward edges (ties go after)
    """
    if len(order) != G.n:
        raise GraphFormatError(f"ordering covers {len(order)} vertices, digraph has {G.n}")

    placed = deque()
    seen = 0
    size = 0
    gap = 0
    ledger: List[GreedyStep] = []
    for v in order:
        d_in = popcount(G.in_masks[v] & seen)
        d_out = popcount(G.out_masks[v] & seen)
        if d_out <= d_in:
            placed.append(v)
            size += d_out
            side = "after"
        else:
            placed.appendleft(v)
            size += d_in
            side = "before"
        gap += abs(d_in - d_out)
        ledger.append(GreedyStep(v, d_in, d_out, side))
        seen |= 1 << v

    ordering = VertexOrdering(placed)
    split = backward_edges(G, ordering)
    ledger_surplus = Fraction(gap, 2)
    if split.backward != size:
        raise InvariantError("greedy ledger size vs backward edges", size, split.backward)
    if Fraction(split.forward - split.backward, 2) != ledger_surplus:
        raise InvariantError("greedy ledger surplus vs ordering surplus", ledger_surplus,
                             Fraction(split.forward - split.backward, 2))
    if 2 * size != G.m - gap:
        raise InvariantError("greedy size vs m/2 - surplus", Fraction(G.m, 2) - ledger_surplus, size)

    return FasResult(
        deleted=split.backward_edges,
        ordering=ordering,
        size=size,
        surplus=ledger_surplus,
        ledger=tuple(ledger),
        notes={"algorithm": "restricted_greedy"},
    )


def insertion_refine(G: Digraph, ordering: VertexOrdering) -> FasResult:
    """Move single vertices to their cheapest slot until no move strictly lowers the FAS size"""
    seq = list(fas_from_ordering(G, ordering).ordering)
    out, inn = G.out_masks, G.in_masks
    improved = True
    passes = 0
    while improved:
        improved = False
        passes += 1
        for v in list(seq):
            idx = seq.index(v)
            rest = seq[:idx] + seq[idx + 1:]
            # cost of slot j: out-edges of v to rest[:j] plus in-edges from rest[j:]
            cost = popcount(inn[v] & ~(1 << v))
            best_cost, best_slot = cost, 0
            current = None
            for j, u in enumerate(rest):
                if j == idx:
                    current = cost
                if (inn[v] >> u) & 1:
                    cost -= 1
                if (out[v] >> u) & 1:
                    cost += 1
                if cost < best_cost:
                    best_cost, best_slot = cost, j + 1
            if current is None:
                current = cost
            if best_cost < current:
                rest.insert(best_slot, v)
                seq = rest
                improved = True
    logger.debug(f"insertion_refine: converged after {passes} passes")
    result = fas_from_ordering(G, VertexOrdering(seq))
    return replace(result, notes={"algorithm": "insertion_refine", "passes": passes})


def randomized_fas(
    G: Digraph,
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    refine: bool = False,
) -> FasResult:
    """Best restricted_greedy result over uniformly random starting orders"""
    settings = get_settings()
    trials = settings.default_trials if trials is None else trials
    seed = settings.default_seed if seed is None else seed
    if trials < 1:
        raise PreconditionError("trials must be at least 1", trials=trials)

    best: Optional[FasResult] = None
    best_trial = -1
    for trial in range(trials):
        rng = np.random.default_rng(derive_seed(seed, trial))
        order = VertexOrdering(rng.permutation(G.n).tolist())
        result = restricted_greedy(G, order)
        if refine:
            refined = insertion_refine(G, result.ordering)
            if refined.size < result.size:
                result = replace(refined, ledger=result.ledger)
        logger.debug(f"randomized_fas trial {trial}: size {result.size}")
        if best is None or (result.size, result.ordering.order) < (best.size, best.ordering.order):
            best, best_trial = result, trial

    notes = dict(best.notes)
    notes.update({"trials": trials, "seed": seed, "best_trial": best_trial})
    return replace(best, notes=notes)


class DegreeSumBound(NamedTuple):
    degree_root_sum: float
    bound: float


def sqrt_degree_sum(G: Digraph) -> DegreeSumBound:
    """(sum of sqrt(d(v)), m^(3/4) / 4); the first always dominates"""
    total = float(sum(math.sqrt(d) for d in G.degrees()))
    bound = 0.25 * G.m ** 0.75
    if total + 1e-9 < bound:
        raise InvariantError("sum of sqrt degrees below m^(3/4)/4", bound, total)
    return DegreeSumBound(total, bound)


class LowDegreeBound(NamedTuple):
    degree_root_sum: float
    bound: float
    top_induced_edges: int


def low_degree_bound(G: Digraph, k: int) -> LowDegreeBound:
    """
    Check sum of sqrt(d(v)) >= sqrt(m k) / 4 when the k highest-degree vertices
    induce at most m/2 edges. Degree ties go to the lower vertex index.
    """
    if not 0 <= k <= G.n:
        raise PreconditionError("k must lie in [0, n]", k=k, n=G.n)
    degrees = G.degrees()
    top = sorted(range(G.n), key=lambda v: (-degrees[v], v))[:k]
    induced = G.edge_count_between(top, top)
    if 2 * induced > G.m:
        raise PreconditionError("top-degree vertices induce more than m/2 edges", induced_edges=induced, m=G.m)
    total = float(sum(math.sqrt(d) for d in degrees))
    bound = 0.25 * math.sqrt(G.m * k)
    if total + 1e-9 < bound:
        raise InvariantError("sum of sqrt degrees below sqrt(mk)/4", bound, total)
    return LowDegreeBound(total, bound, induced)


def dense_inverse(x: float) -> int:
    return math.ceil(math.sqrt(2 * x))


def triangle_free_inverse(x: float) -> int:
    return math.ceil(2 * math.sqrt(x))


def c4_free_inverse(x: float) -> int:
    return math.ceil((2 * x) ** (2 / 3))


def forest_free_inverse(x: float) -> int:
    return math.ceil(x)


# Smallest vertex count whose extremal number reaches x edges, per family
INVERSE_EXTREMAL: Dict[str, Callable[[float], int]] = {
    "dense": dense_inverse,
    "triangle-free": triangle_free_inverse,
    "c4-free": c4_free_inverse,
    "forest-free": forest_free_inverse,
}


class ExtremalBound(NamedTuple):
    k: int
    bound: float
    achieved: int


def extremal_inverse_bound(
    G: Digraph,
    f: Callable[[float], int],
    trials: Optional[int] = None,
    seed: Optional[int] = None,
    constant: Optional[float] = None,
) -> ExtremalBound:
    """Upper bound m/2 - c sqrt(m f(m/2)) on beta, next to what randomized_fas achieves"""
    c = get_settings().greedy_constant if constant is None else constant
    if G.m == 0:
        return ExtremalBound(int(f(0)), 0.0, 0)
    k = int(f(G.m / 2))
    bound = G.m / 2 - c * math.sqrt(G.m * k)
    achieved = randomized_fas(G, trials=trials, seed=seed).size
    return ExtremalBound(k, bound, achieved)
