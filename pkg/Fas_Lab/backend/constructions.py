"""
Constructions
Seeded generators for the digraph families used as examples and extremal witnesses,
small patterns, the dyadic-pair deviation check and the orientation retry loop
"""
import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import OrientationExhaustedError, PreconditionError
from .graph_core import Digraph, UndirectedGraph, VertexOrdering, members
from .greedy_fas import derive_seed

logger = logging.getLogger(__name__)

Rational = Union[Fraction, int, str]


def _positive(name: str, value: int, minimum: int = 1) -> None:
    if value < minimum:
        raise PreconditionError(f"{name} must be at least {minimum}", **{name: value})


# ---------------------------------------------------------------------------
# Digraph families
# ---------------------------------------------------------------------------

def empty_digraph(n: int) -> Digraph:
    _positive("n", n, 0)
    return Digraph.empty(n)


def random_tournament(n: int, seed: int = 0) -> Digraph:
    """One fair coin per vertex pair i < j: heads keeps i -> j"""
    _positive("n", n)
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    coins = rng.integers(0, 2, size=rows.size)
    edges = [(int(i), int(j)) if c else (int(j), int(i)) for i, j, c in zip(rows, cols, coins)]
    return Digraph(n, edges)


def transitive_tournament(n: int) -> Digraph:
    _positive("n", n)
    return Digraph(n, itertools.combinations(range(n), 2))


def oriented_complete_bipartite(a: int, b: int, mode: str = "one-way", seed: int = 0) -> Digraph:
    """K_{a,b} with left part 0..a-1 and right part a..a+b-1"""
    _positive("a", a)
    _positive("b", b)
    pairs = [(u, a + v) for u in range(a) for v in range(b)]
    if mode == "one-way":
        return Digraph(a + b, pairs)
    if mode != "random":
        raise PreconditionError("mode must be 'one-way' or 'random'", mode=mode)
    coins = np.random.default_rng(seed).integers(0, 2, size=len(pairs))
    return Digraph(a + b, [(u, v) if c else (v, u) for (u, v), c in zip(pairs, coins)])


def random_oriented_graph(n: int, m: int, seed: int = 0) -> Digraph:
    """m distinct vertex pairs chosen uniformly, each oriented by a fair coin"""
    _positive("n", n)
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise PreconditionError("edge count must lie in [0, n(n-1)/2]", m=m, n=n)
    rng = np.random.default_rng(seed)
    rows, cols = np.triu_indices(n, k=1)
    chosen = np.sort(rng.choice(total, size=m, replace=False))
    coins = rng.integers(0, 2, size=m)
    edges = [
        (int(rows[i]), int(cols[i])) if c else (int(cols[i]), int(rows[i]))
        for i, c in zip(chosen, coins)
    ]
    return Digraph(n, edges)


def cycle_blowup(r: int, t: int) -> Digraph:
    """Directed (r+1)-cycle with every vertex replaced by t copies; group g is g*t..g*t+t-1"""
    _positive("r", r, 2)
    _positive("t", t)
    groups = r + 1
    edges = []
    for g in range(groups):
        nxt = (g + 1) % groups
        edges.extend((g * t + i, nxt * t + j) for i in range(t) for j in range(t))
    return Digraph(groups * t, edges)


def near_acyclic_gadget(N: int) -> Digraph:
    """
    Vertices u_i = 3i, v_i = 3i+1, w_i = 3i+2 for i in Z_N with edges
    u_i -> w_i, v_i -> w_i, w_i -> u_{i+1}, w_i -> v_{i+1}.
    Every directed cycle winds around Z_N, yet two deletions suffice.
    """
    _positive("N", N, 2)
    edges = []
    for i in range(N):
        u, v, w = 3 * i, 3 * i + 1, 3 * i + 2
        j = (i + 1) % N
        edges += [(u, w), (v, w), (w, 3 * j), (w, 3 * j + 1)]
    return Digraph(3 * N, edges)


def random_orientation(H: UndirectedGraph, seed: int = 0) -> Digraph:
    """One fair coin per undirected edge, edges taken in sorted order"""
    pairs = H.sorted_edges()
    coins = np.random.default_rng(seed).integers(0, 2, size=len(pairs))
    return Digraph(H.n, [(u, v) if c else (v, u) for (u, v), c in zip(pairs, coins)])


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

def directed_cycle(r: int) -> Digraph:
    _positive("r", r, 3)
    return Digraph(r, [(i, (i + 1) % r) for i in range(r)])


def directed_path(k: int) -> Digraph:
    _positive("k", k)
    return Digraph(k, [(i, i + 1) for i in range(k - 1)])


def out_star(k: int) -> Digraph:
    _positive("k", k, 0)
    return Digraph(k + 1, [(0, i) for i in range(1, k + 1)])


def c4_arrow() -> Digraph:
    """C4 with parts {0, 1} and {2, 3}, all edges left to right"""
    return oriented_complete_bipartite(2, 2)


def complete_graph(n: int) -> UndirectedGraph:
    _positive("n", n, 0)
    return UndirectedGraph(n, itertools.combinations(range(n), 2))


def complete_bipartite_graph(a: int, b: int) -> UndirectedGraph:
    _positive("a", a, 0)
    _positive("b", b, 0)
    return UndirectedGraph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def cycle_graph(k: int) -> UndirectedGraph:
    _positive("k", k, 3)
    return UndirectedGraph(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> UndirectedGraph:
    _positive("k", k)
    return UndirectedGraph(k, [(i, i + 1) for i in range(k - 1)])


def directed_girth(G: Digraph) -> Optional[int]:
    """Length of the shortest directed cycle, or None for an acyclic digraph"""
    best = None
    for s in range(G.n):
        visited = 1 << s
        frontier = G.out_masks[s]
        depth = 1
        while frontier and (best is None or depth < best):
            if (frontier >> s) & 1:
                best = depth
                break
            visited |= frontier
            nxt = 0
            for v in members(frontier):
                nxt |= G.out_masks[v]
            # keep s reachable so the cycle closes
            frontier = nxt & ~(visited & ~(1 << s))
            depth += 1
    return best


# ---------------------------------------------------------------------------
# Dyadic-pair check and orientation retries
# ---------------------------------------------------------------------------

class DyadicViolation(NamedTuple):
    level: int
    k: int
    edges_forward: int
    edges_total: int
    deviation: float
    allowed: float


class DyadicCheck(NamedTuple):
    passed: bool
    violation: Optional[DyadicViolation]
    pairs_checked: int
    padded_n: int
    worst_excess: float
    scope: str = "dyadic pairs only"


def dyadic_pair_check(G: Digraph, labeling: Optional[VertexOrdering] = None) -> DyadicCheck:
    """
    Check |e(A,B) - e_bar(A,B)/2| <= 3 sqrt(e_bar(A,B)) sqrt(s ln(eN/s)) for consecutive
    dyadic blocks A = (k 2^i, (k+1) 2^i], B = ((k+1) 2^i, (k+2) 2^i], k even.

    labeling gives vertex labels 1..n by position; labels n+1..N are isolated padding
    up to the next power of two N. Stops at the first violating pair.
    """
    labeling = labeling if labeling is not None else VertexOrdering.identity(G.n)
    if len(labeling) != G.n:
        raise PreconditionError("labeling must cover every vertex", labeling=len(labeling), n=G.n)
    padded = 1
    while padded < G.n:
        padded *= 2

    by_label = list(labeling.order)
    worst = -math.inf
    checked = 0
    size = 1
    level = 0
    while 2 * size <= padded:
        for k in range(0, padded // size - 1, 2):
            lo = k * size
            a = _block_mask(by_label, lo, lo + size)
            b = _block_mask(by_label, lo + size, lo + 2 * size)
            forward = G.edge_count_between(a, b)
            total = forward + G.edge_count_between(b, a)
            deviation = abs(forward - total / 2)
            allowed = 3 * math.sqrt(total) * math.sqrt(size * math.log(math.e * padded / size))
            checked += 1
            worst = max(worst, deviation - allowed)
            if deviation > allowed:
                violation = DyadicViolation(level, k, forward, total, deviation, allowed)
                return DyadicCheck(False, violation, checked, padded, worst)
        size *= 2
        level += 1
    return DyadicCheck(True, None, checked, padded, worst if checked else 0.0)


def _block_mask(by_label: List[int], lo: int, hi: int) -> int:
    mask = 0
    for pos in range(lo, min(hi, len(by_label))):
        mask |= 1 << by_label[pos]
    return mask


class OrientationOutcome(NamedTuple):
    digraph: Digraph
    tries: int
    scope: str = "dyadic pairs of the supplied labelings only"


def orient_until_dyadic(
    H: UndirectedGraph,
    labelings: Optional[Sequence[VertexOrdering]] = None,
    max_tries: int = 100,
    seed: int = 0,
) -> OrientationOutcome:
    """Retry random orientations of H until every labeling passes dyadic_pair_check"""
    _positive("max_tries", max_tries)
    labelings = list(labelings) if labelings else [VertexOrdering.identity(H.n)]
    worst = -math.inf
    for attempt in range(max_tries):
        G = random_orientation(H, derive_seed(seed, attempt))
        checks = [dyadic_pair_check(G, rho) for rho in labelings]
        if all(c.passed for c in checks):
            logger.info(f"orient_until_dyadic: accepted orientation on try {attempt + 1}")
            return OrientationOutcome(G, attempt + 1)
        worst = max([worst] + [c.worst_excess for c in checks])
        logger.debug(f"orient_until_dyadic: try {attempt + 1} rejected")
    raise OrientationExhaustedError(max_tries, worst)


# ---------------------------------------------------------------------------
# Exponent arithmetic
# ---------------------------------------------------------------------------

class SurplusExponent(NamedTuple):
    r: Fraction
    epsilon: Fraction
    exponent: Fraction


def surplus_exponent(q: Rational) -> SurplusExponent:
    """Extremal exponent r = 2/(4q+1) whose surplus exponent 3/4 + (2-r)/(4r) equals 3/4 + q"""
    q = Fraction(q)
    if not 0 <= q <= Fraction(1, 4):
        raise PreconditionError("q must lie in [0, 1/4]", q=q)
    r = Fraction(2) / (4 * q + 1)
    exponent = Fraction(3, 4) + (2 - r) / (4 * r)
    return SurplusExponent(r, 2 - r, exponent)


def girth_surplus_exponent(r: int) -> Fraction:
    """Surplus exponent (r+1)/(r+2) for digraphs whose underlying graph has girth above r"""
    if r < 4 or r % 2:
        raise PreconditionError("r must be an even integer >= 4", r=r)
    return Fraction(r + 1, r + 2)


# ---------------------------------------------------------------------------
# Family registry used by the CLI, the HTTP surface and the experiment runner
# ---------------------------------------------------------------------------

class Family(NamedTuple):
    builder: Callable[..., Digraph]
    params: Tuple[str, ...]
    seeded: bool
    vertices: Callable[..., int]


FAMILIES: Dict[str, Family] = {
    "tournament": Family(random_tournament, ("n",), True, lambda n: n),
    "transitive": Family(transitive_tournament, ("n",), False, lambda n: n),
    "bipartite": Family(oriented_complete_bipartite, ("a", "b"), False, lambda a, b: a + b),
    "bipartite-random": Family(
        lambda a, b, seed=0: oriented_complete_bipartite(a, b, "random", seed), ("a", "b"), True, lambda a, b: a + b
    ),
    "blowup": Family(cycle_blowup, ("r", "t"), False, lambda r, t: (r + 1) * t),
    "gadget": Family(near_acyclic_gadget, ("N",), False, lambda N: 3 * N),
    "cycle": Family(directed_cycle, ("r",), False, lambda r: r),
    "random": Family(random_oriented_graph, ("n", "m"), True, lambda n, m: n),
    "empty": Family(empty_digraph, ("n",), False, lambda n: n),
}


def generate(family: str, params: Dict[str, int], seed: int = 0) -> Digraph:
    """Build a registered family from named integer parameters"""
    if family not in FAMILIES:
        raise PreconditionError(f"unknown family {family!r}", known=", ".join(sorted(FAMILIES)))
    spec = FAMILIES[family]
    missing = [p for p in spec.params if p not in params]
    if missing:
        raise PreconditionError(f"family {family!r} needs parameters {list(spec.params)}", missing=missing)
    kwargs = {p: int(params[p]) for p in spec.params}
    if spec.seeded:
        kwargs["seed"] = seed
    return spec.builder(**kwargs)
