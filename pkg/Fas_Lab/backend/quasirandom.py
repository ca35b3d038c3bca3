"""
Quasirandom diagnostics
Signed adjacency, trace and switch-walk identities, spectral radii, biased subgraphs,
the C4 alternation ratio, the degree-balance identity and the combined report
"""
import logging
from typing import Dict, NamedTuple, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from .constructions import cycle_graph
from .discrepancy import prefix_cut_witness
from .errors import ConvergenceError, InvariantError, PreconditionError
from .exact_oracle import (
    ExactBudget,
    count_labeled,
    count_labeled_undirected,
    even_odd_switch_counts,
    exact_matrix_power,
    popcount_table,
    tau_exact,
    tau_partition_exact,
    tau_star_exact,
)
from .graph_core import Digraph, DiscrepancyWitness, members, underlying_undirected, witness_from_sets
from .greedy_fas import randomized_fas

logger = logging.getLogger(__name__)

# Labelled 4-cycle 0-1-2-3-0 with edge directions alternating around it
_C4_ALTERNATING = (
    Digraph(4, [(0, 1), (2, 1), (2, 3), (0, 3)]),
    Digraph(4, [(1, 0), (1, 2), (3, 2), (3, 0)]),
)


def signed_adjacency(G: Digraph) -> np.ndarray:
    """A[u, v] = 1 for u -> v, -1 for v -> u, else 0"""
    A = np.zeros((G.n, G.n), dtype=np.int64)
    for u, v in G.edges:
        A[u, v] = 1
        A[v, u] = -1
    if not np.array_equal(A, -A.T):
        raise InvariantError("signed adjacency", "skew-symmetric", "asymmetric entries")
    return A


def absolute_adjacency(G: Digraph) -> np.ndarray:
    """Adjacency matrix of the underlying undirected graph"""
    return np.abs(signed_adjacency(G))


def trace_power(matrix: np.ndarray, k: int) -> int:
    """Tr(M^k) in exact integer arithmetic"""
    if k < 1:
        raise PreconditionError("k must be at least 1", k=k)
    if matrix.shape[0] == 0:
        return 0
    power = exact_matrix_power(matrix, k)
    return sum(int(power[i, i]) for i in range(matrix.shape[0]))


class TraceSwitch(NamedTuple):
    trace: int
    even: int
    odd: int


def trace_switch_identity(G: Digraph, k: int, budget: Optional[ExactBudget] = None) -> TraceSwitch:
    """Tr(A^k) = E_k - O_k and E_k + O_k = Tr(|A|^k), both checked exactly"""
    counts = even_odd_switch_counts(G, k, budget)
    A = signed_adjacency(G)
    trace = trace_power(A, k)
    walks = trace_power(np.abs(A), k)
    if trace != counts.even - counts.odd:
        raise InvariantError(f"Tr(A^{k}) vs E_k - O_k", counts.even - counts.odd, trace)
    if walks != counts.even + counts.odd:
        raise InvariantError(f"Tr(|A|^{k}) vs E_k + O_k", counts.even + counts.odd, walks)
    return TraceSwitch(trace, counts.even, counts.odd)


def _power_iteration(gram: np.ndarray, start: np.ndarray, tol: float, max_iterations: int) -> Optional[float]:
    """Dominant eigenvalue of a PSD matrix from `start`; None when the iterate collapses to zero"""
    x = start / np.linalg.norm(start)
    residual = np.inf
    for _ in range(max_iterations):
        y = gram @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return None
        lam = float(x @ y)
        residual = float(np.linalg.norm(y - lam * x)) / max(lam, np.finfo(float).tiny)
        if residual <= tol:
            return lam
        x = y / norm
    raise ConvergenceError(residual, max_iterations)


def _largest_singular_value(M: np.ndarray, tol: float, max_iterations: int) -> float:
    n = M.shape[0]
    if n < 1:
        raise PreconditionError("matrix must have at least one row", n=n)
    if not M.any():
        return 0.0
    gram = (M.T @ M).astype(float)
    values = []
    lam = _power_iteration(gram, np.ones(n), tol, max_iterations)
    if lam is not None:
        values.append(lam)
    # all-ones may sit inside a non-dominant eigenspace; a fixed second start covers it
    reseeded = np.random.default_rng(0).standard_normal(n)
    lam = _power_iteration(gram, reseeded, tol, max_iterations)
    if lam is not None:
        values.append(lam)
    if not values:
        raise ConvergenceError(float("nan"), max_iterations)
    return float(np.sqrt(max(values)))


def spectral_radius_signed(A: np.ndarray, tol: float = 1e-9, max_iterations: int = 100_000) -> float:
    """|lambda_1(G)| as the largest singular value of the skew-symmetric A, via power iteration on A^T A"""
    return _largest_singular_value(A, tol, max_iterations)


def spectral_radius_undirected(G: Digraph, tol: float = 1e-9, max_iterations: int = 100_000) -> float:
    """|lambda_1| of the underlying undirected graph"""
    return _largest_singular_value(absolute_adjacency(G), tol, max_iterations)


class BiasResult(NamedTuple):
    value: int
    witness: DiscrepancyWitness
    mode: str


def _bias_exact(G: Digraph, delta: float) -> BiasResult:
    n = G.n
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    pc = popcount_table(n)
    # into[A, w] = edges from A into w; bits[w, B] = 1 when w is in B
    into = np.stack([pc[masks & G.in_masks[w]] for w in range(n)], axis=1)
    bits = np.stack([(masks >> w) & 1 for w in range(n)], axis=0)
    best_value, best_pair = 0, (0, 0)
    block = 256
    for start in range(0, size, block):
        rows = slice(start, min(start + block, size))
        forward = into[rows] @ bits              # e(A, B) for A in the block
        backward = bits[:, rows].T @ into.T      # e(B, A) for A in the block
        allowed = forward.astype(float) * delta >= backward
        scores = np.where(allowed, forward, -1)
        idx = int(np.argmax(scores))
        value = int(scores.flat[idx])
        if value > best_value:
            best_value = value
            best_pair = (start + idx // size, idx % size)
    witness = witness_from_sets(G, members(best_pair[0]), members(best_pair[1]))
    return BiasResult(best_value, witness, "exact")


def _bias_heuristic(G: Digraph, delta: float) -> BiasResult:
    candidates = []
    for v in range(G.n):
        candidates.append(({v}, G.out_neighbors(v)))
        candidates.append((G.in_neighbors(v), {v}))
    sources = {v for v in range(G.n) if G.out_degree(v) > G.in_degree(v)}
    candidates.append((sources, set(range(G.n)) - sources))
    cut = prefix_cut_witness(G, randomized_fas(G, trials=10, seed=0).ordering)
    candidates.append((cut.sources, cut.targets))

    best_value, best = 0, (frozenset(), frozenset())
    for a, b in candidates:
        forward = G.edge_count_between(a, b)
        if forward > best_value and G.edge_count_between(b, a) <= delta * forward:
            best_value, best = forward, (a, b)
    return BiasResult(best_value, witness_from_sets(G, best[0], best[1]), "heuristic")


def bias_subgraph(G: Digraph, delta: float, budget: Optional[ExactBudget] = None) -> BiasResult:
    """Largest e(A, B) over pairs with e(B, A) <= delta e(A, B); exact within budget, a lower bound beyond"""
    if not 0 < delta < 1:
        raise PreconditionError("delta must lie in (0, 1)", delta=delta)
    budget = budget or ExactBudget.from_settings()
    if G.m == 0:
        return BiasResult(0, witness_from_sets(G, (), ()), "exact")
    if G.n <= budget.max_n_bias:
        return _bias_exact(G, delta)
    logger.debug(f"bias_subgraph: n={G.n} beyond exact budget, using heuristic candidates")
    return _bias_heuristic(G, delta)


class C4Ratio(NamedTuple):
    directed: int
    undirected: int
    ratio: Optional[float]


def c4_arrow_ratio(G: Digraph, budget: Optional[ExactBudget] = None) -> C4Ratio:
    """Labelled alternating 4-cycles of G over labelled 4-cycles of the underlying graph"""
    directed = sum(count_labeled(pattern, G, budget) for pattern in _C4_ALTERNATING)
    undirected = count_labeled_undirected(cycle_graph(4), underlying_undirected(G), budget)
    ratio = directed / undirected if undirected else None
    return C4Ratio(directed, undirected, ratio)


class BalanceIdentity(NamedTuple):
    balance_defect: int
    twice_tau_partition: int
    sources: frozenset


class BalancePartition(NamedTuple):
    sources: frozenset
    sinks: frozenset
    tau_part: int


def balance_partition(G: Digraph) -> BalancePartition:
    """Bipartition A = {out-degree > in-degree}, B = V - A; it attains tau-partition in polynomial time"""
    sources = frozenset(v for v in range(G.n) if G.out_degree(v) > G.in_degree(v))
    sinks = frozenset(range(G.n)) - sources
    tau_part = G.edge_count_between(sources, sinks) - G.edge_count_between(sinks, sources)
    return BalancePartition(sources, sinks, tau_part)


def balance_identity(G: Digraph, budget: Optional[ExactBudget] = None) -> BalanceIdentity:
    """
    Sum of |d+(v) - d-(v)| equals 2 tau-partition, checked against the balance partition
    and, within budget, against the exhaustive oracle
    """
    budget = budget or ExactBudget.from_settings()
    defect = sum(abs(G.in_degree(v) - G.out_degree(v)) for v in range(G.n))
    sources, _, tau_part = balance_partition(G)
    if defect != 2 * tau_part:
        raise InvariantError("balance defect vs 2 tau-partition", 2 * tau_part, defect)
    if G.n <= budget.max_n_tau:
        exhaustive = tau_partition_exact(G, budget)
        if exhaustive != tau_part:
            raise InvariantError("balance construction vs exhaustive tau-partition", exhaustive, tau_part)
    return BalanceIdentity(defect, 2 * tau_part, sources)


class QuasirandomReport(BaseModel):
    """Normalized scores for one digraph; exact_flags tells which values are exact"""

    n: int
    m: int
    tau: int
    tau_star: int
    tau_part: int
    pi_proxy: float
    c4_ratio: Optional[float]
    ek_ratio: Dict[int, Optional[float]]
    trace_ratio: Dict[int, Optional[float]]
    lambda_ratio: Optional[float]
    bias: int
    balance_defect: int
    exact_flags: Dict[str, bool]


def _ratio(numerator, denominator) -> Optional[float]:
    return numerator / denominator if denominator else None


def quasirandom_report(
    G: Digraph,
    delta: float = 0.5,
    ks: Sequence[int] = (4, 6),
    budget: Optional[ExactBudget] = None,
    trials: int = 20,
    seed: int = 0,
) -> QuasirandomReport:
    """Assemble every diagnostic; no quasirandom verdict is emitted, only ratios"""
    budget = budget or ExactBudget.from_settings()
    balance = balance_identity(G, budget)
    tau_part = balance.twice_tau_partition // 2

    proxy = randomized_fas(G, trials=trials, seed=seed) if G.n else None
    pi_proxy = float(proxy.surplus) if proxy else 0.0

    flags = {"tau_part": True, "c4_ratio": True, "ek_ratio": True, "trace_ratio": True}
    if G.n <= budget.max_n_tau:
        tau_star, _ = tau_star_exact(G, budget)
        flags["tau_star"] = True
    else:
        cut = prefix_cut_witness(G, proxy.ordering)
        tau_star = max(tau_part, cut.difference)
        flags["tau_star"] = False
    if G.n <= budget.max_n_tau_full:
        tau, _ = tau_exact(G, budget)
        flags["tau"] = True
    else:
        tau = tau_star
        flags["tau"] = False

    c4 = c4_arrow_ratio(G, budget)
    ek_ratio: Dict[int, Optional[float]] = {}
    trace_ratio: Dict[int, Optional[float]] = {}
    for k in ks:
        identity = trace_switch_identity(G, k, budget)
        walks = identity.even + identity.odd
        ek_ratio[k] = _ratio(identity.even, walks)
        trace_ratio[k] = _ratio(identity.trace, walks)

    if G.n:
        lam_signed = spectral_radius_signed(signed_adjacency(G))
        lam_plain = spectral_radius_undirected(G)
        lambda_ratio = _ratio(lam_signed, lam_plain)
    else:
        lambda_ratio = None
    flags["lambda_ratio"] = False

    bias = bias_subgraph(G, delta, budget)
    flags["bias"] = bias.mode == "exact"
    flags["pi_proxy"] = False

    return QuasirandomReport(
        n=G.n,
        m=G.m,
        tau=tau,
        tau_star=tau_star,
        tau_part=tau_part,
        pi_proxy=pi_proxy,
        c4_ratio=c4.ratio,
        ek_ratio=ek_ratio,
        trace_ratio=trace_ratio,
        lambda_ratio=lambda_ratio,
        bias=bias.value,
        balance_defect=balance.balance_defect,
        exact_flags=flags,
    )
