"""
Graph core
Oriented digraphs on dense integer vertices, vertex orderings, forward/backward
edge accounting, acyclicity and the edge-list text format
"""
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx

from .errors import GraphFormatError, InvariantError

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
VertexSet = Union[int, Iterable[int]]

_LINE_RE = re.compile(r"^([0-9]+) ([0-9]+)$")


def mask_of(vertices: VertexSet) -> int:
    """Bit mask of a vertex collection (an int is taken to already be a mask)"""
    if isinstance(vertices, int):
        return vertices
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def popcount(mask: int) -> int:
    """Number of set bits in a non-negative mask"""
    return bin(mask).count("1")


def members(mask: int) -> FrozenSet[int]:
    """Vertices whose bit is set in mask"""
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def _check_pair(n: int, u: int, v: int, seen: set, line: Optional[int] = None) -> None:
    if not (0 <= u < n and 0 <= v < n):
        raise GraphFormatError(f"vertex out of range [0, {n})", pair=(u, v), line=line)
    if u == v:
        raise GraphFormatError("loop edge", pair=(u, v), line=line)
    if (u, v) in seen:
        raise GraphFormatError("duplicate edge", pair=(u, v), line=line)
    if (v, u) in seen:
        raise GraphFormatError("antiparallel pair", pair=(u, v), line=line)


class Digraph:
    """Immutable oriented simple digraph on vertices 0..n-1 with bitset adjacency"""

    __slots__ = ("_n", "_edges", "_out", "_in")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise GraphFormatError(f"vertex count must be non-negative, got {n}")
        seen = set()
        out_mask = [0] * n
        in_mask = [0] * n
        for u, v in edges:
            _check_pair(n, u, v, seen)
            seen.add((u, v))
            out_mask[u] |= 1 << v
            in_mask[v] |= 1 << u
        self._n = n
        self._edges = frozenset(seen)
        self._out = tuple(out_mask)
        self._in = tuple(in_mask)

    @classmethod
    def empty(cls, n: int) -> "Digraph":
        return cls(n, ())

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def out_masks(self) -> Tuple[int, ...]:
        return self._out

    @property
    def in_masks(self) -> Tuple[int, ...]:
        return self._in

    def sorted_edges(self) -> List[Edge]:
        return sorted(self._edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (self._out[u] >> v) & 1 == 1

    def out_neighbors(self, v: int) -> FrozenSet[int]:
        return members(self._out[v])

    def in_neighbors(self, v: int) -> FrozenSet[int]:
        return members(self._in[v])

    def in_degree(self, v: int) -> int:
        """d+(v): number of edges ending at v"""
        return popcount(self._in[v])

    def out_degree(self, v: int) -> int:
        """d-(v): number of edges leaving v"""
        return popcount(self._out[v])

    def degree(self, v: int) -> int:
        return popcount(self._in[v] | self._out[v])

    def degrees(self) -> List[int]:
        return [self.degree(v) for v in range(self._n)]

    def edge_count_between(self, sources: VertexSet, targets: VertexSet) -> int:
        """e(A, B): edges with tail in A and head in B (A and B may overlap)"""
        a = mask_of(sources)
        b = mask_of(targets)
        total = 0
        v = 0
        while a:
            if a & 1:
                total += popcount(self._out[v] & b)
            a >>= 1
            v += 1
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"Digraph(n={self._n}, m={self.m})"


class UndirectedGraph:
    """Immutable simple undirected graph; edges stored as (min, max) pairs"""

    __slots__ = ("_n", "_edges", "_adj")

    def __init__(self, n: int, edges: Iterable[Edge] = ()):
        if n < 0:
            raise GraphFormatError(f"vertex count must be non-negative, got {n}")
        seen = set()
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"vertex out of range [0, {n})", pair=(u, v))
            if u == v:
                raise GraphFormatError("loop edge", pair=(u, v))
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError("duplicate edge", pair=(u, v))
            seen.add(key)
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self._n = n
        self._edges = frozenset(seen)
        self._adj = tuple(adj)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._edges)

    @property
    def edges(self) -> FrozenSet[Edge]:
        return self._edges

    @property
    def adj_masks(self) -> Tuple[int, ...]:
        return self._adj

    def sorted_edges(self) -> List[Edge]:
        return sorted(self._edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (self._adj[u] >> v) & 1 == 1

    def neighbors(self, v: int) -> FrozenSet[int]:
        return members(self._adj[v])

    def degree(self, v: int) -> int:
        return popcount(self._adj[v])

    def edge_count_between(self, left: VertexSet, right: VertexSet) -> int:
        """Adjacent pairs (a, b) with a in left and b in right; for disjoint sets, the crossing edges"""
        a = mask_of(left)
        b = mask_of(right)
        total = 0
        v = 0
        while a:
            if a & 1:
                total += popcount(self._adj[v] & b)
            a >>= 1
            v += 1
        return total

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self._n))
        g.add_edges_from(self.sorted_edges())
        return g

    def __eq__(self, other) -> bool:
        if not isinstance(other, UndirectedGraph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._n, self._edges))

    def __repr__(self) -> str:
        return f"UndirectedGraph(n={self._n}, m={self.m})"


class VertexOrdering:
    """Bijection vertex -> position, stored as the vertex sequence plus the cached inverse"""

    __slots__ = ("_order", "_position")

    def __init__(self, sequence: Sequence[int]):
        order = tuple(int(v) for v in sequence)
        n = len(order)
        position = [-1] * n
        for idx, v in enumerate(order):
            if not 0 <= v < n or position[v] != -1:
                raise GraphFormatError(f"ordering is not a permutation of 0..{n - 1}: {list(order)}")
            position[v] = idx
        self._order = order
        self._position = tuple(position)

    @classmethod
    def from_sequence(cls, sequence: Sequence[int]) -> "VertexOrdering":
        return cls(sequence)

    @classmethod
    def identity(cls, n: int) -> "VertexOrdering":
        return cls(range(n))

    @property
    def order(self) -> Tuple[int, ...]:
        return self._order

    @property
    def positions(self) -> Tuple[int, ...]:
        return self._position

    def position(self, v: int) -> int:
        return self._position[v]

    def reversed(self) -> "VertexOrdering":
        return VertexOrdering(self._order[::-1])

    def __len__(self) -> int:
        return len(self._order)

    def __iter__(self) -> Iterator[int]:
        return iter(self._order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexOrdering):
            return NotImplemented
        return self._order == other._order

    def __hash__(self) -> int:
        return hash(self._order)

    def __repr__(self) -> str:
        return f"VertexOrdering({list(self._order)})"


class EdgeSplit(NamedTuple):
    forward: int
    backward: int
    backward_edges: FrozenSet[Edge]


class AcyclicityCheck(NamedTuple):
    acyclic: bool
    ordering: Optional[VertexOrdering]


@dataclass(frozen=True)
class FasResult:
    """A feedback arc set with its certifying ordering and surplus bookkeeping"""

    deleted: FrozenSet[Edge]
    ordering: VertexOrdering
    size: int
    surplus: Fraction
    ledger: Tuple = ()
    notes: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class DiscrepancyWitness:
    """A pair of vertex sets with the realized edge difference e(sources, targets) - e(targets, sources)"""

    sources: FrozenSet[int]
    targets: FrozenSet[int]
    difference: int
    disjoint: bool


def witness_from_sets(G: Digraph, sources: Iterable[int], targets: Iterable[int]) -> DiscrepancyWitness:
    """Build a witness by recounting the difference directly from G"""
    a = frozenset(sources)
    b = frozenset(targets)
    diff = G.edge_count_between(a, b) - G.edge_count_between(b, a)
    return DiscrepancyWitness(sources=a, targets=b, difference=diff, disjoint=not (a & b))


def from_edge_list(n: int, pairs: Sequence[Edge]) -> Digraph:
    """Build a digraph, rejecting loops, antiparallel pairs, duplicates and out-of-range vertices"""
    return Digraph(n, [(int(u), int(v)) for u, v in pairs])


def parse_edge_list(text: str) -> Digraph:
    """
    Parse the canonical edge-list format: "n m" then m lines "u v", LF line endings.
    Every violation is reported with its 1-based line number.
    """
    if "\r" in text:
        raise GraphFormatError("CR characters are not allowed (LF line endings only)")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphFormatError("missing header line 'n m'", line=1)

    header = _LINE_RE.match(lines[0])
    if not header:
        raise GraphFormatError(f"malformed header {lines[0]!r}, expected 'n m'", line=1)
    n, m = int(header.group(1)), int(header.group(2))

    body = lines[1:]
    if len(body) < m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(body)}", line=len(lines) + 1)
    if len(body) > m:
        raise GraphFormatError(f"unexpected extra line {body[m]!r} after {m} edges", line=m + 2)

    seen = set()
    pairs = []
    for offset, raw in enumerate(body):
        line_no = offset + 2
        match = _LINE_RE.match(raw)
        if not match:
            raise GraphFormatError(f"malformed edge line {raw!r}, expected 'u v'", line=line_no)
        u, v = int(match.group(1)), int(match.group(2))
        _check_pair(n, u, v, seen, line=line_no)
        seen.add((u, v))
        pairs.append((u, v))
    return Digraph(n, pairs)


def format_edge_list(G: Digraph) -> str:
    """Canonical text: header then edges in lexicographic order, LF terminated"""
    rows = [f"{G.n} {G.m}\n"]
    rows.extend(f"{u} {v}\n" for u, v in G.sorted_edges())
    return "".join(rows)


def read_edge_list(path: Union[str, Path]) -> Digraph:
    data = Path(path).read_bytes()
    for line_no, raw in enumerate(data.split(b"\n"), start=1):
        try:
            raw.decode("ascii")
        except UnicodeDecodeError as exc:
            raise GraphFormatError(f"non-ASCII byte 0x{raw[exc.start]:02x}", line=line_no) from exc
    return parse_edge_list(data.decode("ascii"))


def write_edge_list(G: Digraph, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_edge_list(G))


def to_networkx(G: Digraph) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(G.n))
    g.add_edges_from(G.sorted_edges())
    return g


def underlying_undirected(G: Digraph) -> UndirectedGraph:
    return UndirectedGraph(G.n, G.edges)


def is_acyclic(G: Digraph) -> AcyclicityCheck:
    """True iff G has no directed cycle; the witness is the lexicographically first topological order"""
    g = to_networkx(G)
    if not nx.is_directed_acyclic_graph(g):
        return AcyclicityCheck(False, None)
    return AcyclicityCheck(True, VertexOrdering(list(nx.lexicographical_topological_sort(g))))


def backward_edges(G: Digraph, ordering: VertexOrdering) -> EdgeSplit:
    if len(ordering) != G.n:
        raise GraphFormatError(f"ordering covers {len(ordering)} vertices, digraph has {G.n}")
    pos = ordering.positions
    back = frozenset((u, v) for u, v in G.edges if pos[u] > pos[v])
    return EdgeSplit(G.m - len(back), len(back), back)


def surplus(G: Digraph, ordering: VertexOrdering) -> Fraction:
    """(forward - backward) / 2 under the ordering"""
    split = backward_edges(G, ordering)
    return Fraction(split.forward - split.backward, 2)


def fas_from_ordering(G: Digraph, ordering: VertexOrdering) -> FasResult:
    """Delete the smaller of the forward and backward sets (reversing the ordering if needed)"""
    split = backward_edges(G, ordering)
    if split.backward > split.forward:
        ordering = ordering.reversed()
        split = backward_edges(G, ordering)
    return FasResult(
        deleted=split.backward_edges,
        ordering=ordering,
        size=split.backward,
        surplus=Fraction(split.forward - split.backward, 2),
    )


def remove_edges(G: Digraph, deleted: Iterable[Edge]) -> Digraph:
    gone = set(deleted)
    return Digraph(G.n, [e for e in G.sorted_edges() if e not in gone])


def verify_fas(G: Digraph, result: FasResult) -> bool:
    """Re-validate a FAS: sizes agree, deleted edges are backward, and the residual is acyclic"""
    if result.size != len(result.deleted):
        raise InvariantError("FAS size disagrees with deleted edge count", len(result.deleted), result.size)
    pos = result.ordering.positions
    for u, v in result.deleted:
        if not G.has_edge(u, v):
            raise InvariantError("deleted edge not in digraph", "an edge of G", (u, v))
        if pos[u] < pos[v]:
            raise InvariantError("deleted edge is forward under the certifying ordering", "backward", (u, v))
    if not is_acyclic(remove_edges(G, result.deleted)).acyclic:
        raise InvariantError("residual digraph", "acyclic", "contains a cycle")
    return True


def induced_subgraph(G: Digraph, vertices: Iterable[int]) -> Digraph:
    """G[U] relabeled to 0..|U|-1 in increasing vertex order"""
    keep = sorted(set(vertices))
    index = {v: i for i, v in enumerate(keep)}
    return Digraph(
        len(keep),
        [(index[u], index[v]) for u, v in G.sorted_edges() if u in index and v in index],
    )
