"""Simple graphs, rational vertex distributions, and weighted pair densities.

All three value types are immutable after construction and safe to share
across concurrent tasks.  Every weight is an exact ``fractions.Fraction``;
the core never touches floating point.  Vertex sets are manipulated as
integer bitmasks; constructors reject graphs above an explicit cap (128
vertices) so the exponential cost of the downstream oracles stays visible,
and each expensive oracle carries its own much smaller cap on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Sequence

from .errors import InputError, ZeroMassError

MAX_VERTICES = 128


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices 0..n-1, adjacency as bitmask rows."""

    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if not 0 <= self.n <= MAX_VERTICES:
            raise InputError(f"vertex count {self.n} outside 0..{MAX_VERTICES}")
        if len(self.adj) != self.n:
            raise InputError("adjacency length does not match vertex count")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row & ~full:
                raise InputError(f"adjacency row {i} references vertices >= n")
            if row >> i & 1:
                raise InputError(f"self-loop at vertex {i}")
        for i in range(self.n):
            for j in bits(self.adj[i]):
                if not self.adj[j] >> i & 1:
                    raise InputError(f"adjacency not symmetric at ({i},{j})")

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for i, j in edges:
            if i == j:
                raise InputError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"edge ({i},{j}) out of range")
            if rows[i] >> j & 1:
                raise InputError(f"duplicate edge ({i},{j})")
            rows[i] |= 1 << j
            rows[j] |= 1 << i
        return Graph(n, tuple(rows))

    @staticmethod
    def empty(n: int) -> "Graph":
        return Graph(n, (0,) * n)

    @staticmethod
    def complete(n: int) -> "Graph":
        full = (1 << n) - 1
        return Graph(n, tuple(full ^ (1 << i) for i in range(n)))

    @staticmethod
    def cycle(n: int) -> "Graph":
        if n < 3:
            raise InputError("cycle needs at least 3 vertices")
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @staticmethod
    def path(n: int) -> "Graph":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in bits(self.adj[i]) if i < j]

    def edge_count(self) -> int:
        return sum(row.bit_count() for row in self.adj) // 2

    def edge_mask(self) -> int:
        """Upper-triangle incidence packed into one integer (pair (i,j), i<j)."""
        m = 0
        for k, (i, j) in enumerate(pair_list(self.n)):
            if self.has_edge(i, j):
                m |= 1 << k
        return m

    @staticmethod
    def from_edge_mask(n: int, mask: int) -> "Graph":
        pairs = pair_list(n)
        return Graph.from_edges(n, [pairs[k] for k in bits(mask)])

    def complement(self) -> "Graph":
        full = (1 << self.n) - 1
        return Graph(self.n, tuple((full ^ row ^ (1 << i)) for i, row in enumerate(self.adj)))

    def subgraph(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph, vertices relabelled by their sorted order."""
        vs = sorted(set(vertices))
        pos = {v: k for k, v in enumerate(vs)}
        rows = [0] * len(vs)
        for k, v in enumerate(vs):
            for u in bits(self.adj[v]):
                if u in pos:
                    rows[k] |= 1 << pos[u]
        return Graph(len(vs), tuple(rows))

    def add_vertex(self, neighbours_mask: int) -> "Graph":
        rows = [row | ((neighbours_mask >> i & 1) << self.n) for i, row in enumerate(self.adj)]
        rows.append(neighbours_mask)
        return Graph(self.n + 1, tuple(rows))

    def flip_pair(self, i: int, j: int) -> "Graph":
        rows = list(self.adj)
        rows[i] ^= 1 << j
        rows[j] ^= 1 << i
        return Graph(self.n, tuple(rows))

    def has_triangle(self) -> bool:
        for i in range(self.n):
            row = self.adj[i]
            for j in bits(row):
                if j > i and row & self.adj[j]:
                    return True
        return False

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = 1
        frontier = 1
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= self.adj[v]
            frontier = nxt & ~seen
            seen |= frontier
        return seen == (1 << self.n) - 1

    def has_cycle(self) -> bool:
        """True iff some connected component has at least as many edges as vertices."""
        remaining = (1 << self.n) - 1
        while remaining:
            start = (remaining & -remaining).bit_length() - 1
            comp = 1 << start
            frontier = comp
            while frontier:
                nxt = 0
                for v in bits(frontier):
                    nxt |= self.adj[v]
                frontier = nxt & ~comp
                comp |= frontier
            size = comp.bit_count()
            inner_edges = sum((self.adj[v] & comp).bit_count() for v in bits(comp)) // 2
            if inner_edges >= size:
                return True
            remaining &= ~comp
        return False

    def is_hamiltonian(self) -> bool:
        """Bitmask DP; intended for desk-scale n only."""
        n = self.n
        if n == 0:
            return False
        if n == 1:
            return True
        if n == 2:
            return False
        full = (1 << n) - 1
        # table[mask] = end vertices of paths from 0 covering exactly mask
        table = [0] * (1 << n)
        table[1] = 1  # set of end vertices as bitmask
        for mask in range(1, 1 << n):
            ends = table[mask]
            if not ends or not mask & 1:
                continue
            for v in bits(ends):
                for u in bits(self.adj[v] & ~mask):
                    table[mask | (1 << u)] |= 1 << u
        ends = table[full]
        return bool(ends and ends & self.adj[0])


def pair_list(n: int) -> list[tuple[int, int]]:
    """Canonical ordering of vertex pairs: (0,1),(0,2),...,(n-2,n-1)."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class VertexDistribution:
    """Rational probability distribution on 0..n-1; weights sum to exactly 1."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        for w in self.weights:
            if w < 0:
                raise InputError(f"negative weight {w}")
        if self.weights and sum(self.weights) != 1:
            raise InputError(f"weights sum to {sum(self.weights)}, expected 1")

    @staticmethod
    def uniform(n: int) -> "VertexDistribution":
        return VertexDistribution(tuple(Fraction(1, n) for _ in range(n)))

    @staticmethod
    def of(values: Iterable) -> "VertexDistribution":
        return VertexDistribution(tuple(Fraction(v) for v in values))

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, v: int) -> Fraction:
        return self.weights[v]

    def mass(self, vertices: Iterable[int]) -> Fraction:
        return sum((self.weights[v] for v in set(vertices)), Fraction(0))

    def support(self) -> tuple[int, ...]:
        return tuple(v for v, w in enumerate(self.weights) if w > 0)

    def denominator_lcm(self) -> int:
        return lcm(*(w.denominator for w in self.weights)) if self.weights else 1

    def scaled_integers(self) -> tuple[int, tuple[int, ...]]:
        """(L, integer weights) with weight[v] = ints[v] / L exactly."""
        den = self.denominator_lcm()
        return den, tuple(int(w * den) for w in self.weights)


@dataclass(frozen=True)
class WeightedGraph:
    """A graph together with a distribution on its vertices."""

    graph: Graph
    dist: VertexDistribution

    def __post_init__(self):
        if len(self.dist) != self.graph.n:
            raise InputError("distribution length does not match vertex count")

    @property
    def n(self) -> int:
        return self.graph.n

    @staticmethod
    def uniform(graph: Graph) -> "WeightedGraph":
        return WeightedGraph(graph, VertexDistribution.uniform(graph.n))


def _check_vertex(wg_or_n, v: int):
    n = wg_or_n.n if isinstance(wg_or_n, WeightedGraph) else wg_or_n
    if not 0 <= v < n:
        raise InputError(f"vertex {v} out of range 0..{n - 1}")


def edge_weight(wg: WeightedGraph, x: int, y: int) -> Fraction:
    """Weight of the pair {x,y}: D(x)*D(y), regardless of adjacency."""
    _check_vertex(wg, x)
    _check_vertex(wg, y)
    if x == y:
        raise InputError("edge weight needs two distinct vertices")
    return wg.dist[x] * wg.dist[y]


def set_weight(vertices: Iterable[int], dist: VertexDistribution) -> Fraction:
    """Total weight of a vertex set."""
    total = Fraction(0)
    for v in set(vertices):
        _check_vertex(len(dist), v)
        total += dist[v]
    return total


def conditioned(dist: VertexDistribution, vertices: Iterable[int]) -> VertexDistribution:
    """The distribution conditioned on a set, reindexed by sorted vertex order."""
    vs = sorted(set(vertices))
    total = sum((dist[v] for v in vs), Fraction(0))
    if total == 0:
        raise ZeroMassError("cannot condition on a zero-weight set")
    return VertexDistribution(tuple(dist[v] / total for v in vs))


def induced(wg: WeightedGraph, vertices: Iterable[int]) -> WeightedGraph:
    """The weighted subgraph induced by a set of positive total weight."""
    vs = sorted(set(vertices))
    return WeightedGraph(wg.graph.subgraph(vs), conditioned(wg.dist, vs))


def pair_density(wg: WeightedGraph, xs: Iterable[int], ys: Iterable[int]) -> Fraction:
    """Edge density between two disjoint vertex sets; 0 when either side has no mass."""
    xset, yset = set(xs), set(ys)
    if xset & yset:
        raise InputError("pair density needs disjoint sets")
    dx = wg.dist.mass(xset)
    dy = wg.dist.mass(yset)
    if dx == 0 or dy == 0:
        return Fraction(0)
    ymask = mask_of(yset)
    total = Fraction(0)
    for x in xset:
        wx = wg.dist[x]
        if wx == 0:
            continue
        for y in bits(wg.graph.adj[x] & ymask):
            total += wx * wg.dist[y]
    return total / (dx * dy)


def induced_copies(host: Graph, pattern: Graph) -> list[tuple[int, ...]]:
    """All injective maps V(pattern) -> V(host) preserving adjacency and
    non-adjacency.  Maps with the same image but different role assignments
    are listed separately.  Output sorted for determinism."""
    if pattern.n == 0:
        return [()]
    if pattern.n > host.n:
        return []
    order = sorted(range(pattern.n), key=lambda v: (-pattern.degree(v), v))
    results: list[tuple[int, ...]] = []
    assignment = [-1] * pattern.n
    _match(host, pattern, order, 0, assignment, 0, results, find_all=True)
    return sorted(results)


def induced_copy_exists(host: Graph, pattern: Graph) -> bool:
    """True iff ``pattern`` occurs in ``host`` as an induced subgraph."""
    if pattern.n == 0:
        return True
    if pattern.n > host.n:
        return False
    order = sorted(range(pattern.n), key=lambda v: (-pattern.degree(v), v))
    assignment = [-1] * pattern.n
    return _match(host, pattern, order, 0, assignment, 0, [], find_all=False)


def _match(host, pattern, order, depth, assignment, used_mask, results, find_all):
    if depth == len(order):
        if find_all:
            results.append(tuple(assignment))
            return False
        return True
    p = order[depth]
    for h in range(host.n):
        if used_mask >> h & 1:
            continue
        ok = True
        for q in order[:depth]:
            if pattern.has_edge(p, q) != host.has_edge(h, assignment[q]):
                ok = False
                break
        if not ok:
            continue
        assignment[p] = h
        if _match(host, pattern, order, depth + 1, assignment, used_mask | (1 << h), results, find_all):
            return True
        assignment[p] = -1
    return False


def subgraph_copy_exists(host: Graph, pattern: Graph) -> bool:
    """True iff ``pattern`` occurs as a not-necessarily-induced subgraph."""
    if pattern.n == 0:
        return True
    if pattern.n > host.n:
        return False
    order = sorted(range(pattern.n), key=lambda v: (-pattern.degree(v), v))
    assignment = [-1] * pattern.n

    def rec(depth, used_mask):
        if depth == len(order):
            return True
        p = order[depth]
        for h in range(host.n):
            if used_mask >> h & 1:
                continue
            if any(
                pattern.has_edge(p, q) and not host.has_edge(h, assignment[q])
                for q in order[:depth]
            ):
                continue
            assignment[p] = h
            if rec(depth + 1, used_mask | (1 << h)):
                return True
            assignment[p] = -1
        return False

    return rec(0, 0)


# ---------------------------------------------------------------------------
# Text format: line 1 "n <count>", line 2 "weights <p1/q1> ...", then "e i j".


def format_weighted_graph(wg: WeightedGraph) -> str:
    lines = [f"n {wg.n}"]
    lines.append("weights " + " ".join(f"{w.numerator}/{w.denominator}" for w in wg.dist.weights))
    for i, j in wg.graph.edges():
        lines.append(f"e {i} {j}")
    return "\n".join(lines) + "\n"


def parse_weighted_graph(text: str) -> WeightedGraph:
    n, weights, edges = _parse_graph_lines(text, require_weights=True)
    dist = VertexDistribution(tuple(weights))
    if len(dist) != n:
        raise InputError("weights line does not match vertex count")
    return WeightedGraph(Graph.from_edges(n, edges), dist)


def parse_graph(text: str) -> Graph:
    """Plain graph file: the weights line is optional and ignored."""
    n, _, edges = _parse_graph_lines(text, require_weights=False)
    return Graph.from_edges(n, edges)


def _parse_graph_lines(text: str, require_weights: bool):
    n = None
    weights: list[Fraction] = []
    edges: list[tuple[int, int]] = []
    saw_weights = False
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if n is not None:
                raise InputError("duplicate n line")
            n = int(parts[1])
        elif parts[0] == "weights":
            if saw_weights:
                raise InputError("duplicate weights line")
            saw_weights = True
            try:
                weights = [Fraction(tok) for tok in parts[1:]]
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"bad weight token: {exc}") from exc
        elif parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
        elif parts[0] == "sets":
            continue  # blowup sidecar line, handled by the blowup module
        else:
            raise InputError(f"unrecognized line: {raw!r}")
    if n is None:
        raise InputError("missing n line")
    if require_weights and not saw_weights:
        raise InputError("missing weights line")
    return n, weights, edges
