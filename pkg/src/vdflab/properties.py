"""Graph properties, extendability, and the good/bad vertex-count machinery.

A property is a decision oracle over graphs.  Oracles must be pure,
isomorphism-closed functions of the abstract graph (never of vertex labels);
decisions are memoized per property object.  Hereditary properties are
closed under vertex removal, which the test suite spot-checks rather than
trusts.

A graph F is *good* for a hereditary property P when F satisfies P and for
every r > |V(F)| some r-vertex graph in P contains F as an induced
subgraph; otherwise F is *bad*.  Non-members are bad with dead-end count
|V(F)|+1.  The derived core property of P forbids every bad graph as an
induced subgraph; it is hereditary, extendable, and contained in P.  Badness
is only decidable up to an explicit vertex cap, so the core oracle and
everything downstream report "good up to r_max", never "good".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Optional

from .canon import all_graphs_up_to, canonical_code
from .errors import ContractError, InputError, ResourceLimitError
from .wgraph import (
    Graph,
    bits,
    induced_copy_exists,
    parse_graph,
    subgraph_copy_exists,
)

DEFAULT_R_MAX = 8
DEFAULT_SIZE_CAP = 8


class GraphProperty:
    """Named decision oracle with memoized, label-insensitive answers."""

    def __init__(self, name: str, oracle: Callable[[Graph], bool],
                 forbidden: Optional[tuple[Graph, ...]] = None,
                 hereditary: bool = False):
        self.name = name
        self._oracle = oracle
        self.forbidden = forbidden
        self.hereditary = hereditary
        self._memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def holds(self, g: Graph) -> bool:
        key = (g.n, g.adj)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = bool(self._oracle(g))
        return hit

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r}>"


class HereditaryProperty(GraphProperty):
    def __init__(self, name, oracle, forbidden=None):
        super().__init__(name, oracle, forbidden, hereditary=True)

    @staticmethod
    def from_forbidden(name: str, family: tuple[Graph, ...], induced: bool = True) -> "HereditaryProperty":
        check = induced_copy_exists if induced else subgraph_copy_exists
        return HereditaryProperty(
            name,
            lambda g: not any(check(g, f) for f in family),
            forbidden=family,
        )


def satisfies(prop: GraphProperty, g: Graph) -> bool:
    return prop.holds(g)


@dataclass(frozen=True)
class BadnessRecord:
    """Outcome of the dead-end search for a property member."""

    graph: Graph
    r: Optional[int]          # minimal vertex count with no extension, if found
    searched_up_to: int


def is_extendable_at(prop: GraphProperty, g: Graph) -> bool:
    """Can one more vertex be attached so the result still satisfies the property?"""
    if not prop.holds(g):
        raise ContractError("extendability is defined for members only")
    return any(prop.holds(g.add_vertex(mask)) for mask in range(1 << g.n))


def _neighbourhood_order(k: int):
    """Try the empty and full attachments first; they succeed for most properties."""
    yield 0
    full = (1 << k) - 1
    if full:
        yield full
    for mask in range(1, full):
        yield mask


def extension_exists(prop: GraphProperty, f: Graph, r: int, size_cap: int = 12) -> bool:
    """Is there an r-vertex graph satisfying the property that contains ``f``
    as an induced subgraph?  Fixes ``f`` on the first |V(f)| vertices and
    backtracks over the remaining adjacencies; sound because properties are
    isomorphism-closed, and prefixes prune because they are hereditary."""
    if r < f.n:
        return False
    if r > size_cap:
        raise ResourceLimitError(f"extension search capped at {size_cap} vertices")
    if not prop.holds(f):
        return False
    if not prop.hereditary:
        raise ContractError("extension search requires a hereditary property")

    def grow(current: Graph) -> bool:
        if current.n == r:
            return True
        for mask in _neighbourhood_order(current.n):
            nxt = current.add_vertex(mask)
            if prop.holds(nxt) and grow(nxt):
                return True
        return False

    return grow(f)


def badness(prop: HereditaryProperty, f: Graph, r_max: int = DEFAULT_R_MAX,
            size_cap: int = 12) -> BadnessRecord:
    """Minimal r in (|V(f)|, r_max] at which no member contains ``f`` induced.

    Requires ``f`` to satisfy the property.  Extendability at r implies
    extendability below r (delete vertices), so a single search at r_max
    settles goodness within the cap and the minimal failing r is found by
    bisection."""
    if not prop.holds(f):
        raise ContractError("badness is defined for members only")
    if r_max < f.n + 1:
        raise InputError("r_max must exceed the vertex count of the graph")
    if r_max > size_cap:
        raise ResourceLimitError(f"badness search capped at {size_cap} vertices")
    if extension_exists(prop, f, r_max, size_cap):
        return BadnessRecord(f, None, r_max)
    lo, hi = f.n, r_max  # extension exists at lo, fails at hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if extension_exists(prop, f, mid, size_cap):
            lo = mid
        else:
            hi = mid
    return BadnessRecord(f, hi, r_max)


def _bad_value(prop: HereditaryProperty, f: Graph, r_max: int) -> Optional[int]:
    """Dead-end count of any graph: non-members die at |V(f)|+1 by hereditarity."""
    if not prop.holds(f):
        return f.n + 1
    return badness(prop, f, r_max).r


def R_bound(prop: HereditaryProperty, s: int, r_max: int = DEFAULT_R_MAX) -> int:
    """Maximum dead-end count over all bad graphs with at most s vertices
    (0 when no graph that small is bad within the cap)."""
    best = 0
    for f in all_graphs_up_to(s):
        r = _bad_value(prop, f, r_max)
        if r is not None:
            best = max(best, r)
    return best


def hereditary_core(prop: HereditaryProperty, r_max: int = DEFAULT_R_MAX) -> HereditaryProperty:
    """The property forbidding every bad graph as an induced subgraph.

    Contained in the base property, hereditary, and extendable; equals the
    base property when that is extendable.  Badness of the induced subgraphs
    is decided up to ``r_max`` and memoized by isomorphism class."""
    bad_cache: dict[tuple[int, int], bool] = {}

    def is_bad(f: Graph) -> bool:
        key = (f.n, canonical_code(f))
        hit = bad_cache.get(key)
        if hit is None:
            hit = bad_cache[key] = _bad_value(prop, f, max(r_max, f.n + 1)) is not None
        return hit

    def oracle(g: Graph) -> bool:
        seen: set[tuple[int, int]] = set()
        for size in range(1, g.n + 1):
            for combo in combinations(range(g.n), size):
                sub = g.subgraph(combo)
                key = (sub.n, canonical_code(sub))
                if key in seen:
                    continue
                seen.add(key)
                if is_bad(sub):
                    return False
        return True

    return HereditaryProperty(f"core({prop.name})", oracle)


def minimal_forbidden_family(prop: HereditaryProperty, n_max: int) -> list[Graph]:
    """Non-members all of whose proper induced subgraphs are members,
    up to isomorphism and up to ``n_max`` vertices."""
    out = []
    for f in all_graphs_up_to(n_max):
        if prop.holds(f):
            continue
        if all(prop.holds(f.subgraph([v for v in range(f.n) if v != drop]))
               for drop in range(f.n)):
            out.append(f)
    return out


def closed_under_blowups(prop: HereditaryProperty, n_max: int, b_max: int,
                         total_cap: int = 8):
    """Sampled certificate that blowing members up with independent sets stays
    in the property.  Returns (True, None) when no violation exists at this
    scale, else (False, (base, sizes, blowup))."""
    from .blowup import blowup_graph  # local import; blowup depends on wgraph only

    for base in all_graphs_up_to(n_max):
        if not prop.holds(base):
            continue
        for sizes in product(range(b_max + 1), repeat=base.n):
            total = sum(sizes)
            if total == 0 or total > total_cap:
                continue
            blown = blowup_graph(base, sizes, "empty")
            if not prop.holds(blown):
                return False, (base, sizes, blown)
    return True, None


# ---------------------------------------------------------------------------
# Named small graphs used by the built-in properties.


def two_edge_path() -> Graph:
    return Graph.path(3)


def diamond_graph() -> Graph:
    """Two-edge path plus a vertex adjacent to all of it (K4 minus an edge)."""
    return Graph.from_edges(4, [(0, 1), (1, 2), (3, 0), (3, 1), (3, 2)])


def path_plus_isolated() -> Graph:
    """Two-edge path plus an isolated vertex."""
    return Graph.from_edges(4, [(0, 1), (1, 2)])


# ---------------------------------------------------------------------------
# Built-in properties selectable by string id.


def _k_colorable(g: Graph, k: int) -> bool:
    colors = [-1] * g.n
    order = sorted(range(g.n), key=lambda v: -g.degree(v))

    def assign(idx: int) -> bool:
        if idx == g.n:
            return True
        v = order[idx]
        used = {colors[u] for u in bits(g.adj[v]) if colors[u] >= 0}
        for c in range(min(k, idx + 1)):
            if c in used:
                continue
            colors[v] = c
            if assign(idx + 1):
                return True
            colors[v] = -1
        return False

    return assign(0)


def _every_cycle_hamiltonian(g: Graph) -> bool:
    """No cycle that misses a vertex, i.e. no cycle-plus-spare-vertex subgraph."""
    if not g.has_cycle():
        return True
    for drop in range(g.n):
        if g.subgraph([v for v in range(g.n) if v != drop]).has_cycle():
            return False
    return True


def builtin_property(spec: str, read_file=None) -> GraphProperty:
    """Resolve a property id such as ``triangle-free`` or ``k-colorable:3``.

    ``read_file`` maps a path to file text for the ``*-free:<graphfile>``
    forms; defaults to reading from disk.
    """
    if read_file is None:
        def read_file(path):
            with open(path, "r", encoding="utf-8") as fh:
                return fh.read()

    if spec == "triangle-free":
        return HereditaryProperty("triangle-free", lambda g: not g.has_triangle(),
                                  forbidden=(Graph.complete(3),))
    if spec == "edge-free":
        return HereditaryProperty("edge-free", lambda g: g.edge_count() == 0,
                                  forbidden=(Graph.complete(2),))
    if spec == "complete":
        return HereditaryProperty(
            "complete", lambda g: g.edge_count() == g.n * (g.n - 1) // 2,
            forbidden=(Graph.empty(2),))
    if spec == "cycle-star-free":
        # forbids every cycle-plus-isolated-vertex subgraph (all lengths)
        return HereditaryProperty("cycle-star-free", _every_cycle_hamiltonian)
    if spec == "AB-free":
        return HereditaryProperty.from_forbidden(
            "AB-free", (diamond_graph(), path_plus_isolated()), induced=True)
    if spec == "connected":
        return GraphProperty("connected", lambda g: g.is_connected())
    if spec == "hamiltonian":
        return GraphProperty("hamiltonian", lambda g: g.is_hamiltonian())
    if spec.startswith("k-colorable:"):
        k = int(spec.split(":", 1)[1])
        if k < 1:
            raise InputError("k-colorable needs k >= 1")
        return HereditaryProperty(spec, lambda g, k=k: _k_colorable(g, k))
    if spec.startswith("induced-H-free:"):
        h = parse_graph(read_file(spec.split(":", 1)[1]))
        return HereditaryProperty.from_forbidden(spec, (h,), induced=True)
    if spec.startswith("H-free:"):
        h = parse_graph(read_file(spec.split(":", 1)[1]))
        return HereditaryProperty.from_forbidden(spec, (h,), induced=False)
    if spec.startswith("edge-density-le:"):
        bound = Fraction(spec.split(":", 1)[1])
        return GraphProperty(
            spec, lambda g: 2 * g.edge_count() * bound.denominator <= bound.numerator * g.n * g.n)
    raise InputError(f"unknown property id {spec!r}")
