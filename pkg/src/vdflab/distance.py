"""Exact weighted edit distance and distance-to-property oracles.

``distance_to_property`` is the ground truth behind every soundness
experiment: a branch-and-bound search over candidate graphs on the same
vertex set, exact in rationals.  Costs are handled as integers over the
squared common denominator of the vertex weights, so pruning comparisons
are pure integer arithmetic.

Witness canonicalization: among all minimizing witnesses the search returns
the one minimizing (number of changed zero-weight pairs, upper-triangle
edge mask).  Zero-weight pairs are free to change, so without the first
tie-break the witness would be arbitrary; with it the witness agrees with
the input wherever membership allows.
"""

from __future__ import annotations

from fractions import Fraction
from math import inf
from typing import Optional

from .errors import EmptyPropertyError, InputError, ResourceLimitError
from .properties import GraphProperty
from .wgraph import Graph, VertexDistribution, WeightedGraph, bits, pair_list

BRUTE_FORCE_CAP = 7


def edit_distance(g1: Graph, g2: Graph, dist: VertexDistribution) -> Fraction:
    """Total weight of the pairs on which the two graphs disagree."""
    if g1.n != g2.n:
        raise InputError("edit distance needs graphs on the same vertex set")
    if len(dist) != g1.n:
        raise InputError("distribution does not match the vertex count")
    total = Fraction(0)
    for i in range(g1.n):
        diff = g1.adj[i] ^ g2.adj[i]
        for j in bits(diff):
            if j > i:
                total += dist[i] * dist[j]
    return total


def is_far(wg: WeightedGraph, prop: GraphProperty, eps, cap: int = BRUTE_FORCE_CAP) -> bool:
    """Exact comparison distance >= eps."""
    return distance_to_property(wg, prop, cap)[0] >= Fraction(eps)


def distance_to_property(wg: WeightedGraph, prop: GraphProperty,
                         cap: int = BRUTE_FORCE_CAP) -> tuple[Fraction, Graph]:
    """Minimum edit distance to a member of the property, with a witness.

    Searches edge subsets by increasing cost with incumbent pruning, paid
    pairs heaviest-first so the all-keep branch is reached first.  Exact;
    intended for n <= cap only."""
    n = wg.n
    if n > cap:
        raise ResourceLimitError(f"distance search capped at {cap} vertices")
    pairs = pair_list(n)
    _, iw = wg.dist.scaled_integers()
    den2 = sum(iw) ** 2 if iw else 1
    weights = [iw[i] * iw[j] for (i, j) in pairs]
    paid = sorted((k for k in range(len(pairs)) if weights[k] > 0),
                  key=lambda k: (-weights[k], k))
    free = [k for k in range(len(pairs)) if weights[k] == 0]
    free_levels: list[list[int]] = [[] for _ in range(len(free) + 1)]
    for m in range(1 << len(free)):
        mapped = 0
        for bit in bits(m):
            mapped |= 1 << free[bit]
        free_levels[m.bit_count()].append(mapped)

    base_mask = wg.graph.edge_mask()
    member_memo: dict[int, bool] = {}

    def is_member(mask: int) -> bool:
        hit = member_memo.get(mask)
        if hit is None:
            hit = member_memo[mask] = prop.holds(Graph.from_edge_mask(n, mask))
        return hit

    best: list = [inf, inf, inf]  # cost, free changes, witness edge mask

    def leaf(flip_mask: int, cost: int):
        start = base_mask ^ flip_mask
        for changes, level in enumerate(free_levels):
            if (cost, changes) > (best[0], best[1]):
                return
            found = None
            for fm in level:
                mask = start ^ fm
                if is_member(mask) and (found is None or mask < found):
                    found = mask
            if found is not None:
                cand = [cost, changes, found]
                if cand < best:
                    best[:] = cand
                return

    def search(idx: int, cost: int, flip_mask: int):
        if cost > best[0]:
            return
        if cost == best[0]:
            # further flips only increase cost; evaluate the keep-everything leaf
            leaf(flip_mask, cost)
            return
        if idx == len(paid):
            leaf(flip_mask, cost)
            return
        k = paid[idx]
        search(idx + 1, cost, flip_mask)
        search(idx + 1, cost + weights[k], flip_mask | (1 << k))

    search(0, 0, 0)
    if best[0] is inf:
        raise EmptyPropertyError(
            f"no {n}-vertex graph satisfies {prop.name!r}")
    return Fraction(best[0], den2), Graph.from_edge_mask(n, best[2])


def enumeration_distance(wg: WeightedGraph, prop: GraphProperty,
                         cap: int = 5) -> Fraction:
    """Plain full enumeration of all graphs on the vertex set.

    Independent reference for the branch-and-bound search; no pruning."""
    n = wg.n
    if n > cap:
        raise ResourceLimitError(f"plain enumeration capped at {cap} vertices")
    pairs = pair_list(n)
    weights = [wg.dist[i] * wg.dist[j] for (i, j) in pairs]
    base = wg.graph.edge_mask()
    best: Optional[Fraction] = None
    for mask in range(1 << len(pairs)):
        if not prop.holds(Graph.from_edge_mask(n, mask)):
            continue
        cost = sum((weights[k] for k in bits(mask ^ base)), Fraction(0))
        if best is None or cost < best:
            best = cost
    if best is None:
        raise EmptyPropertyError(f"no {n}-vertex graph satisfies {prop.name!r}")
    return best


def distance_to_property_closed_form(wg: WeightedGraph, prop: GraphProperty) -> Fraction:
    """Fast exact paths for the properties whose distance has a formula.

    edge-free: total edge weight.  complete: total non-edge weight.
    edge-density-le:<b>: delete the cheapest excess edges (the property
    depends only on the edge count, and adding edges never helps)."""
    name = prop.name
    g, dist = wg.graph, wg.dist
    if name == "edge-free":
        return sum((dist[i] * dist[j] for i, j in g.edges()), Fraction(0))
    if name == "complete":
        total = Fraction(0)
        for i in range(g.n):
            for j in range(i + 1, g.n):
                if not g.has_edge(i, j):
                    total += dist[i] * dist[j]
        return total
    if name.startswith("edge-density-le:"):
        bound = Fraction(name.split(":", 1)[1])
        allowed = (bound * g.n * g.n) // 2  # floor; edge counts are integers
        excess = g.edge_count() - int(allowed)
        if excess <= 0:
            return Fraction(0)
        costs = sorted(dist[i] * dist[j] for i, j in g.edges())
        return sum(costs[:excess], Fraction(0))
    raise InputError(f"no closed-form distance for property {name!r}")


def triangle_deletion_distance(wg: WeightedGraph) -> tuple[Fraction, Graph]:
    """Exact distance to triangle-freeness at sizes past the generic cap.

    Since triangle-freeness is closed under edge deletion, the nearest
    member is the input minus a minimum-weight set of edges meeting every
    triangle: a weighted hitting-set search.  Branches delete one edge of an
    uncovered triangle, protecting the edges already tried so no deletion
    set is explored twice; the lower bound is a greedy edge-disjoint
    triangle packing, heaviest triangles first."""
    g = wg.graph
    n = g.n
    _, iw = wg.dist.scaled_integers()
    den2 = sum(iw) ** 2 if iw else 1
    pairs = pair_list(n)
    pair_index = {p: k for k, p in enumerate(pairs)}
    weights = [iw[i] * iw[j] for (i, j) in pairs]
    triangles = []
    for i in range(n):
        for j in bits(g.adj[i]):
            if j <= i:
                continue
            for k in bits(g.adj[i] & g.adj[j]):
                if k > j:
                    tri = (pair_index[(i, j)], pair_index[(i, k)], pair_index[(j, k)])
                    mn = min(weights[e] for e in tri)
                    mask = (1 << tri[0]) | (1 << tri[1]) | (1 << tri[2])
                    triangles.append((mn, tri, mask))
    base_mask = g.edge_mask()
    if not triangles:
        return Fraction(0), g
    triangles.sort(key=lambda t: -t[0])

    # greedy incumbent: delete the lightest edge of each surviving triangle
    alive0 = base_mask
    greedy_cost = 0
    for _, tri, mask in triangles:
        if alive0 & mask == mask:
            e = min(tri, key=lambda k: (weights[k], k))
            alive0 &= ~(1 << e)
            greedy_cost += weights[e]
    best: list = [greedy_cost, alive0]

    def packing_bound(alive: int) -> int:
        used = 0
        bound = 0
        for mn, _, mask in triangles:
            if alive & mask == mask and not used & mask:
                used |= mask
                bound += mn
        return bound

    def search(alive: int, protected: int, cost: int):
        uncovered = None
        for _, tri, mask in triangles:
            if alive & mask == mask:
                if mask & ~protected == 0:
                    return  # every edge of this triangle is locked in place
                uncovered = tri
                break
        if uncovered is None:
            if cost < best[0] or (cost == best[0] and alive < best[1]):
                best[0], best[1] = cost, alive
            return
        if cost + packing_bound(alive) > best[0]:
            return
        lock = protected
        for e in uncovered:
            if not protected >> e & 1:
                search(alive & ~(1 << e), lock, cost + weights[e])
                lock |= 1 << e
    search(base_mask, 0, 0)
    return Fraction(best[0], den2), Graph.from_edge_mask(n, best[1])


def distance_value(wg: WeightedGraph, prop: GraphProperty,
                   cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """Distance by the cheapest exact route available for this property."""
    name = prop.name
    if name in ("edge-free", "complete") or name.startswith("edge-density-le:"):
        return distance_to_property_closed_form(wg, prop)
    if name == "triangle-free" and wg.n > cap:
        return triangle_deletion_distance(wg)[0]
    return distance_to_property(wg, prop, cap)[0]
