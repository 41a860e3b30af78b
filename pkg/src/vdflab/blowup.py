"""Blowups of weighted graphs and the distance-preservation machinery.

A blowup replaces each vertex v by D(v)*N clones; clone sets inherit the
base adjacency as complete or empty bipartite graphs, while the graphs
inside the sets follow an explicit recorded policy.  The result is always
treated as uniformly weighted.  The clone-set sizes push a uniform draw on
the result forward to the base distribution exactly, which is what makes
blowups preserve distances to hereditary properties.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import prng
from .canon import isomorphic
from .distance import BRUTE_FORCE_CAP, distance_value
from .errors import ContractError, InputError
from .properties import GraphProperty, HereditaryProperty, minimal_forbidden_family
from .wgraph import (
    Graph,
    VertexDistribution,
    WeightedGraph,
    induced_copies,
    mask_of,
    parse_weighted_graph,
)

PolicySpec = Union[str, Graph, Sequence[Union[str, Graph]]]


def blowup_graph(base: Graph, sizes: Sequence[int], policy: PolicySpec) -> Graph:
    """Unweighted blowup with explicit clone-set sizes."""
    if len(sizes) != base.n:
        raise InputError("need one clone-set size per base vertex")
    policies = _normalize_policy(policy, sizes)
    offsets = []
    total = 0
    for b in sizes:
        if b < 0:
            raise InputError("clone-set sizes must be non-negative")
        offsets.append(total)
        total += b
    edges = []
    for i in range(base.n):
        for j in range(i + 1, base.n):
            if base.has_edge(i, j):
                edges.extend((offsets[i] + a, offsets[j] + b)
                             for a in range(sizes[i]) for b in range(sizes[j]))
    for i, pol in enumerate(policies):
        if isinstance(pol, Graph):
            if pol.n != sizes[i]:
                raise InputError(f"custom internal graph for set {i} has wrong order")
            edges.extend((offsets[i] + a, offsets[i] + b) for a, b in pol.edges())
        elif pol == "clique":
            edges.extend((offsets[i] + a, offsets[i] + b)
                         for a in range(sizes[i]) for b in range(a + 1, sizes[i]))
        elif pol != "empty":
            raise InputError(f"unknown internal policy {pol!r}")
    return Graph.from_edges(total, edges)


def _normalize_policy(policy: PolicySpec, sizes) -> list:
    if isinstance(policy, (str, Graph)):
        return [policy] * len(sizes)
    policies = list(policy)
    if len(policies) != len(sizes):
        raise InputError("per-set policy list has wrong length")
    return policies


@dataclass(frozen=True)
class Blowup:
    base: WeightedGraph
    N: int
    sets: tuple[tuple[int, ...], ...]
    result: Graph
    policy: tuple[str, ...]

    def uniform_weighted(self) -> WeightedGraph:
        return WeightedGraph.uniform(self.result)

    def serialize(self) -> str:
        from .wgraph import format_weighted_graph

        body = format_weighted_graph(self.uniform_weighted())
        return body + "sets " + " ".join(str(len(s)) for s in self.sets) + "\n"


def dn_blowup(wg: WeightedGraph, N: int, internal_policy: PolicySpec = "empty") -> Blowup:
    """Blowup with clone-set sizes D(v)*N; N must clear every denominator."""
    if N < 1:
        raise InputError("N must be positive")
    sizes = []
    for v in range(wg.n):
        b = wg.dist[v] * N
        if b.denominator != 1:
            raise InputError(
                f"N={N} unsuitable: vertex {v} weight {wg.dist[v]} gives size {b}")
        sizes.append(int(b))
    result = blowup_graph(wg.graph, sizes, internal_policy)
    offsets = []
    total = 0
    for b in sizes:
        offsets.append(total)
        total += b
    assert total == N
    sets = tuple(tuple(range(offsets[i], offsets[i] + sizes[i])) for i in range(wg.n))
    policies = tuple(
        "custom" if isinstance(p, Graph) else p
        for p in _normalize_policy(internal_policy, sizes))
    for i, s in enumerate(sets):
        assert Fraction(len(s), N) == wg.dist[i]  # push-forward identity
    return Blowup(wg, N, sets, result, policies)


def suitable_N(wg: WeightedGraph) -> int:
    """Least N for which every D(v)*N is an integer."""
    return wg.dist.denominator_lcm()


def project(blowup: Blowup, u: int) -> int:
    """Base vertex whose clone set contains the result vertex ``u``."""
    for i, s in enumerate(blowup.sets):
        if s and s[0] <= u <= s[-1]:
            return i
    raise InputError(f"result vertex {u} out of range")


def verify_blowup_farness(wg: WeightedGraph, prop: GraphProperty, N: int,
                          internal_policy: PolicySpec = "empty",
                          cap: int = BRUTE_FORCE_CAP) -> tuple[Fraction, Fraction]:
    """(base distance, blowup distance) with the preservation inequality asserted."""
    base_dist = distance_value(wg, prop, cap)
    blow = dn_blowup(wg, N, internal_policy)
    blown_dist = distance_value(blow.uniform_weighted(), prop, cap)
    assert blown_dist >= base_dist, (
        f"blowup distance {blown_dist} fell below base distance {base_dist}")
    return base_dist, blown_dist


_CLIQUE_SET_PATTERNS = (Graph.path(3), Graph.path(4), Graph.cycle(4))


def registered_policy(prop: GraphProperty) -> Optional[str]:
    """Known-safe internal policy for avoidable properties, if any."""
    name = prop.name
    if name in ("triangle-free", "edge-free") or name.startswith("k-colorable:"):
        return "empty"  # closed under independent-set blowups
    if name == "complete":
        return "clique"
    if prop.forbidden and len(prop.forbidden) == 1:
        if any(isomorphic(prop.forbidden[0], pat) for pat in _CLIQUE_SET_PATTERNS):
            return "clique"
    return None


def avoiding_blowup(wg: WeightedGraph, prop: HereditaryProperty, N: int,
                    internal_policy: Optional[PolicySpec] = None,
                    family_cap: int = 5) -> Blowup:
    """A blowup in which no minimal forbidden graph straddles a clone set.

    The internal policy comes from the registry unless supplied.  The
    avoidance claim is then verified exhaustively against the minimal
    forbidden family up to ``family_cap`` vertices; a violation raises with
    the offending copy as the counterexample."""
    policy = internal_policy if internal_policy is not None else registered_policy(prop)
    if policy is None:
        raise InputError(f"no registered blowup policy for property {prop.name!r}")
    blow = dn_blowup(wg, N, policy)
    family = minimal_forbidden_family(prop, family_cap)
    set_masks = [mask_of(s) for s in blow.sets]
    for f in family:
        for copy in induced_copies(blow.result, f):
            cmask = mask_of(copy)
            for i, sm in enumerate(set_masks):
                if (cmask & sm).bit_count() >= 2:
                    raise ContractError(
                        f"forbidden graph on {f.n} vertices hits clone set {i} twice: {copy}")
    return blow


def random_contraction(blowup: Blowup, h_prime: Graph, seed: int) -> Graph:
    """Pick one clone per set uniformly and pull ``h_prime`` back to the base.

    Base vertices with empty clone sets (weight zero) come out isolated."""
    if h_prime.n != blowup.N:
        raise InputError("graph to contract must live on the blowup vertices")
    n = blowup.base.n
    picks: list[Optional[int]] = []
    for i, s in enumerate(blowup.sets):
        picks.append(s[prng.u128(seed, i) % len(s)] if s else None)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if picks[i] is not None and picks[j] is not None \
                    and h_prime.has_edge(picks[i], picks[j]):
                edges.append((i, j))
    return Graph.from_edges(n, edges)


def expected_contraction_distance(blowup: Blowup, h_prime: Graph) -> Fraction:
    """Exact expectation of the base distance of a random contraction:
    (1/N^2) * sum over set pairs of the symmetric difference size between
    the blowup and ``h_prime``."""
    if h_prime.n != blowup.N:
        raise InputError("graph to contract must live on the blowup vertices")
    total = 0
    for i in range(blowup.base.n):
        for j in range(i + 1, blowup.base.n):
            si, sj = blowup.sets[i], blowup.sets[j]
            if not si or not sj:
                continue
            base_edge = blowup.base.graph.has_edge(i, j)
            sj_mask = mask_of(sj)
            crossing = sum((h_prime.adj[u] & sj_mask).bit_count() for u in si)
            total += len(si) * len(sj) - crossing if base_edge else crossing
    return Fraction(total, blowup.N ** 2)


def parse_blowup_sets(text: str) -> tuple[WeightedGraph, tuple[int, ...]]:
    """Read a serialized blowup: the weighted-graph body plus its sets line."""
    wg = parse_weighted_graph(text)
    sizes = None
    for raw in text.splitlines():
        parts = raw.split()
        if parts and parts[0] == "sets":
            sizes = tuple(int(tok) for tok in parts[1:])
    if sizes is None:
        raise InputError("missing sets line")
    if sum(sizes) != wg.n:
        raise InputError("set sizes do not sum to the vertex count")
    return wg, sizes
