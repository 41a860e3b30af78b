"""The randomized testers over weighted graph inputs.

Every tester is a pure function of (input, parameters, seed): it draws
vertices through the documented counter-based stream, collapses the draw
sequence to its distinct set, and decides membership of the induced
subgraph (or an extension query on it).  Testers are one-sided: a member of
a hereditary property is accepted with probability 1, and every rejection
carries the violating induced subgraph as evidence.

Theoretical sample-complexity functions are not computable at desk scale,
so every tester takes its sample size explicitly and the harness sweeps it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log
from typing import Optional

from . import prng
from .errors import ContractError, InputError
from .properties import (
    GraphProperty,
    HereditaryProperty,
    extension_exists,
    hereditary_core,
)
from .wgraph import Graph, VertexDistribution, WeightedGraph


@dataclass(frozen=True)
class TesterOutcome:
    decision: str                       # "accept" | "reject"
    sample: tuple[int, ...]             # ordered draw sequence, with repeats
    distinct: tuple[int, ...]
    evidence: Optional[Graph] = None    # induced subgraph witnessing rejection

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


@dataclass
class TesterConfig:
    """Bag of tester parameters used by the harness."""

    variant: str                        # vdf | large-inputs | size-aware | nlw | nhw | trivial-*
    sample_size: int = 1
    eps: Fraction = Fraction(1, 4)
    delta: Fraction = Fraction(1, 2)
    size_floor: int = 4                 # M for the size-aware and trivial variants
    seed: int = 0
    extras: dict = field(default_factory=dict)


def sample_vertices(dist: VertexDistribution, s: int, seed: int) -> list[int]:
    """s independent draws from the distribution, reproducible from the seed."""
    if s < 0:
        raise InputError("sample size must be non-negative")
    return prng.sample_indices(dist.weights, s, seed)


def _decide_membership(wg: WeightedGraph, prop: GraphProperty, draws) -> TesterOutcome:
    distinct = tuple(sorted(set(draws)))
    sub = wg.graph.subgraph(distinct)
    if prop.holds(sub):
        return TesterOutcome("accept", tuple(draws), distinct)
    return TesterOutcome("reject", tuple(draws), distinct, sub)


def vdf_tester(wg: WeightedGraph, prop: HereditaryProperty, s: int,
               seed: int) -> TesterOutcome:
    """Draw s vertices and accept iff their induced subgraph satisfies the
    property.  One-sided for hereditary properties."""
    return _decide_membership(wg, prop, sample_vertices(wg.dist, s, seed))


def large_inputs_tester(wg: WeightedGraph, prop: HereditaryProperty, s: int,
                        seed: int, r_max: int = 8) -> TesterOutcome:
    """Accept iff the sample-induced subgraph satisfies the derived core
    property (identical to the base property when that is extendable).
    Sound on inputs large enough for the chosen sample size."""
    return _decide_membership(wg, _core_of(prop, r_max),
                              sample_vertices(wg.dist, s, seed))


_core_cache: dict[tuple[int, int], HereditaryProperty] = {}
_core_refs: list = []  # keep properties alive so id() keys stay valid


def _core_of(prop: HereditaryProperty, r_max: int) -> HereditaryProperty:
    key = (id(prop), r_max)
    core = _core_cache.get(key)
    if core is None:
        core = _core_cache[key] = hereditary_core(prop, r_max)
        _core_refs.append(prop)
    return core


def size_aware_tester(wg: WeightedGraph, prop: HereditaryProperty, n: int,
                      eps, size_floor: int, seed: int, s_large: int = 8,
                      r_max: int = 8, size_cap: int = 12) -> TesterOutcome:
    """Tester that receives the vertex count as part of the input.

    Large inputs delegate to the core tester; small ones draw
    ceil(M ln(3M)/eps) vertices and accept iff some n-vertex member contains
    the sampled induced subgraph."""
    if n != wg.n:
        raise InputError("declared vertex count does not match the input")
    eps = Fraction(eps)
    if n >= size_floor:
        return large_inputs_tester(wg, prop, s_large, seed, r_max)
    t = ceil(size_floor * log(3 * size_floor) / eps)
    draws = sample_vertices(wg.dist, t, seed)
    distinct = tuple(sorted(set(draws)))
    sub = wg.graph.subgraph(distinct)
    if extension_exists(prop, sub, n, size_cap):
        return TesterOutcome("accept", tuple(draws), distinct)
    return TesterOutcome("reject", tuple(draws), distinct, sub)


def nlw_tester(wg: WeightedGraph, prop: HereditaryProperty, eps, delta,
               t: int, seed: int) -> TesterOutcome:
    """No-light-weights tester: requires every vertex weight >= delta/n."""
    delta = Fraction(delta)
    floor = delta / wg.n
    for v in range(wg.n):
        if wg.dist[v] < floor:
            raise ContractError(f"vertex {v} weighs {wg.dist[v]} < delta/n = {floor}")
    return _decide_membership(wg, prop, sample_vertices(wg.dist, t, seed))


def nhw_tester(wg: WeightedGraph, prop: HereditaryProperty, eps, q: int,
               seed: int) -> TesterOutcome:
    """No-heavy-weights tester: requires every vertex weight <= 1/(3q^2)."""
    cap = Fraction(1, 3 * q * q)
    for v in range(wg.n):
        if wg.dist[v] > cap:
            raise ContractError(f"vertex {v} weighs {wg.dist[v]} > 1/(3q^2) = {cap}")
    return _decide_membership(wg, prop, sample_vertices(wg.dist, q, seed))


def _extension_exists_general(prop: GraphProperty, f: Graph, r: int,
                              size_cap: int = 12) -> bool:
    """Extension query without hereditarity: plain backtracking, trying the
    all-neighbours and no-neighbours attachments first."""
    if r < f.n:
        return False
    if r > size_cap:
        raise InputError(f"general extension search capped at {size_cap} vertices")

    def grow(current: Graph) -> bool:
        if current.n == r:
            return prop.holds(current)
        full = (1 << current.n) - 1
        for mask in dict.fromkeys([full, 0, *range(1, full)]):
            if grow(current.add_vertex(mask)):
                return True
        return False

    return grow(f)


def trivial_property_tester(wg: WeightedGraph, prop: GraphProperty, variant: str,
                            size_floor: int, rate, seed: int,
                            size_cap: int = 12) -> TesterOutcome:
    """Testers for properties that large graphs almost satisfy
    (connectivity, hamiltonicity): accept blindly past the size floor,
    otherwise decide exactly on a collected sample."""
    rate = Fraction(rate)
    if variant == "large-inputs":
        return TesterOutcome("accept", (), ())
    t = ceil(size_floor * log(3 * size_floor) / rate)
    draws = sample_vertices(wg.dist, t, seed)
    distinct = tuple(sorted(set(draws)))
    sub = wg.graph.subgraph(distinct)
    if variant == "nlw":
        if len(distinct) >= size_floor:
            return TesterOutcome("accept", tuple(draws), distinct)
        if prop.holds(sub):
            return TesterOutcome("accept", tuple(draws), distinct)
        return TesterOutcome("reject", tuple(draws), distinct, sub)
    if variant == "size-aware":
        if wg.n >= size_floor:
            return TesterOutcome("accept", (), ())
        if _extension_exists_general(prop, sub, wg.n, size_cap):
            return TesterOutcome("accept", tuple(draws), distinct)
        return TesterOutcome("reject", tuple(draws), distinct, sub)
    raise InputError(f"unknown trivial tester variant {variant!r}")


def run_tester(wg: WeightedGraph, prop: GraphProperty, config: TesterConfig) -> TesterOutcome:
    """Dispatch a tester configuration; the harness's single entry point."""
    v = config.variant
    if v == "vdf":
        return vdf_tester(wg, prop, config.sample_size, config.seed)
    if v == "large-inputs":
        return large_inputs_tester(wg, prop, config.sample_size, config.seed,
                                   config.extras.get("r_max", 8))
    if v == "size-aware":
        return size_aware_tester(wg, prop, wg.n, config.eps, config.size_floor,
                                 config.seed, s_large=config.sample_size,
                                 r_max=config.extras.get("r_max", 8))
    if v == "nlw":
        return nlw_tester(wg, prop, config.eps, config.delta,
                          config.sample_size, config.seed)
    if v == "nhw":
        return nhw_tester(wg, prop, config.eps, config.sample_size, config.seed)
    if v.startswith("trivial-"):
        return trivial_property_tester(wg, prop, v.removeprefix("trivial-"),
                                       config.size_floor, config.delta, config.seed)
    raise InputError(f"unknown tester variant {v!r}")
