"""Generators for the explicit indistinguishable-pair constructions.

Each generator returns two weighted inputs that present identical (or
nearly identical) sample laws to any vertex-sampling tester, together with
a machine-checked certificate: membership of the positive instance and an
exact farness value (or closed-form bound) for the negative one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt
from typing import Iterable, Optional

from . import prng
from .canon import canonical_code
from .distance import BRUTE_FORCE_CAP, distance_to_property, distance_to_property_closed_form
from .errors import ContractError, InputError
from .properties import GraphProperty, HereditaryProperty, builtin_property, is_extendable_at
from .wgraph import Graph, VertexDistribution, WeightedGraph, mask_of


@dataclass(frozen=True)
class GalleryPair:
    name: str
    first: WeightedGraph     # satisfies the property
    second: WeightedGraph    # far from the property
    prop: GraphProperty
    certificate: dict

    def certificate_json(self) -> dict:
        out = dict(self.certificate)
        for key, value in out.items():
            if isinstance(value, Fraction):
                out[key] = f"{value.numerator}/{value.denominator}"
        out["property"] = self.prop.name
        return out


def non_extendable_pair(prop: HereditaryProperty, g1: Graph,
                        attachment: Iterable[int],
                        cap: int = BRUTE_FORCE_CAP) -> GalleryPair:
    """A member with no one-vertex extension against the same graph plus a
    weight-zero vertex: identical sample laws, yet the second input must
    change a positive-weight pair to enter the property."""
    if not prop.holds(g1):
        raise ContractError("the base graph must satisfy the property")
    if is_extendable_at(prop, g1):
        raise ContractError("the property is extendable at this graph")
    n = g1.n
    g2 = g1.add_vertex(mask_of(attachment))
    d1 = VertexDistribution.uniform(n)
    d2 = VertexDistribution(tuple(list(d1.weights) + [Fraction(0)]))
    first = WeightedGraph(g1, d1)
    second = WeightedGraph(g2, d2)
    distance, witness = distance_to_property(second, prop, cap)
    bound = Fraction(1, n * n)
    assert distance >= bound, f"distance {distance} below {bound}"
    cert = {"distance": distance, "lower_bound": bound,
            "method": "branch-and-bound oracle", "witness_edges": witness.edges()}
    return GalleryPair("non-extendable", first, second, prop, cert)


def non_hereditary_pair(prop: GraphProperty, g1: Graph,
                        sub_vertices: Iterable[int],
                        cap: int = BRUTE_FORCE_CAP) -> GalleryPair:
    """A member and one of its induced subgraphs that is not a member; the
    member carries all its weight on the subgraph."""
    if prop.hereditary:
        raise ContractError("construction needs a non-hereditary property")
    vs = sorted(set(sub_vertices))
    g2 = g1.subgraph(vs)
    if not prop.holds(g1):
        raise ContractError("the host graph must satisfy the property")
    if prop.holds(g2):
        raise ContractError("the induced subgraph must violate the property")
    m = len(vs)
    w1 = [Fraction(0)] * g1.n
    for v in vs:
        w1[v] = Fraction(1, m)
    first = WeightedGraph(g1, VertexDistribution(tuple(w1)))
    second = WeightedGraph(g2, VertexDistribution.uniform(m))
    distance, witness = distance_to_property(second, prop, cap)
    bound = Fraction(1, m * m)
    assert distance >= bound, f"distance {distance} below {bound}"
    cert = {"distance": distance, "lower_bound": bound,
            "method": "branch-and-bound oracle", "witness_edges": witness.edges()}
    return GalleryPair("non-hereditary", first, second, prop, cert)


def cycle_star_pair(M: int, cap: int = BRUTE_FORCE_CAP,
                    certify: bool = True) -> GalleryPair:
    """An M-cycle against the M-cycle plus a weight-zero isolated vertex,
    under freeness of every cycle-plus-spare-vertex pattern."""
    if M < 3:
        raise InputError("cycle length must be at least 3")
    prop = builtin_property("cycle-star-free")
    cycle = Graph.cycle(M)
    star = cycle.add_vertex(0)
    first = WeightedGraph.uniform(cycle)
    second = WeightedGraph(star, VertexDistribution(
        tuple([Fraction(1, M)] * M + [Fraction(0)])))
    assert prop.holds(cycle)
    assert not prop.holds(star)
    # identical sample laws: the supports coincide and the graphs agree there
    assert second.graph.subgraph(range(M)) == cycle
    assert second.dist.weights[:M] == first.dist.weights
    cert: dict = {"sample_law_identical": True, "lower_bound": Fraction(1, M * M)}
    if certify:
        if M + 1 > cap:
            raise InputError(f"certification needs M+1 <= {cap}")
        distance, witness = distance_to_property(second, prop, cap)
        assert distance == Fraction(1, M * M)
        cert.update({"distance": distance, "method": "branch-and-bound oracle",
                     "witness_edges": witness.edges()})
    else:
        cert["method"] = "not certified (cycle too long for the oracle)"
    return GalleryPair("cycle-star", first, second, prop, cert)


def density_pair(n: int) -> GalleryPair:
    """Half clique versus reweighted three-quarter clique: nearly identical
    sample laws, but only the first has edge density at most 1/4."""
    if n % 4:
        raise InputError("n must be divisible by 4")
    prop = builtin_property("edge-density-le:1/4")
    half = n // 2
    g1 = blowup_clique(n, half)
    d1 = VertexDistribution.uniform(n)
    big = 3 * n // 4
    g2 = blowup_clique(n, big)
    w2 = [Fraction(2, 3 * n)] * big + [Fraction(2, n)] * (n - big)
    first = WeightedGraph(g1, d1)
    second = WeightedGraph(g2, VertexDistribution(tuple(w2)))
    assert prop.holds(g1)
    assert not prop.holds(g2)
    density1 = Fraction(2 * g1.edge_count(), n * n)
    density2 = Fraction(2 * g2.edge_count(), n * n)
    distance = distance_to_property_closed_form(second, prop)
    assert distance > 0
    cert = {"density_first": density1, "density_second": density2,
            "distance": distance, "method": "closed form (cheapest edge deletions)",
            "clique_first": half, "clique_second": big}
    return GalleryPair("edge-density", first, second, prop, cert)


def blowup_clique(n: int, k: int) -> Graph:
    """Clique on the first k vertices, the rest isolated."""
    return Graph.from_edges(n, [(i, j) for i in range(k) for j in range(i + 1, k)])


@dataclass(frozen=True)
class TvEstimate:
    estimate: Fraction
    trials: int
    ci_low: Optional[float]
    ci_high: Optional[float]
    classes: dict


def tv_distance_estimate(pair: GalleryPair, q: int, trials: int, seed: int,
                         bootstrap: int = 100) -> TvEstimate:
    """Plug-in total variation distance between the two induced-sample laws,
    bucketing samples by isomorphism class of the induced subgraph.

    Draws use common random numbers (the same uniform stream pushed through
    each input's own inverse CDF), so identical laws give exactly zero, and
    the bootstrap resamples the joint per-trial class pairs to keep that
    coupling."""
    if q > 5:
        raise InputError("isomorphism-class bucketing is limited to q <= 5")
    draw_seed = prng.derive(seed, "draws")
    thresholds1 = prng.cdf_thresholds(pair.first.dist.weights)
    thresholds2 = prng.cdf_thresholds(pair.second.dist.weights)
    class_cache1: dict = {}
    class_cache2: dict = {}
    joint: dict[tuple, int] = {}
    for trial in range(trials):
        stream = prng.derive(draw_seed, trial)
        draws = [prng.u128(stream, k) for k in range(q)]
        k1 = _class_of(pair.first.graph,
                       frozenset(prng.index_from_u128(thresholds1, u) for u in draws),
                       class_cache1)
        k2 = _class_of(pair.second.graph,
                       frozenset(prng.index_from_u128(thresholds2, u) for u in draws),
                       class_cache2)
        joint[(k1, k2)] = joint.get((k1, k2), 0) + 1
    estimate = _tv_from_joint(joint, trials)
    ci_low = ci_high = None
    if bootstrap > 0:
        values = sorted(
            float(_tv_from_joint(_resample_joint(joint, trials,
                                                 prng.derive(seed, "boot", b)), trials))
            for b in range(bootstrap))
        ci_low = values[max(0, int(0.025 * bootstrap) - 1)]
        ci_high = values[min(bootstrap - 1, int(0.975 * bootstrap))]
    c1, c2 = _marginals(joint)
    merged = sorted(set(c1) | set(c2))
    classes = {f"{order}:{code}": (c1.get((order, code), 0), c2.get((order, code), 0))
               for order, code in merged}
    return TvEstimate(estimate, trials, ci_low, ci_high, classes)


def _class_of(graph: Graph, distinct: frozenset, cache: dict):
    key = cache.get(distinct)
    if key is None:
        sub = graph.subgraph(distinct)
        key = cache[distinct] = (sub.n, canonical_code(sub))
    return key


def _marginals(joint: dict) -> tuple[dict, dict]:
    c1: dict = {}
    c2: dict = {}
    for (k1, k2), cnt in joint.items():
        c1[k1] = c1.get(k1, 0) + cnt
        c2[k2] = c2.get(k2, 0) + cnt
    return c1, c2


def _tv_from_joint(joint: dict, trials: int) -> Fraction:
    c1, c2 = _marginals(joint)
    keys = set(c1) | set(c2)
    diff = sum(abs(c1.get(k, 0) - c2.get(k, 0)) for k in keys)
    return Fraction(diff, 2 * trials)


def _resample_joint(joint: dict, trials: int, seed: int) -> dict:
    keys = sorted(joint)
    cumulative = []
    acc = 0
    for k in keys:
        acc += joint[k]
        cumulative.append(acc)
    out: dict = {}
    for i in range(trials):
        u = prng.word(seed, i) % trials
        lo, hi = 0, len(keys) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u < cumulative[mid]:
                hi = mid
            else:
                lo = mid + 1
        out[keys[lo]] = out.get(keys[lo], 0) + 1
    return out


# ---------------------------------------------------------------------------
# Clique-size sample law of the edge-density pair.


def clique_size_counts(wg: WeightedGraph, clique_size: int, q: int, trials: int,
                       seed: int) -> list[int]:
    """Histogram over trials of the number of distinct clique vertices in a
    q-draw sample (the clique occupies the first ``clique_size`` vertices)."""
    thresholds = prng.cdf_thresholds(wg.dist.weights)
    counts = [0] * (q + 1)
    for trial in range(trials):
        stream = prng.derive(seed, trial)
        distinct = {prng.index_from_u128(thresholds, prng.u128(stream, k))
                    for k in range(q)}
        counts[sum(1 for v in distinct if v < clique_size)] += 1
    return counts


def _stirling2(j: int, k: int) -> int:
    if j == k == 0:
        return 1
    if j == 0 or k == 0 or k > j:
        return 0
    return k * _stirling2(j - 1, k) + _stirling2(j - 1, k - 1)


def exact_clique_size_law(clique_size: int, clique_vertex_weight: Fraction,
                          other_mass: Fraction, q: int) -> list[Fraction]:
    """Exact law of the number of distinct clique vertices among q draws,
    when all clique vertices share one weight."""
    from math import comb

    clique_mass = clique_vertex_weight * clique_size
    law = [Fraction(0)] * (q + 1)
    for j in range(q + 1):  # draws landing in the clique
        p_j = comb(q, j) * clique_mass ** j * other_mass ** (q - j)
        for k in range(j + 1):
            falling = 1
            for step in range(k):
                falling *= clique_size - step
            law[k] += p_j * _stirling2(j, k) * Fraction(falling, clique_size ** j)
    assert sum(law) == 1
    return law


def binomial_law(q: int) -> list[Fraction]:
    from math import comb

    return [Fraction(comb(q, k), 2 ** q) for k in range(q + 1)]
