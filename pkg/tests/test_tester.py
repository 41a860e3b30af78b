from fractions import Fraction as F
from itertools import product
from math import sqrt

import pytest

from vdflab import prng
from vdflab.blowup import dn_blowup
from vdflab.errors import ContractError
from vdflab.harness import estimate_probability, random_gnp
from vdflab.properties import R_bound, builtin_property
from vdflab.tester import (
    large_inputs_tester,
    nhw_tester,
    nlw_tester,
    sample_vertices,
    size_aware_tester,
    trivial_property_tester,
    vdf_tester,
)
from vdflab.wgraph import Graph, VertexDistribution, WeightedGraph


def test_sample_vertices_point_mass():
    d = VertexDistribution.of(["0", "1", "0"])
    assert sample_vertices(d, 20, seed=3) == [1] * 20


def test_sample_vertices_zero_weight_never_drawn():
    d = VertexDistribution.of(["1/2", "0", "1/2"])
    draws = sample_vertices(d, 3000, seed=9)
    assert 1 not in draws


def test_sample_vertices_uniform_frequency():
    d = VertexDistribution.uniform(2)
    draws = sample_vertices(d, 100000, seed=11)
    freq = draws.count(0) / len(draws)
    sigma = sqrt(0.25 / len(draws))
    assert abs(freq - 0.5) <= 6 * sigma


def test_sample_vertices_deterministic():
    d = VertexDistribution.of(["1/3", "1/6", "1/2"])
    assert sample_vertices(d, 50, seed=4) == sample_vertices(d, 50, seed=4)
    assert sample_vertices(d, 50, seed=4) != sample_vertices(d, 50, seed=5)


def test_vdf_accepts_members():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.cycle(5))
    for seed in range(200):
        assert vdf_tester(wg, tf, 4, seed).accepted


def test_vdf_exact_rejection_law():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(3))
    rejects = sum(1 for seq in product(range(3), repeat=3)
                  if not tf.holds(wg.graph.subgraph(set(seq))))
    assert F(rejects, 27) == F(2, 9)
    est = estimate_probability(lambda s: not vdf_tester(wg, tf, 3, s).accepted,
                               20000, seed=1)
    assert abs(float(est.point) - 2 / 9) < 0.01


def test_vdf_single_draw_accepts():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(4))
    for seed in range(50):
        assert vdf_tester(wg, tf, 1, seed).accepted


def test_vdf_rejection_carries_evidence():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(3))
    seen_reject = False
    for seed in range(60):
        out = vdf_tester(wg, tf, 3, seed)
        if not out.accepted:
            seen_reject = True
            assert out.evidence is not None
            assert not tf.holds(out.evidence)
    assert seen_reject


def test_rejection_probability_monotone_in_sample_size():
    # exact law over all draw sequences, graphs up to 4 vertices
    tf = builtin_property("triangle-free")
    for case in range(12):
        g = random_gnp(4, F(1, 2), prng.derive(103, case))
        wg = WeightedGraph.uniform(g)
        laws = []
        for s in range(1, 5):
            reject = sum(1 for seq in product(range(4), repeat=s)
                         if not tf.holds(g.subgraph(set(seq))))
            laws.append(F(reject, 4 ** s))
        assert all(a <= b for a, b in zip(laws, laws[1:]))


def test_large_inputs_matches_vdf_for_extendable_property():
    tf = builtin_property("triangle-free")
    g = random_gnp(8, F(1, 2), 17)
    wg = WeightedGraph.uniform(g)
    for seed in range(100):
        assert (large_inputs_tester(wg, tf, 4, seed).accepted
                == vdf_tester(wg, tf, 4, seed).accepted)


def test_large_inputs_on_long_cycle():
    # cycles satisfy the family property but not its core; with fewer draws
    # than the cycle length the sample induces forests, so always accept
    csf = builtin_property("cycle-star-free")
    wg = WeightedGraph.uniform(Graph.cycle(8))
    for seed in range(100):
        assert large_inputs_tester(wg, csf, 5, seed).accepted
    # collecting every vertex rejects: the full induced graph has a cycle
    heavy = WeightedGraph.uniform(Graph.cycle(3))
    out = large_inputs_tester(heavy, csf, 60, seed=0)
    assert not out.accepted and out.evidence is not None


def test_size_aware_dispatch_and_completeness():
    tf = builtin_property("triangle-free")
    big = WeightedGraph.uniform(Graph.cycle(8))
    small = WeightedGraph.uniform(Graph.cycle(5))
    for seed in range(30):
        assert size_aware_tester(big, tf, 8, F(1, 4), 6, seed).accepted
        assert size_aware_tester(small, tf, 5, F(1, 4), 6, seed).accepted
    with pytest.raises(Exception):
        size_aware_tester(small, tf, 7, F(1, 4), 6, 0)


def test_size_aware_rejects_non_extendable_pair():
    from vdflab.gallery import non_extendable_pair

    ab = builtin_property("AB-free")
    pair = non_extendable_pair(ab, Graph.cycle(5), [])
    est = estimate_probability(
        lambda s: not size_aware_tester(pair.second, ab, 6, F(1, 4), 8, s).accepted,
        400, seed=6)
    assert est.wilson_low >= 2 / 3


def test_nlw_tester():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.cycle(6))
    for seed in range(50):
        assert nlw_tester(wg, tf, F(1, 4), F(1, 2), 6, seed).accepted
    skew = WeightedGraph(Graph.cycle(3),
                         VertexDistribution.of(["2/3", "1/6", "1/6"]))
    with pytest.raises(ContractError):
        nlw_tester(skew, tf, F(1, 4), F(3, 4), 5, 0)


def test_nlw_collects_everything_on_small_inputs():
    # with t = max(s, 2R^2 log(6R)/delta) and n < 2R the whole vertex set is
    # collected with probability at least 2/3, so the decision is exact
    from math import ceil, log

    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(3))
    delta = F(1, 2)
    R = R_bound(tf, 4, r_max=6)
    assert R == 5  # non-members with <= 4 vertices die right above themselves
    t = max(4, ceil(2 * R * R * log(6 * R) / delta))
    est = estimate_probability(
        lambda s: set(sample_vertices(wg.dist, t, s)) == {0, 1, 2}, 300, seed=3)
    assert est.wilson_low >= 2 / 3
    for seed in range(30):
        assert not nlw_tester(wg, tf, F(1, 4), delta, t, seed).accepted


def test_nhw_tester():
    tf = builtin_property("triangle-free")
    big = WeightedGraph.uniform(Graph.cycle(30))
    for seed in range(30):
        assert nhw_tester(big, tf, F(1, 4), 3, seed).accepted
    small = WeightedGraph.uniform(Graph.complete(3))
    with pytest.raises(ContractError):
        nhw_tester(small, tf, F(1, 4), 2, 0)


def test_nhw_sweep_on_far_instance():
    # 60-vertex clique, uniform: far from triangle-freeness; some q <= 4
    # (the largest the weight cap allows) rejects at rate >= 2/3
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(60))
    found = None
    for q in (1, 2, 3, 4):
        est = estimate_probability(
            lambda s, q=q: not nhw_tester(wg, tf, F(1, 8), q, s).accepted,
            400, seed=8)
        if est.wilson_low >= 2 / 3:
            found = q
            break
    assert found == 3


def test_trivial_property_tester():
    conn = builtin_property("connected")
    ham = builtin_property("hamiltonian")
    c5 = WeightedGraph.uniform(Graph.cycle(5))
    assert trivial_property_tester(c5, ham, "large-inputs", 4, F(1, 2), 0).accepted
    assert trivial_property_tester(c5, ham, "size-aware", 4, F(1, 2), 0).accepted
    two = WeightedGraph.uniform(Graph.empty(2))
    out = trivial_property_tester(two, conn, "nlw", 8, F(1, 2), 0)
    assert not out.accepted  # both vertices collected, graph disconnected
    path = WeightedGraph.uniform(Graph.path(3))
    assert trivial_property_tester(path, conn, "nlw", 8, F(1, 2), 1).accepted
    # size-aware branch: the unseen zero-weight vertex leaves room to extend
    # the sampled edge to a connected 3-vertex host
    disc = WeightedGraph(Graph.path(2).add_vertex(0),
                         VertexDistribution.of(["1/2", "1/2", "0"]))
    assert not conn.holds(disc.graph)
    assert trivial_property_tester(disc, conn, "size-aware", 4, F(1, 2), 0).accepted


def test_trivial_size_aware_rejects_unfixable():
    # a 2-vertex graph can never be hamiltonian, whatever the sample shows
    ham = builtin_property("hamiltonian")
    two = WeightedGraph.uniform(Graph.complete(2))
    out = trivial_property_tester(two, ham, "size-aware", 4, F(1, 2), 0)
    assert not out.accepted


def test_tester_determinism():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(3))
    a = vdf_tester(wg, tf, 5, 42)
    b = vdf_tester(wg, tf, 5, 42)
    assert a == b
    assert a.sample == b.sample
