from fractions import Fraction as F
from math import sqrt

import pytest

from vdflab import prng
from vdflab.blowup import (
    Blowup,
    avoiding_blowup,
    dn_blowup,
    expected_contraction_distance,
    parse_blowup_sets,
    project,
    random_contraction,
    suitable_N,
    verify_blowup_farness,
)
from vdflab.distance import edit_distance
from vdflab.errors import ContractError, InputError
from vdflab.harness import random_gnp
from vdflab.properties import builtin_property
from vdflab.wgraph import Graph, VertexDistribution, WeightedGraph


def test_identity_blowup():
    wg = WeightedGraph.uniform(Graph.cycle(5))
    blow = dn_blowup(wg, 5)
    assert blow.result == wg.graph
    assert all(len(s) == 1 for s in blow.sets)


def test_edge_blowup_examples():
    edge = WeightedGraph.uniform(Graph.complete(2))
    blow = dn_blowup(edge, 4)
    assert blow.result == Graph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    skew = WeightedGraph(Graph.complete(2), VertexDistribution.of(["2/3", "1/3"]))
    blow = dn_blowup(skew, 3)
    assert [len(s) for s in blow.sets] == [2, 1]


def test_unsuitable_N_names_vertex():
    wg = WeightedGraph(Graph.complete(2), VertexDistribution.of(["2/3", "1/3"]))
    with pytest.raises(InputError, match="vertex 0"):
        dn_blowup(wg, 2)


def test_clique_policy():
    edge = WeightedGraph.uniform(Graph.empty(2))
    blow = dn_blowup(edge, 4, "clique")
    assert blow.result.edge_count() == 2  # one internal edge per 2-clone set


def test_project_and_pushforward():
    wg = WeightedGraph(Graph.path(3), VertexDistribution.of(["1/2", "1/3", "1/6"]))
    blow = dn_blowup(wg, 6)
    assert [project(blow, u) for u in range(6)] == [0, 0, 0, 1, 1, 2]
    for i, s in enumerate(blow.sets):
        assert F(len(s), blow.N) == wg.dist[i]


def test_zero_weight_vertex_gets_empty_set():
    wg = WeightedGraph(Graph.path(3), VertexDistribution.of(["1/2", "1/2", "0"]))
    blow = dn_blowup(wg, 4)
    assert [len(s) for s in blow.sets] == [2, 2, 0]
    assert blow.result.n == 4


def test_total_size_identity():
    for case in range(20):
        g = random_gnp(4, F(1, 2), prng.derive(111, case))
        weights = [prng.word(prng.derive(112, case), v) % 4 for v in range(4)]
        if sum(weights) == 0:
            weights[0] = 1
        total = sum(weights)
        wg = WeightedGraph(g, VertexDistribution.of([F(w, total) for w in weights]))
        N = suitable_N(wg) * 2
        blow = dn_blowup(wg, N)
        assert sum(len(s) for s in blow.sets) == N


def test_verify_blowup_farness_examples():
    ef = builtin_property("edge-free")
    wg = WeightedGraph(Graph.complete(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    base, blown = verify_blowup_farness(wg, ef, 8)
    # empty internal sets: the blowup loses no edge weight
    assert base == blown == F(1, 2) * F(1, 4) + F(1, 2) * F(1, 4) + F(1, 4) * F(1, 4)
    empty = WeightedGraph.uniform(Graph.empty(3))
    assert verify_blowup_farness(empty, ef, 3) == (0, 0)
    tf = builtin_property("triangle-free")
    k4 = WeightedGraph.uniform(Graph.complete(4))
    base, blown = verify_blowup_farness(k4, tf, 4)
    assert base == blown == F(1, 8)


def test_avoiding_blowup_clique_sets():
    c4free = builtin_property(
        "induced-H-free:c4", read_file=lambda _: "n 4\ne 0 1\ne 1 2\ne 2 3\ne 3 0\n")
    wg = WeightedGraph(Graph.path(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    blow = avoiding_blowup(wg, c4free, 8)
    assert blow.policy == ("clique",) * 3


def test_avoiding_blowup_independent_sets():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.cycle(5))
    blow = avoiding_blowup(wg, tf, 10)
    assert blow.policy == ("empty",) * 5


def test_avoiding_blowup_singletons_vacuous():
    tf = builtin_property("triangle-free")
    wg = WeightedGraph.uniform(Graph.complete(3))
    blow = avoiding_blowup(wg, tf, 3)
    assert all(len(s) == 1 for s in blow.sets)


def test_avoiding_blowup_detects_bad_policy():
    # blowing up an edge into independent sets creates an induced 2-edge path
    p2free = builtin_property(
        "induced-H-free:p2", read_file=lambda _: "n 3\ne 0 1\ne 1 2\n")
    wg = WeightedGraph.uniform(Graph.complete(2))
    with pytest.raises(ContractError):
        avoiding_blowup(wg, p2free, 4, internal_policy="empty", family_cap=3)


def test_random_contraction_of_own_blowup():
    wg = WeightedGraph(Graph.path(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    blow = dn_blowup(wg, 8)
    for seed in range(20):
        assert random_contraction(blow, blow.result, seed) == wg.graph
    # singleton sets: plain relabelling
    unit = dn_blowup(WeightedGraph.uniform(Graph.cycle(4)), 4)
    h = random_gnp(4, F(1, 2), 5)
    assert random_contraction(unit, h, 0) == h


def test_contraction_expectation_matches_monte_carlo():
    wg = WeightedGraph(Graph.complete(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    blow = dn_blowup(wg, 8)
    h_prime = random_gnp(8, F(1, 2), 77)
    exact = expected_contraction_distance(blow, h_prime)
    trials = 4000
    values = []
    for k in range(trials):
        h = random_contraction(blow, h_prime, prng.derive(13, k))
        values.append(float(edit_distance(h, wg.graph, wg.dist)))
    mean = sum(values) / trials
    var = sum((v - mean) ** 2 for v in values) / (trials - 1)
    se = sqrt(var / trials)
    assert abs(mean - float(exact)) <= 3 * se + 1e-12


def test_blowup_serialization_roundtrip():
    wg = WeightedGraph(Graph.path(3), VertexDistribution.of(["1/2", "1/4", "1/4"]))
    blow = dn_blowup(wg, 8)
    text = blow.serialize()
    parsed, sizes = parse_blowup_sets(text)
    assert parsed == blow.uniform_weighted()
    assert sizes == tuple(len(s) for s in blow.sets)
