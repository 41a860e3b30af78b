from fractions import Fraction as F

import pytest

from vdflab import prng
from vdflab.errors import InputError, ZeroMassError
from vdflab.harness import random_gnp
from vdflab.wgraph import (
    Graph,
    VertexDistribution,
    WeightedGraph,
    conditioned,
    edge_weight,
    format_weighted_graph,
    induced,
    induced_copies,
    induced_copy_exists,
    pair_density,
    parse_weighted_graph,
    set_weight,
    subgraph_copy_exists,
)


def test_edge_weight_examples():
    wg = WeightedGraph.uniform(Graph.complete(4))
    assert edge_weight(wg, 0, 2) == F(1, 16)
    wg2 = WeightedGraph(Graph.empty(3), VertexDistribution.of(["1/2", "1/2", "0"]))
    assert edge_weight(wg2, 0, 2) == 0
    wg3 = WeightedGraph(Graph.empty(3), VertexDistribution.of(["1/2", "1/3", "1/6"]))
    assert edge_weight(wg3, 1, 2) == F(1, 18)


def test_edge_weight_errors():
    wg = WeightedGraph.uniform(Graph.complete(3))
    with pytest.raises(InputError):
        edge_weight(wg, 0, 0)
    with pytest.raises(InputError):
        edge_weight(wg, 0, 5)


def test_set_weight_examples():
    wg = WeightedGraph.uniform(Graph.empty(6))
    assert set_weight([], wg.dist) == 0
    assert set_weight(range(6), wg.dist) == 1
    assert set_weight([1, 4], wg.dist) == F(1, 3)


def test_conditioned_examples():
    d4 = VertexDistribution.uniform(4)
    assert conditioned(d4, [0, 3]).weights == (F(1, 2), F(1, 2))
    d = VertexDistribution.of(["1/2", "1/4", "1/4"])
    assert conditioned(d, [1, 2]).weights == (F(1, 2), F(1, 2))
    with pytest.raises(ZeroMassError):
        conditioned(VertexDistribution.of(["1", "0", "0"]), [1, 2])


def test_induced_examples():
    c5 = WeightedGraph.uniform(Graph.cycle(5))
    assert induced(c5, range(5)) == c5
    tri = WeightedGraph.uniform(Graph.complete(3))
    sub = induced(tri, [0, 2])
    assert sub.graph == Graph.complete(2)
    assert sub.dist.weights == (F(1, 2), F(1, 2))
    path = induced(c5, [0, 1, 2])
    assert path.graph == Graph.path(3)
    assert path.dist.weights == (F(1, 3),) * 3


def test_induced_composition():
    for case in range(10):
        g = random_gnp(8, F(1, 2), prng.derive(5, case))
        wg = WeightedGraph.uniform(g)
        outer = [0, 1, 2, 4, 5, 7]
        inner = [0, 2, 5]
        once = induced(wg, inner)
        twice = induced(induced(wg, outer), [0, 2, 4])  # positions of 0,2,5 in outer
        assert once == twice


def test_pair_density_examples():
    k23 = Graph.from_edges(5, [(i, j) for i in (0, 1) for j in (2, 3, 4)])
    wg = WeightedGraph.uniform(k23)
    assert pair_density(wg, [0, 1], [2, 3, 4]) == 1
    assert pair_density(WeightedGraph.uniform(Graph.empty(4)), [0], [1, 2]) == 0
    heavy = WeightedGraph(Graph.complete(3), VertexDistribution.of(["1/2", "1/2", "0"]))
    assert pair_density(heavy, [2], [0, 1]) == 0  # zero-mass side forces density 0


def test_pair_density_symmetric_and_bounded():
    for case in range(25):
        g = random_gnp(9, F(1, 3), prng.derive(6, case))
        wg = WeightedGraph.uniform(g)
        xs, ys = [0, 2, 4], [1, 5, 6, 8]
        d = pair_density(wg, xs, ys)
        assert 0 <= d <= 1
        assert d == pair_density(wg, ys, xs)
    with pytest.raises(InputError):
        pair_density(WeightedGraph.uniform(Graph.empty(3)), [0, 1], [1, 2])


def test_density_splitting_identity():
    # sum over partition cells of D(X')D(Y')d(X',Y') equals D(X)D(Y)d(X,Y)
    for case in range(30):
        n = 6 + case % 5
        g = random_gnp(n, F(1, 2), prng.derive(7, case))
        weights = [prng.word(prng.derive(8, case), v) % 5 for v in range(n)]
        total = sum(weights) or 1
        if sum(weights) == 0:
            weights[0] = total
        wg = WeightedGraph(g, VertexDistribution.of([F(w, total) for w in weights]))
        half = n // 2
        xs, ys = list(range(half)), list(range(half, n))
        x_parts = [xs[: len(xs) // 2], xs[len(xs) // 2:]]
        y_parts = [ys[: len(ys) // 2], ys[len(ys) // 2:]]
        lhs = F(0)
        for xp in x_parts:
            for yp in y_parts:
                if xp and yp:
                    lhs += wg.dist.mass(xp) * wg.dist.mass(yp) * pair_density(wg, xp, yp)
        rhs = wg.dist.mass(xs) * wg.dist.mass(ys) * pair_density(wg, xs, ys)
        assert lhs == rhs


def test_induced_copy_examples():
    assert induced_copy_exists(Graph.complete(4), Graph.complete(1))
    assert not induced_copy_exists(Graph.cycle(5), Graph.complete(3))
    assert not induced_copy_exists(Graph.complete(3), Graph.path(3))
    # subgraph containment differs on the same instance
    assert subgraph_copy_exists(Graph.complete(3), Graph.path(3))


def test_induced_copies_enumeration():
    copies = induced_copies(Graph.cycle(4), Graph.path(3))
    # each path copy picks 3 of 4 cycle vertices; middle vertex adjacent to both ends
    assert len(copies) == 8  # 4 middle choices x 2 end orders
    for mapping in copies:
        assert len(set(mapping)) == 3


def test_graph_validation():
    with pytest.raises(InputError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(InputError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(InputError):
        Graph(2, (1, 0))  # asymmetric
    with pytest.raises(InputError):
        VertexDistribution.of(["1/2", "1/3"])  # does not sum to 1


def test_file_format_roundtrip():
    wg = WeightedGraph(Graph.cycle(5).add_vertex(0),
                       VertexDistribution.of(["1/5"] * 5 + ["0"]))
    text = format_weighted_graph(wg)
    assert parse_weighted_graph(text) == wg


def test_file_format_rejects():
    with pytest.raises(InputError):
        parse_weighted_graph("n 2\nweights 1/2 1/2\ne 0 0\n")
    with pytest.raises(InputError):
        parse_weighted_graph("n 2\nweights 1/2 1/2\ne 0 1\ne 0 1\n")
    with pytest.raises(InputError):
        parse_weighted_graph("n 2\nweights 1/2 1/3\n")
    with pytest.raises(InputError):
        parse_weighted_graph("weights 1/2 1/2\n")
