from fractions import Fraction as F
from itertools import combinations

import pytest

from vdflab import prng
from vdflab.errors import ContractError, InputError, RetryLimitError
from vdflab.harness import random_gnp
from vdflab.regularity import (
    Partition,
    balanced_partition,
    boost_refinement,
    certify_pair,
    counting_lemma_check,
    delta_counting,
    internal_pair_weight,
    irregular_pair_mass,
    low_internal_partition,
    partition_deviation_sum,
    partition_index,
    representatives,
    strong_partition,
    subpair_bounds_check,
    szemeredi_partition,
    turan_ramsey_sets,
    weighted_copy_mass,
    atypical_vertices,
)
from vdflab.blowup import dn_blowup
from vdflab.wgraph import Graph, VertexDistribution, WeightedGraph, pair_density


def half_split_instance(nx=4, ny=2):
    """X = X1 u X2 with d(X1,Y)=1 and d(X2,Y)=0: irregular at small eps."""
    n = nx + ny
    edges = [(i, j) for i in range(nx // 2) for j in range(nx, n)]
    g = Graph.from_edges(n, edges)
    return WeightedGraph.uniform(g), list(range(nx)), list(range(nx, n))


def test_internal_pair_weight_examples():
    d6 = VertexDistribution.uniform(6)
    assert internal_pair_weight(Partition.singletons(range(6)), d6) == 0
    n = 6
    whole = Partition.whole(range(n))
    assert internal_pair_weight(whole, d6) == F(n * (n - 1) // 2, n * n)
    two = Partition.of([[0, 1, 2], [3, 4, 5]])
    assert internal_pair_weight(two, d6) == F(6, 36)


def test_low_internal_partition():
    d2 = VertexDistribution.uniform(2)
    p = low_internal_partition(range(2), d2, F(1, 1))
    assert internal_pair_weight(p, d2) <= 1
    d8 = VertexDistribution.uniform(8)
    p = low_internal_partition(range(8), d8, F(1, 4))
    assert len(p) == 4
    assert internal_pair_weight(p, d8) <= F(1, 4)
    p = low_internal_partition(range(3), VertexDistribution.uniform(3), F(1, 10))
    assert all(len(part) == 1 for part in p.parts)
    assert internal_pair_weight(p, VertexDistribution.uniform(3)) == 0


def test_balanced_partition_examples():
    d4 = VertexDistribution.uniform(4)
    p = balanced_partition(range(4), d4, 2)
    # the minimal-size peel takes one vertex (1/4 meets the 1/(2a) floor
    # exactly); both parts clear the floor
    assert sorted(d4.mass(part) for part in p.parts) == [F(1, 4), F(3, 4)]
    assert all(d4.mass(part) >= F(1, 4) for part in p.parts)
    d = VertexDistribution.of(["1/4", "1/4", "1/4", "1/8", "1/8"])
    p = balanced_partition(range(5), d, 2)
    assert all(d.mass(part) >= F(1, 4) for part in p.parts)
    p1 = balanced_partition(range(4), d4, 1)
    assert len(p1) == 1 and d4.mass(p1.parts[0]) == 1
    with pytest.raises(InputError):
        balanced_partition(range(2), VertexDistribution.uniform(2), 2)  # weights 1/2 > 1/4


def test_certify_pair_trivial_cases():
    n = 6
    complete_cross = Graph.from_edges(n, [(i, j) for i in range(3) for j in range(3, 6)])
    wg = WeightedGraph.uniform(complete_cross)
    for eps in (F(1, 10), F(1, 2)):
        assert certify_pair(wg, [0, 1, 2], [3, 4, 5], eps).is_regular
    empty = WeightedGraph.uniform(Graph.empty(n))
    assert certify_pair(empty, [0, 1, 2], [3, 4, 5], F(1, 10)).is_regular


def test_certify_pair_half_split_witness():
    wg, xs, ys = half_split_instance()
    rep = certify_pair(wg, xs, ys, F(1, 4))
    assert not rep.is_regular
    wx, wy, dsub = rep.witness
    # the lexicographically least witness is a single dense vertex
    assert wx == (0,) and dsub == 1
    assert abs(dsub - rep.density) > F(1, 4)


def naive_certify(wg, xs, ys, eps):
    """Independent reference: plain double loop over all subsets."""
    d = pair_density(wg, xs, ys)
    dx, dy = wg.dist.mass(xs), wg.dist.mass(ys)
    for ka in range(1, len(xs) + 1):
        for xsub in combinations(xs, ka):
            if wg.dist.mass(xsub) < eps * dx:
                continue
            for kb in range(1, len(ys) + 1):
                for ysub in combinations(ys, kb):
                    if wg.dist.mass(ysub) < eps * dy:
                        continue
                    if abs(pair_density(wg, xsub, ysub) - d) > eps:
                        return False
    return True


def test_certify_pair_matches_naive_reference():
    for case in range(100):
        n = 8
        g = random_gnp(n, F(1, 2), prng.derive(61, case))
        weights = [1 + prng.word(prng.derive(62, case), v) % 3 for v in range(n)]
        total = sum(weights)
        wg = WeightedGraph(g, VertexDistribution.of([F(w, total) for w in weights]))
        xs, ys = [0, 1, 2, 3], [4, 5, 6, 7]
        eps = (F(1, 4), F(1, 3), F(1, 2))[case % 3]
        assert certify_pair(wg, xs, ys, eps).is_regular == naive_certify(wg, xs, ys, eps)
    # a couple of larger splits
    for case in range(3):
        g = random_gnp(12, F(1, 2), prng.derive(63, case))
        wg = WeightedGraph.uniform(g)
        xs, ys = list(range(6)), list(range(6, 12))
        assert certify_pair(wg, xs, ys, F(1, 3)).is_regular == \
            naive_certify(wg, xs, ys, F(1, 3))


def test_subpair_bounds_check():
    n = 6
    complete_cross = Graph.from_edges(n, [(i, j) for i in range(3) for j in range(3, 6)])
    wg = WeightedGraph.uniform(complete_cross)
    rep = subpair_bounds_check(wg, [0, 1, 2], [3, 4, 5], [0, 1, 2], [3, 4, 5],
                               F(1, 4), F(1, 1))
    assert rep.density_in_bounds and rep.certification.is_regular
    assert rep.eps_prime == F(1, 2)
    rep = subpair_bounds_check(wg, [0, 1, 2], [3, 4, 5], [0, 1], [3, 4],
                               F(1, 4), F(1, 2))
    assert rep.sub_density == 1 and rep.density_in_bounds
    for case in range(10):
        g = random_gnp(8, F(1, 2), prng.derive(67, case))
        wg = WeightedGraph.uniform(g)
        xs, ys = [0, 1, 2, 3], [4, 5, 6, 7]
        full = certify_pair(wg, xs, ys, F(1, 2))
        if full.is_regular:
            rep = subpair_bounds_check(wg, xs, ys, [0, 1], [4, 5], F(1, 2), F(1, 2))
            assert rep.density_in_bounds


def test_atypical_vertices():
    n = 6
    complete_cross = Graph.from_edges(n, [(i, j) for i in range(3) for j in range(3, 6)])
    wg = WeightedGraph.uniform(complete_cross)
    assert atypical_vertices(wg, [0, 1, 2], [3, 4, 5], F(1, 4)) == ()
    assert atypical_vertices(WeightedGraph.uniform(Graph.empty(6)),
                             [0, 1, 2], [3, 4, 5], F(1, 4)) == ()
    wg, xs, ys = half_split_instance()
    bad = atypical_vertices(wg, xs, ys, F(1, 4))
    assert set(bad) == set(xs)  # every vertex is at density 0 or 1 vs d = 1/2


def test_atypical_mass_bound_on_regular_pairs():
    for case in range(40):
        g = random_gnp(8, F(1, 2), prng.derive(71, case))
        wg = WeightedGraph.uniform(g)
        xs, ys = [0, 1, 2, 3], [4, 5, 6, 7]
        eps = F(1, 3)
        if certify_pair(wg, xs, ys, eps).is_regular:
            bad = atypical_vertices(wg, xs, ys, eps)
            assert wg.dist.mass(bad) < 2 * eps * wg.dist.mass(xs)


def test_delta_counting_values():
    eta = F(2, 5)
    assert delta_counting(2, eta) == eta
    assert delta_counting(3, F(1, 2)) == F(1, 128)
    assert delta_counting(4, F(1, 2)) == F(1, 131072)
    with pytest.raises(InputError):
        delta_counting(1, F(1, 2))


def test_weighted_copy_mass_examples():
    n = 4
    complete_cross = Graph.from_edges(n, [(0, 2), (0, 3), (1, 2), (1, 3)])
    wg = WeightedGraph.uniform(complete_cross)
    edge = Graph.complete(2)
    assert weighted_copy_mass(wg, edge, [[0, 1], [2, 3]]) == \
        wg.dist.mass([0, 1]) * wg.dist.mass([2, 3])
    assert weighted_copy_mass(WeightedGraph.uniform(Graph.empty(4)),
                              edge, [[0, 1], [2, 3]]) == 0
    base = WeightedGraph.uniform(Graph.complete(3))
    blow = dn_blowup(base, 6)
    wgb = blow.uniform_weighted()
    tri = Graph.complete(3)
    mass = weighted_copy_mass(wgb, tri, blow.sets)
    # every cross triple induces a triangle: mass is the product of set masses
    assert mass == F(2, 6) ** 3


def test_counting_lemma_check():
    base = WeightedGraph.uniform(Graph.complete(3))
    blow = dn_blowup(base, 6)
    wgb = blow.uniform_weighted()
    rep = counting_lemma_check(wgb, Graph.complete(3), blow.sets, F(1, 2))
    assert rep.holds and rep.margin >= 0
    # an edge pattern at density exactly eta saturates the h=2 bound
    wg, xs, ys = half_split_instance()
    rep = counting_lemma_check(wg, Graph.complete(2), [xs, ys], F(1, 2))
    assert rep.holds and rep.margin == 0
    with pytest.raises(ContractError):
        counting_lemma_check(WeightedGraph.uniform(Graph.empty(4)),
                             Graph.complete(2), [[0, 1], [2, 3]], F(1, 2))


def test_partition_index_examples():
    wg = WeightedGraph.uniform(Graph.empty(4))
    p = Partition.of([[0, 1], [2, 3]])
    assert partition_index(wg, p) == 0
    wgk = WeightedGraph.uniform(Graph.complete(4))
    assert partition_index(wgk, p) == F(1, 4)  # all densities 1
    c4 = WeightedGraph.uniform(Graph.cycle(4))
    opposite = Partition.of([[0, 2], [1, 3]])
    assert partition_index(c4, opposite) == F(1, 4)  # the cross pair is complete


def test_index_upper_bound():
    for case in range(30):
        g = random_gnp(8, F(1, 2), prng.derive(73, case))
        wg = WeightedGraph.uniform(g)
        p = Partition.of([[0, 1, 2], [3, 4], [5, 6, 7]])
        bound = F(0)
        for i in range(3):
            for j in range(i + 1, 3):
                bound += wg.dist.mass(p.parts[i]) * wg.dist.mass(p.parts[j])
        assert 0 <= partition_index(wg, p) <= bound


def random_weighted_graph(n, seed):
    g = random_gnp(n, F(1, 2), prng.derive(seed, "g"))
    weights = [1 + prng.word(prng.derive(seed, "w"), v) % 4 for v in range(n)]
    total = sum(weights)
    return WeightedGraph(g, VertexDistribution.of([F(w, total) for w in weights]))


def random_partition(n, parts, seed):
    assign = [prng.word(seed, v) % parts for v in range(n)]
    groups = {}
    for v, a in enumerate(assign):
        groups.setdefault(a, []).append(v)
    return Partition.of(groups.values())


def test_square_density_splitting_identity():
    # second moment version: cell sum equals parent term plus deviation sum
    for case in range(40):
        wg = random_weighted_graph(10, 1000 + case)
        xs, ys = list(range(5)), list(range(5, 10))
        xp = [xs[:2], xs[2:]]
        yp = [ys[:3], ys[3:]]
        d = pair_density(wg, xs, ys)
        lhs = F(0)
        dev = F(0)
        for a in xp:
            for b in yp:
                da = pair_density(wg, a, b)
                w = wg.dist.mass(a) * wg.dist.mass(b)
                lhs += w * da * da
                dev += w * (da - d) ** 2
        rhs = wg.dist.mass(xs) * wg.dist.mass(ys) * d * d + dev
        assert lhs == rhs


def test_index_monotone_under_refinement():
    for case in range(60):
        wg = random_weighted_graph(9, 2000 + case)
        coarse = random_partition(9, 2 + case % 3, prng.derive(81, case))
        finer_parts = []
        for part in coarse.parts:
            if len(part) >= 2 and case % 2 == 0:
                finer_parts.append(part[: len(part) // 2])
                finer_parts.append(part[len(part) // 2:])
            else:
                finer_parts.append(part)
        fine = Partition.of(p for p in finer_parts if p)
        assert fine.refines(coarse)
        assert partition_index(wg, fine) >= partition_index(wg, coarse)
    # singleton refinement never decreases the index
    wg = random_weighted_graph(6, 999)
    coarse = Partition.of([[0, 1, 2], [3, 4, 5]])
    fine = Partition.singletons(range(6))
    assert partition_index(wg, fine) >= partition_index(wg, coarse)


def test_boost_refinement_gain_and_size():
    wg, xs, ys = half_split_instance()
    p = Partition.of([xs, ys])
    eps = F(1, 5)
    refined = boost_refinement(wg, p, eps)
    assert len(refined) <= len(p) * 2 ** len(p)
    assert refined.refines(p)
    gain = partition_index(wg, refined) - partition_index(wg, p)
    assert gain >= eps ** 5


def test_boost_refinement_rejects_regular_partition():
    wg = WeightedGraph.uniform(Graph.complete(6))
    p = Partition.of([[0, 1, 2], [3, 4, 5]])
    with pytest.raises(ContractError):
        boost_refinement(wg, p, F(1, 4))


def test_szemeredi_partition():
    wgk = WeightedGraph.uniform(Graph.complete(8))
    p0 = Partition.of([[0, 1, 2, 3], [4, 5, 6, 7]])
    assert szemeredi_partition(wgk, F(1, 4), p0) == p0
    empty = WeightedGraph.uniform(Graph.empty(8))
    assert szemeredi_partition(empty, F(1, 4), p0) == p0
    g = random_gnp(12, F(1, 2), 12345)
    wg = WeightedGraph.uniform(g)
    start = Partition.of([[0, 1, 2], [3, 4, 5], [6, 7, 8], [9, 10, 11]])
    eps = F(1, 4)
    result = szemeredi_partition(wg, eps, start)
    assert result.refines(start)
    mass, witnesses = irregular_pair_mass(wg, result, eps)
    assert mass <= eps
    for (i, j), _ in witnesses.items():
        assert not certify_pair(wg, result.parts[i], result.parts[j], eps).is_regular


def test_strong_partition():
    wgk = WeightedGraph.uniform(Graph.complete(8))
    p0 = Partition.of([[0, 1, 2, 3], [4, 5, 6, 7]])
    coarse, fine = strong_partition(wgk, lambda r: F(1, 2), 2, p0)
    assert coarse == fine == p0  # complete graph: first iteration already stalls
    wg = random_weighted_graph(12, 777)
    coarse, fine = strong_partition(wg, lambda r: F(1, 4), 3,
                                    Partition.of([[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]))
    assert fine.refines(coarse)
    e0 = F(1, 4)
    mass, _ = irregular_pair_mass(wg, fine, e0)
    assert mass <= e0
    dev = partition_deviation_sum(wg, coarse, fine, weight_by="fine")
    assert dev <= e0
    # the two sides of the final second-moment bound, compared exactly
    sq_dev = F(0)
    owner = {v: i for i, part in enumerate(coarse.parts) for v in part}
    weight_total = F(0)
    for a in range(len(fine.parts)):
        for b in range(a + 1, len(fine.parts)):
            pa, pb = owner[fine.parts[a][0]], owner[fine.parts[b][0]]
            if pa == pb:
                continue
            w = wg.dist.mass(fine.parts[a]) * wg.dist.mass(fine.parts[b])
            diff = pair_density(wg, fine.parts[a], fine.parts[b]) - \
                pair_density(wg, coarse.parts[pa], coarse.parts[pb])
            sq_dev += w * diff * diff
            weight_total += w
    assert dev * dev <= weight_total * sq_dev or dev == 0  # Cauchy-Schwarz
    assert sq_dev <= e0 * e0


def test_turan_ramsey_sets():
    # t = 1: one set, no pair conditions
    wg = WeightedGraph.uniform(Graph.complete(10))
    sets = turan_ramsey_sets(wg, 1, F(1, 2), F(1, 6), seed=2, eps=F(1, 2))
    assert len(sets) == 1 and wg.dist.mass(sets[0]) >= F(1, 6)
    # t = 2 on a 40-clone blowup of a 4-vertex base
    base = WeightedGraph.uniform(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]))
    wg40 = dn_blowup(base, 40).uniform_weighted()
    delta = F(1, 2)
    sets = turan_ramsey_sets(wg40, 2, delta, F(1, 25), seed=5, eps=F(1, 4))
    assert len(sets) == 2
    for s in sets:
        assert wg40.dist.mass(s) >= F(1, 25)
    assert certify_pair(wg40, sets[0], sets[1], delta).is_regular
    with pytest.raises(InputError):
        turan_ramsey_sets(wg, 1, F(1, 2), F(1, 20), seed=0)  # weights not below zeta


def test_monochromatic_subset_always_exists():
    # the density-majority graph on 4^t vertices always has a t-clique or
    # t-independent set; checked on random graphs at t = 2
    from vdflab.regularity import _monochromatic_subset

    for case in range(50):
        g = random_gnp(16, F(1, 2), prng.derive(91, case))
        dense = {(i, j): g.has_edge(i, j) for i in range(16) for j in range(i + 1, 16)}
        combo = _monochromatic_subset(16, 2, dense)
        assert len(combo) == 2


def test_representatives():
    wgk = WeightedGraph.uniform(Graph.complete(12))
    p0 = Partition.of([list(range(6)), list(range(6, 12))])
    rep = representatives(wgk, lambda r: F(1, 3), 2, p0, seed=1)
    assert rep.exceptional == ()
    for part, q in zip(rep.parts, rep.reps):
        assert set(q) <= set(part)
    wg = random_weighted_graph(12, 555)
    rep = representatives(wg, lambda r: F(1, 4), 2, p0, seed=9)
    e0 = F(1, 4)
    assert wg.dist.mass(rep.exceptional) < e0
    for part in rep.parts:
        assert any(set(part) <= set(p) for p in p0.parts)
    r = len(rep.parts)
    for i in range(r):
        for j in range(i + 1, r):
            assert certify_pair(wg, rep.reps[i], rep.reps[j], F(1, 4)).is_regular
    dev = F(0)
    for i in range(r):
        for j in range(i + 1, r):
            dev += (wg.dist.mass(rep.parts[i]) * wg.dist.mass(rep.parts[j])
                    * abs(pair_density(wg, rep.reps[i], rep.reps[j])
                          - pair_density(wg, rep.parts[i], rep.parts[j])))
    assert dev <= e0
    # vacuous bounds at the boundary value e_fn = 1
    rep1 = representatives(wgk, lambda r: F(1, 1), 2, p0, seed=4)
    assert wgk.dist.mass(rep1.exceptional) < 1
