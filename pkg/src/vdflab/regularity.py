"""Vertex-weighted regularity toolkit.

Partitions, the mean-square density index, exact certification of regular
pairs by subset enumeration, the index-boosting refinement, and the
iterated constructions built on top of them (regular partitions, strong
partitions, coherent representative sets).

Certification is exhaustive and exponential in the part sizes; the cap is
an explicit parameter and exceeding it raises a resource error rather than
silently approximating.  Hot loops run on integer weights over a common
denominator.  Randomized constructions take an explicit seed and a retry
budget; running out of retries raises an error carrying per-attempt
diagnostics, since each attempt only succeeds with positive probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import prng
from .errors import ContractError, InputError, ResourceLimitError, RetryLimitError
from .wgraph import (
    Graph,
    VertexDistribution,
    WeightedGraph,
    bits,
    mask_of,
    pair_density,
    pair_list,
)

CERTIFY_CAP = 14


@dataclass(frozen=True)
class Partition:
    """Ordered partition of a ground set; parts sorted by least element."""

    parts: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(parts: Iterable[Iterable[int]], allow_empty: bool = False) -> "Partition":
        cleaned = []
        seen: set[int] = set()
        for part in parts:
            t = tuple(sorted(set(part)))
            if not t:
                if allow_empty:
                    continue
                raise InputError("empty part in partition")
            if seen & set(t):
                raise InputError("partition parts overlap")
            seen.update(t)
            cleaned.append(t)
        cleaned.sort(key=lambda p: p[0])
        return Partition(tuple(cleaned))

    @staticmethod
    def singletons(vertices: Iterable[int]) -> "Partition":
        return Partition.of([[v] for v in vertices])

    @staticmethod
    def whole(vertices: Iterable[int]) -> "Partition":
        return Partition.of([list(vertices)])

    def ground(self) -> tuple[int, ...]:
        return tuple(sorted(v for part in self.parts for v in part))

    def __len__(self) -> int:
        return len(self.parts)

    def refines(self, coarser: "Partition") -> bool:
        owner = {}
        for idx, part in enumerate(coarser.parts):
            for v in part:
                owner[v] = idx
        for part in self.parts:
            owners = {owner.get(v) for v in part}
            if len(owners) != 1 or None in owners:
                return False
        return True

    def serialize(self) -> str:
        return "\n".join(" ".join(str(v) for v in part) for part in self.parts) + "\n"

    @staticmethod
    def parse(text: str) -> "Partition":
        return Partition.of([line.split() for line in text.splitlines() if line.strip()],
                            allow_empty=False) if text.strip() else Partition(())


def common_refinement(partition: Partition, cuts: Iterable[Iterable[int]]) -> Partition:
    """Refine every part by each cut set (part -> part&cut, part-cut)."""
    parts = [set(p) for p in partition.parts]
    for cut in cuts:
        c = set(cut)
        nxt = []
        for p in parts:
            inside, outside = p & c, p - c
            if inside:
                nxt.append(inside)
            if outside:
                nxt.append(outside)
        parts = nxt
    return Partition.of(parts)


@dataclass(frozen=True)
class RegularityReport:
    """Outcome of exhaustively certifying one pair of vertex sets."""

    x: tuple[int, ...]
    y: tuple[int, ...]
    eps: Fraction
    status: str  # "regular" | "irregular"
    density: Fraction
    witness: Optional[tuple[tuple[int, ...], tuple[int, ...], Fraction]] = None
    pair: Optional[tuple[int, int]] = None

    @property
    def is_regular(self) -> bool:
        return self.status == "regular"


def internal_pair_weight(partition: Partition, dist: VertexDistribution) -> Fraction:
    """Total weight of vertex pairs lying inside a common part."""
    total = Fraction(0)
    for part in partition.parts:
        s = sum((dist[v] for v in part), Fraction(0))
        sq = sum((dist[v] * dist[v] for v in part), Fraction(0))
        total += (s * s - sq) / 2
    return total


def low_internal_partition(vertices: Iterable[int], dist: VertexDistribution,
                           eta) -> Partition:
    """Split a set into ceil(1/eta) parts with internal pair weight <= eta.

    Derandomized by conditional expectations: vertices are placed heaviest
    first into the part that currently adds the least internal weight, which
    keeps the total under (1/k) * (total pair weight)."""
    eta = Fraction(eta)
    if eta <= 0:
        raise InputError("eta must be positive")
    vs = sorted(set(vertices))
    k = max(1, -(-eta.denominator // eta.numerator))  # ceil(1/eta)
    parts: list[list[int]] = [[] for _ in range(k)]
    loads = [Fraction(0)] * k
    for v in sorted(vs, key=lambda u: (-dist[u], u)):
        idx = min(range(k), key=lambda p: (loads[p], p))
        parts[idx].append(v)
        loads[idx] += dist[v]
    partition = Partition.of(parts, allow_empty=True)
    total = sum((dist[v] for v in vs), Fraction(0))
    if total <= 1:
        assert internal_pair_weight(partition, dist) <= eta
    return partition


def balanced_partition(vertices: Iterable[int], dist: VertexDistribution, a: int) -> Partition:
    """Partition into ``a`` parts each of weight at least 1/(2a).

    Needs every vertex weight at most 1/(2a) and the weights to sum to 1 on
    the given set.  Peels a minimal-size heaviest-first prefix of weight at
    least 1/(2a), then recurses on the conditioned remainder."""
    vs = sorted(set(vertices))
    if a < 1:
        raise InputError("number of parts must be positive")
    total = sum((dist[v] for v in vs), Fraction(0))
    if total != 1:
        raise InputError("balanced partition needs a distribution on the set itself")
    bound = Fraction(1, 2 * a)
    for v in vs:
        if dist[v] > bound:
            raise InputError(f"vertex {v} has weight {dist[v]} > 1/(2a)")

    def peel(pool: list[int], remaining_parts: int, pool_mass: Fraction) -> list[list[int]]:
        if remaining_parts == 1:
            return [pool]
        threshold = pool_mass / (2 * remaining_parts)
        chosen: list[int] = []
        acc = Fraction(0)
        for v in sorted(pool, key=lambda u: (-dist[u], u)):
            chosen.append(v)
            acc += dist[v]
            if acc >= threshold:
                break
        rest = [v for v in pool if v not in set(chosen)]
        return [chosen] + peel(rest, remaining_parts - 1, pool_mass - acc)

    parts = peel(vs, a, Fraction(1))
    partition = Partition.of(parts)
    for part in partition.parts:
        assert sum((dist[v] for v in part), Fraction(0)) >= bound
    return partition


def _load_pair(wg: WeightedGraph, xs, ys):
    X = tuple(sorted(set(xs)))
    Y = tuple(sorted(set(ys)))
    if set(X) & set(Y):
        raise InputError("pair certification needs disjoint sets")
    _, iw = wg.dist.scaled_integers()
    wx = [iw[v] for v in X]
    wy = [iw[v] for v in Y]
    ypos = {v: j for j, v in enumerate(Y)}
    ymask_global = mask_of(Y)
    rows = []
    for v in X:
        row = 0
        for u in bits(wg.graph.adj[v] & ymask_global):
            row |= 1 << ypos[u]
        rows.append(row)
    return X, Y, wx, wy, rows


def certify_pair(wg: WeightedGraph, xs, ys, eps, cap: int = CERTIFY_CAP,
                 pair: Optional[tuple[int, int]] = None) -> RegularityReport:
    """Exhaustively certify a pair of disjoint sets as eps-regular.

    Scans every qualifying subset pair in ascending bitmask order, so an
    irregular verdict carries the lexicographically least witness.  A pair
    whose density is 0 or 1, or with a zero-weight side, is regular without
    enumeration."""
    eps = Fraction(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    X, Y, wx, wy, rows = _load_pair(wg, xs, ys)
    if len(X) > cap or len(Y) > cap:
        raise ResourceLimitError(
            f"certification cap {cap} exceeded by pair sizes {len(X)},{len(Y)}")
    WX, WY = sum(wx), sum(wy)
    E = sum(wx[i] * sum(wy[j] for j in bits(rows[i])) for i in range(len(X)))
    density = Fraction(E, WX * WY) if WX and WY else Fraction(0)
    report = RegularityReport(X, Y, eps, "regular", density, None, pair)
    if WX == 0 or WY == 0 or E == 0 or E == WX * WY:
        return report
    a, b = len(X), len(Y)
    ep, eq = eps.numerator, eps.denominator
    massx = _subset_sums(wx)
    massy = _subset_sums(wy)
    qualx = [m for m in range(1, 1 << a) if massx[m] * eq >= ep * WX]
    qualy = [m for m in range(1, 1 << b) if massy[m] * eq >= ep * WY]
    for xm in qualx:
        mx = massx[xm]
        svec = [0] * b
        for i in bits(xm):
            w, row = wx[i], rows[i]
            for j in bits(row):
                svec[j] += w
        esum = _subset_sums([svec[j] * wy[j] for j in range(b)])
        for ym in qualy:
            my = massy[ym]
            e = esum[ym]
            if abs(e * WX * WY - E * mx * my) * eq > ep * mx * my * WX * WY:
                witness = (tuple(X[i] for i in bits(xm)),
                           tuple(Y[j] for j in bits(ym)),
                           Fraction(e, mx * my))
                return RegularityReport(X, Y, eps, "irregular", density, witness, pair)
    return report


def _subset_sums(values: Sequence[int]) -> list[int]:
    out = [0] * (1 << len(values))
    for m in range(1, len(out)):
        low = m & -m
        out[m] = out[m ^ low] + values[low.bit_length() - 1]
    return out


def atypical_vertices(wg: WeightedGraph, xs, ys, eps) -> tuple[int, ...]:
    """Vertices of X whose individual density to Y strays more than eps."""
    eps = Fraction(eps)
    X = tuple(sorted(set(xs)))
    Y = tuple(sorted(set(ys)))
    d = pair_density(wg, X, Y)
    return tuple(x for x in X if abs(pair_density(wg, [x], Y) - d) > eps)


@dataclass(frozen=True)
class SubpairReport:
    parent_density: Fraction
    sub_density: Fraction
    density_in_bounds: bool
    eps_prime: Fraction
    certification: RegularityReport


def subpair_bounds_check(wg: WeightedGraph, xs, ys, xsub, ysub, eps, alpha,
                         cap: int = CERTIFY_CAP) -> SubpairReport:
    """Within an eps-regular pair, large subsets inherit density and regularity.

    Verifies the hypotheses (pair regular, alpha >= eps, subset masses at
    least alpha times the parents), then certifies the subpair at
    max(eps/alpha, 2*eps)."""
    eps, alpha = Fraction(eps), Fraction(alpha)
    if alpha < eps:
        raise ContractError("alpha must be at least eps")
    parent = certify_pair(wg, xs, ys, eps, cap)
    if not parent.is_regular:
        raise ContractError("parent pair is not eps-regular")
    xset, yset = set(xs), set(ys)
    if not set(xsub) <= xset or not set(ysub) <= yset:
        raise InputError("subsets must lie inside the pair")
    dx, dy = wg.dist.mass(xset), wg.dist.mass(yset)
    if wg.dist.mass(xsub) < alpha * dx or wg.dist.mass(ysub) < alpha * dy:
        raise ContractError("subset masses below alpha fraction")
    sub_density = pair_density(wg, sorted(set(xsub)), sorted(set(ysub)))
    in_bounds = parent.density - eps <= sub_density <= parent.density + eps
    eps_prime = max(eps / alpha, 2 * eps)
    certification = certify_pair(wg, xsub, ysub, min(eps_prime, Fraction(1)), cap) \
        if eps_prime < 1 else certify_pair(wg, xsub, ysub, Fraction(1), cap)
    return SubpairReport(parent.density, sub_density, in_bounds, eps_prime, certification)


def delta_counting(h: int, eta) -> Fraction:
    """Exact copy-mass constant: eta at h=2, then the three-way minimum
    recurrence min{1/(4(h-1)), eta/2, (1/2)(eta/2)^(h-1) * delta(h-1, eta/2)}."""
    eta = Fraction(eta)
    if h < 2:
        raise InputError("h must be at least 2")
    if not 0 < eta < 1:
        raise InputError("eta must lie in (0,1)")
    if h == 2:
        return eta
    return min(Fraction(1, 4 * (h - 1)),
               eta / 2,
               Fraction(1, 2) * (eta / 2) ** (h - 1) * delta_counting(h - 1, eta / 2))


def weighted_copy_mass(wg: WeightedGraph, pattern: Graph,
                       sets: Sequence[Iterable[int]]) -> Fraction:
    """Total weight of tuples, one vertex per set, inducing the pattern role-wise."""
    h = pattern.n
    if len(sets) != h:
        raise InputError("need one vertex set per pattern vertex")
    tuples_sets = [tuple(sorted(set(s))) for s in sets]
    flat: set[int] = set()
    for s in tuples_sets:
        if flat & set(s):
            raise InputError("sets must be pairwise disjoint")
        flat |= set(s)
    den, iw = wg.dist.scaled_integers()
    total = 0

    def rec(i: int, chosen: list[int], weight: int):
        nonlocal total
        if i == h:
            total += weight
            return
        for u in tuples_sets[i]:
            w = iw[u]
            if w == 0:
                continue
            ok = True
            for j in range(i):
                if pattern.has_edge(j, i) != wg.graph.has_edge(chosen[j], u):
                    ok = False
                    break
            if ok:
                chosen.append(u)
                rec(i + 1, chosen, weight * w)
                chosen.pop()

    rec(0, [], 1)
    return Fraction(total, den ** h)


@dataclass(frozen=True)
class CountingReport:
    delta: Fraction
    mass: Fraction
    bound: Fraction
    margin: Fraction

    @property
    def holds(self) -> bool:
        return self.margin >= 0

    def __bool__(self) -> bool:
        return self.holds


def counting_lemma_check(wg: WeightedGraph, pattern: Graph,
                         sets: Sequence[Iterable[int]], eta,
                         cap: int = CERTIFY_CAP) -> CountingReport:
    """Verify the copy-mass lower bound after checking its hypotheses.

    Hypotheses (densities at least eta on pattern edges, at most 1-eta on
    non-edges, all pairs delta-regular for the recurrence delta) are
    verified with the certifier and raise on failure."""
    eta = Fraction(eta)
    h = pattern.n
    delta = delta_counting(h, eta)
    tuples_sets = [tuple(sorted(set(s))) for s in sets]
    for i in range(h):
        for j in range(i + 1, h):
            d = pair_density(wg, tuples_sets[i], tuples_sets[j])
            if pattern.has_edge(i, j):
                if d < eta:
                    raise ContractError(f"density of pair ({i},{j}) below eta")
            elif d > 1 - eta:
                raise ContractError(f"density of pair ({i},{j}) above 1-eta")
            report = certify_pair(wg, tuples_sets[i], tuples_sets[j], delta, cap)
            if not report.is_regular:
                raise ContractError(f"pair ({i},{j}) is not delta-regular")
    mass = weighted_copy_mass(wg, pattern, tuples_sets)
    bound = delta
    for s in tuples_sets:
        bound *= wg.dist.mass(s)
    return CountingReport(delta, mass, bound, mass - bound)


def partition_index(wg: WeightedGraph, partition: Partition) -> Fraction:
    """Mean-square density functional; non-decreasing under refinement."""
    total = Fraction(0)
    parts = partition.parts
    for i in range(len(parts)):
        di = wg.dist.mass(parts[i])
        for j in range(i + 1, len(parts)):
            dj = wg.dist.mass(parts[j])
            if di == 0 or dj == 0:
                continue
            d = pair_density(wg, parts[i], parts[j])
            total += di * dj * d * d
    return total


def irregular_pair_mass(wg: WeightedGraph, partition: Partition, eps,
                        cap: int = CERTIFY_CAP):
    """(mass of irregular pairs, witnesses keyed by part-index pair)."""
    eps = Fraction(eps)
    parts = partition.parts
    witnesses: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] = {}
    mass = Fraction(0)
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            report = certify_pair(wg, parts[i], parts[j], eps, cap, pair=(i, j))
            if not report.is_regular:
                witnesses[(i, j)] = (report.witness[0], report.witness[1])
                mass += wg.dist.mass(parts[i]) * wg.dist.mass(parts[j])
    return mass, witnesses


def boost_refinement(wg: WeightedGraph, partition: Partition, eps,
                     witnesses=None, cap: int = CERTIFY_CAP) -> Partition:
    """Refine an irregular partition, gaining at least eps^5 of index.

    Each part is cut by the witness sides of every irregular pair it meets
    (common refinement), so the result has at most |P| * 2^|P| parts.  The
    index gain is asserted exactly.  Calling this on a partition that is
    already eps-regular is a contract error."""
    eps = Fraction(eps)
    if witnesses is None:
        mass, witnesses = irregular_pair_mass(wg, partition, eps, cap)
    else:
        mass = Fraction(0)
        for (i, j), (xsub, ysub) in witnesses.items():
            _validate_witness(wg, partition.parts[i], partition.parts[j], xsub, ysub, eps)
            mass += wg.dist.mass(partition.parts[i]) * wg.dist.mass(partition.parts[j])
    if mass <= eps:
        raise ContractError("partition is already eps-regular; nothing to boost")
    cuts_per_part: dict[int, list[tuple[int, ...]]] = {}
    for (i, j), (xsub, ysub) in witnesses.items():
        cuts_per_part.setdefault(i, []).append(xsub)
        cuts_per_part.setdefault(j, []).append(ysub)
    new_parts: list[tuple[int, ...]] = []
    for idx, part in enumerate(partition.parts):
        cuts = cuts_per_part.get(idx)
        if not cuts:
            new_parts.append(part)
            continue
        refined = common_refinement(Partition.of([part]), cuts)
        new_parts.extend(refined.parts)
    result = Partition.of(new_parts)
    assert len(result) <= len(partition) * 2 ** len(partition)
    gain = partition_index(wg, result) - partition_index(wg, partition)
    assert gain >= eps ** 5, f"index gain {gain} below eps^5"
    return result


def _validate_witness(wg, px, py, xsub, ysub, eps):
    if not set(xsub) <= set(px) or not set(ysub) <= set(py):
        raise InputError("witness sets must lie inside their parts")
    dx, dy = wg.dist.mass(px), wg.dist.mass(py)
    if wg.dist.mass(xsub) < eps * dx or wg.dist.mass(ysub) < eps * dy:
        raise InputError("witness sets below the eps mass threshold")
    if abs(pair_density(wg, xsub, ysub) - pair_density(wg, px, py)) <= eps:
        raise InputError("witness does not separate densities by more than eps")


def szemeredi_partition(wg: WeightedGraph, eps, p0: Partition,
                        cap: int = CERTIFY_CAP) -> Partition:
    """Iterate the boosting refinement until the partition is eps-regular.

    Terminates because the index is at most 1 and each round gains eps^5.
    A certification cap hit mid-iteration raises a resource error carrying
    the partial partition."""
    eps = Fraction(eps)
    if tuple(p0.ground()) != tuple(range(wg.n)):
        raise InputError("initial partition must cover the whole vertex set")
    partition = p0
    max_rounds = int(1 / eps ** 5) + 2
    for _ in range(max_rounds):
        try:
            mass, witnesses = irregular_pair_mass(wg, partition, eps, cap)
        except ResourceLimitError as exc:
            raise ResourceLimitError(
                f"certification cap hit during iteration: {exc}", partial=partition
            ) from exc
        if mass <= eps:
            return partition
        partition = boost_refinement(wg, partition, eps, witnesses, cap)
    raise AssertionError("regularity iteration exceeded its index budget")


def partition_deviation_sum(wg: WeightedGraph, coarse: Partition, fine: Partition,
                            weight_by: str = "fine") -> Fraction:
    """Sum of |d(fine cells) - d(parent parts)| over cross pairs.

    ``weight_by`` selects the mass factor: the fine cells' own masses, or
    the parent parts' masses (used by the representatives construction)."""
    owner = {}
    for idx, part in enumerate(coarse.parts):
        for v in part:
            owner[v] = idx
    cells = fine.parts
    total = Fraction(0)
    for a in range(len(cells)):
        pa = owner[cells[a][0]]
        for b in range(a + 1, len(cells)):
            pb = owner[cells[b][0]]
            if pa == pb:
                continue
            dev = abs(pair_density(wg, cells[a], cells[b])
                      - pair_density(wg, coarse.parts[pa], coarse.parts[pb]))
            if weight_by == "fine":
                total += wg.dist.mass(cells[a]) * wg.dist.mass(cells[b]) * dev
            else:
                total += wg.dist.mass(coarse.parts[pa]) * wg.dist.mass(coarse.parts[pb]) * dev
    return total


def strong_partition(wg: WeightedGraph, e_fn: Callable[[int], Fraction], m: int,
                     p0: Partition, cap: int = CERTIFY_CAP) -> tuple[Partition, Partition]:
    """Iterated regular partitions (P, Q) with Q refining P, Q regular at
    e_fn(|P|), and the cell densities of Q deviating from those of P by at
    most e_fn(0) in total.  Terminates once an iteration gains less than
    e_fn(0)^2 of index."""
    if len(p0) > m:
        raise InputError("initial partition larger than m")
    e0 = Fraction(e_fn(0))
    if not 0 < e0 < 1:
        raise InputError("e_fn(0) must lie in (0,1)")
    prev = szemeredi_partition(wg, e0, p0, cap)
    q_prev = partition_index(wg, prev)
    budget = int(1 / (e0 * e0)) + 2
    for _ in range(budget):
        eps_i = Fraction(e_fn(len(prev)))
        nxt = szemeredi_partition(wg, eps_i, prev, cap)
        q_next = partition_index(wg, nxt)
        if q_next <= q_prev + e0 * e0:
            deviation = partition_deviation_sum(wg, prev, nxt, weight_by="fine")
            assert deviation <= e0, f"deviation sum {deviation} exceeds {e0}"
            return prev, nxt
        prev, q_prev = nxt, q_next
    raise AssertionError("strong partition iteration exceeded its index budget")


def turan_ramsey_sets(wg: WeightedGraph, t: int, delta, zeta, seed: int = 0,
                      eps=None, retries: int = 64, cap: int = CERTIFY_CAP) -> list[tuple[int, ...]]:
    """t pairwise delta-regular sets of weight >= zeta with coherent densities
    (all pairs at least 1/2 or all below 1/2).

    Needs every vertex weight below zeta and at most 1/(4^t * 2).  Builds a
    balanced partition into 4^t groups, regularizes it, samples one part per
    group weight-proportionally (retrying until the mass and regularity
    clauses hold), and extracts a monochromatic group set from the density
    majority graph."""
    delta, zeta = Fraction(delta), Fraction(zeta)
    if t < 1:
        raise InputError("t must be positive")
    a = 4 ** t
    if a > wg.n:
        raise ResourceLimitError(f"4^t = {a} groups exceed the {wg.n} vertices")
    for v in range(wg.n):
        if wg.dist[v] >= zeta:
            raise InputError(f"vertex {v} has weight {wg.dist[v]} >= zeta")
        if wg.dist[v] > Fraction(1, 2 * a):
            raise InputError(f"vertex {v} too heavy for a balanced partition into {a}")
    if eps is None:
        eps = delta / (4 * a ** 4)
    groups = balanced_partition(range(wg.n), wg.dist, a)
    partition = szemeredi_partition(wg, eps, groups, cap)
    cells_by_group: list[list[tuple[int, ...]]] = []
    for g in groups.parts:
        gset = set(g)
        cells_by_group.append([c for c in partition.parts if set(c) <= gset])
    diagnostics = []
    for attempt in range(retries):
        stream = prng.derive(seed, "turan-ramsey", attempt)
        picks = []
        for gi, cells in enumerate(cells_by_group):
            masses = [wg.dist.mass(c) for c in cells]
            picks.append(cells[prng.choose_weighted(masses, prng.u128(stream, gi))])
        light = [i for i, p in enumerate(picks) if wg.dist.mass(p) < zeta]
        if light:
            diagnostics.append(f"attempt {attempt}: groups {light} below zeta mass")
            continue
        irregular = []
        for i in range(a):
            for j in range(i + 1, a):
                if not certify_pair(wg, picks[i], picks[j], delta, cap).is_regular:
                    irregular.append((i, j))
        if irregular:
            diagnostics.append(f"attempt {attempt}: irregular pairs {irregular}")
            continue
        dense = {(i, j): pair_density(wg, picks[i], picks[j]) >= Fraction(1, 2)
                 for i in range(a) for j in range(i + 1, a)}
        chosen = _monochromatic_subset(a, t, dense)
        return [picks[i] for i in chosen]
    raise RetryLimitError("failed to select coherent representative sets",
                          diagnostics=diagnostics)


def _monochromatic_subset(a: int, t: int, dense: dict) -> tuple[int, ...]:
    from itertools import combinations

    for combo in combinations(range(a), t):
        values = [dense[(i, j)] for i, j in combinations(combo, 2)]
        if all(values) or not any(values):
            return combo
    raise AssertionError("no monochromatic subset despite 4^t groups")


@dataclass(frozen=True)
class RepresentativeDecomposition:
    """Partition with an exceptional part plus one representative per part."""

    exceptional: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    reps: tuple[tuple[int, ...], ...]
    attempts: int
    seed: int

    def all_parts(self) -> Partition:
        parts = list(self.parts)
        if self.exceptional:
            parts.append(self.exceptional)
        return Partition.of(parts)


def representatives(wg: WeightedGraph, e_fn: Callable[[int], Fraction], m: int,
                    p0: Partition, seed: int = 0, retries: int = 64,
                    cap: int = CERTIFY_CAP) -> RepresentativeDecomposition:
    """Coherent representative subsets, one per part of a refined partition.

    The parts refine the initial partition and all but an exceptional set of
    weight < e_fn(0); each part carries a representative subset such that
    representatives are pairwise e_fn(r)-regular and their densities track
    the part densities up to e_fn(0) in total.  The representative choice is
    randomized; clauses are rechecked exactly and resampled on failure."""
    mono: dict[int, Fraction] = {}

    def e_mono(r: int) -> Fraction:
        if r not in mono:
            vals = [Fraction(e_fn(s)) for s in range(r + 1)]
            mono[r] = min(vals)
        return mono[r]

    eps0 = e_mono(0)

    def e_strong(r: int) -> Fraction:
        base = min(e_mono(r), eps0 / 3)
        if r >= 1:
            base = min(base, eps0 ** 2 / (2 * r ** 4))
        return base

    coarse, fine = strong_partition(wg, e_strong, m, p0, cap)
    threshold = eps0 / len(coarse)
    exceptional: list[int] = []
    kept: list[tuple[int, ...]] = []
    for part in coarse.parts:
        if wg.dist.mass(part) < threshold:
            exceptional.extend(part)
        else:
            kept.append(part)
    exc_mass = wg.dist.mass(exceptional)
    assert exc_mass < eps0
    for part in kept:
        assert any(set(part) <= set(p) for p in p0.parts)
    r = len(kept)
    cells_total = len(fine)
    cells_by_part = [[c for c in fine.parts if set(c) <= set(part)] for part in kept]
    er = e_mono(r)
    diagnostics = []
    for attempt in range(retries):
        stream = prng.derive(seed, "representatives", attempt)
        reps = []
        for i, cells in enumerate(cells_by_part):
            masses = [wg.dist.mass(c) for c in cells]
            reps.append(cells[prng.choose_weighted(masses, prng.u128(stream, i))])
        small = [i for i in range(r)
                 if wg.dist.mass(reps[i]) * 3 * cells_total < wg.dist.mass(kept[i])]
        if small:
            diagnostics.append(f"attempt {attempt}: representatives {small} too light")
            continue
        irregular = [(i, j) for i in range(r) for j in range(i + 1, r)
                     if not certify_pair(wg, reps[i], reps[j], er, cap).is_regular]
        if irregular:
            diagnostics.append(f"attempt {attempt}: irregular pairs {irregular}")
            continue
        deviation = Fraction(0)
        for i in range(r):
            for j in range(i + 1, r):
                deviation += (wg.dist.mass(kept[i]) * wg.dist.mass(kept[j])
                              * abs(pair_density(wg, reps[i], reps[j])
                                    - pair_density(wg, kept[i], kept[j])))
        if deviation > eps0:
            diagnostics.append(f"attempt {attempt}: deviation {deviation} > {eps0}")
            continue
        return RepresentativeDecomposition(tuple(sorted(exceptional)), tuple(kept),
                                           tuple(reps), attempt + 1, seed)
    raise RetryLimitError("failed to sample coherent representatives",
                          diagnostics=diagnostics)
