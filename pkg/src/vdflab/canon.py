"""Canonical forms and exhaustive enumeration of small graphs.

The canonical code of a graph is the lexicographically smallest
upper-triangle edge mask over a restricted set of vertex permutations: only
permutations consistent with an isomorphism-invariant vertex ordering
(degree, then sorted neighbour degrees) are tried.  That invariant is the
same for isomorphic graphs, so two graphs share a code iff they are
isomorphic.  Worst case (highly regular graphs) degenerates to all n!
permutations, which is why enumeration is capped.
"""

from __future__ import annotations

from itertools import permutations

from .errors import ResourceLimitError
from .wgraph import Graph, bits, pair_list

ENUMERATION_CAP = 8

_canon_cache: dict[tuple[int, tuple[int, ...]], int] = {}


def canonical_code(g: Graph) -> int:
    """Permutation-minimal edge mask; equal codes iff isomorphic graphs."""
    key = (g.n, g.adj)
    cached = _canon_cache.get(key)
    if cached is not None:
        return cached
    n = g.n
    if n <= 1:
        _canon_cache[key] = 0
        return 0
    invariant = []
    for v in range(n):
        nbr_degs = tuple(sorted(g.degree(u) for u in bits(g.adj[v])))
        invariant.append((g.degree(v), nbr_degs))
    classes: dict[tuple, list[int]] = {}
    for v, inv in enumerate(invariant):
        classes.setdefault(inv, []).append(v)
    ordered_classes = [classes[inv] for inv in sorted(classes)]
    pairs = pair_list(n)
    best = None
    for perm_parts in _class_permutations(ordered_classes):
        # position -> original vertex
        placement = [v for part in perm_parts for v in part]
        code = 0
        for k, (i, j) in enumerate(pairs):
            if g.has_edge(placement[i], placement[j]):
                code |= 1 << k
        if best is None or code < best:
            best = code
    _canon_cache[key] = best
    return best


def _class_permutations(ordered_classes):
    if not ordered_classes:
        yield []
        return
    head, tail = ordered_classes[0], ordered_classes[1:]
    for perm in permutations(head):
        for rest in _class_permutations(tail):
            yield [list(perm)] + rest


_graphs_cache: dict[int, list[Graph]] = {}


def all_graphs(n: int) -> list[Graph]:
    """All graphs on n vertices up to isomorphism (canonical representatives)."""
    if n > ENUMERATION_CAP:
        raise ResourceLimitError(f"graph enumeration capped at {ENUMERATION_CAP} vertices")
    if n in _graphs_cache:
        return _graphs_cache[n]
    if n == 0:
        result = [Graph.empty(0)]
    else:
        seen: dict[int, Graph] = {}
        for smaller in all_graphs(n - 1):
            for mask in range(1 << (n - 1)):
                candidate = smaller.add_vertex(mask)
                code = canonical_code(candidate)
                if code not in seen:
                    seen[code] = candidate
        result = [seen[c] for c in sorted(seen)]
    _graphs_cache[n] = result
    return result


def all_graphs_up_to(n_max: int) -> list[Graph]:
    out: list[Graph] = []
    for n in range(n_max + 1):
        out.extend(all_graphs(n))
    return out


def isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and canonical_code(g) == canonical_code(h)
