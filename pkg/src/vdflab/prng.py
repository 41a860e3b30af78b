"""Deterministic randomness: a counter-based 64-bit generator.

Every random decision in the package flows through this module so that runs
are reproducible from a single 64-bit seed and independent streams can be
derived for parallel trials.

The generator is SplitMix64 used in counter mode:

    word(seed, i) = finalize((seed + (i + 1) * GOLDEN) mod 2^64)

where ``finalize`` is the SplitMix64 output permutation and GOLDEN is the
64-bit golden-ratio constant 0x9E3779B97F4A7C15.  Words are randomly
accessible by index, which gives stream splitting by (seed, draw index) for
free.  Sub-streams are derived by folding labels (integers or UTF-8 strings
hashed with FNV-1a) through the same finalizer; see :func:`derive`.

Vertex sampling uses an exact inverse CDF: draw ``u`` uniform on
[0, 2^128) from two words, then pick the first vertex whose cumulative
rational weight C_i satisfies u < C_i * 2^128.  The thresholds
ceil(C_i * 2^128) are precomputed integers, so the comparison is exact
integer arithmetic (no rejection, no floats).  A vertex of weight zero gets
an empty interval and is never drawn; every other vertex is drawn with
probability within 2^-128 of its weight.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction
from typing import Iterable, Sequence

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
TWO128 = 1 << 128


def mix64(z: int) -> int:
    """SplitMix64 output permutation of a 64-bit value."""
    z &= MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & MASK64
    z ^= z >> 31
    return z


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive(seed: int, *labels: int | str) -> int:
    """Derive an independent stream seed from ``seed`` and a label path."""
    s = seed & MASK64
    for label in labels:
        h = _fnv1a(label.encode("utf-8")) if isinstance(label, str) else label & MASK64
        s = mix64(s ^ mix64(h))
    return s


def word(seed: int, index: int) -> int:
    """The ``index``-th 64-bit word of the stream with the given seed."""
    return mix64((seed + (index + 1) * GOLDEN) & MASK64)


def u128(seed: int, draw_index: int) -> int:
    """A 128-bit uniform integer; draw ``k`` uses words 2k and 2k+1."""
    return (word(seed, 2 * draw_index) << 64) | word(seed, 2 * draw_index + 1)


def cdf_thresholds(weights: Sequence[Fraction]) -> list[int]:
    """Fixed-point thresholds ceil(C_i * 2^128) for the cumulative weights."""
    thresholds = []
    acc = Fraction(0)
    for w in weights:
        acc += w
        num, den = acc.numerator * TWO128, acc.denominator
        thresholds.append(-(-num // den))
    return thresholds


def index_from_u128(thresholds: Sequence[int], u: int) -> int:
    """First index i with u < thresholds[i]; exact integer comparison."""
    return bisect_right(thresholds, u)


def sample_indices(weights: Sequence[Fraction], count: int, seed: int) -> list[int]:
    """``count`` independent draws from the rational distribution."""
    thresholds = cdf_thresholds(weights)
    return [index_from_u128(thresholds, u128(seed, k)) for k in range(count)]


def choose_weighted(weights: Sequence[Fraction], u: int) -> int:
    """Pick an index proportionally to ``weights`` from one 128-bit value.

    Weights need not sum to one; the draw is over weights/total.
    """
    total = sum(weights, Fraction(0))
    if total <= 0:
        raise ValueError("choose_weighted needs positive total weight")
    scaled = [w / total for w in weights]
    return index_from_u128(cdf_thresholds(scaled), u)


def shuffled(items: Iterable, seed: int) -> list:
    """Fisher-Yates shuffle driven by the stream (used by generators)."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = word(seed, i) % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out
