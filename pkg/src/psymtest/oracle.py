"""Brute-force ground truths for certifying test instances at small n.

Everything here enumerates, so the caps are tight; the point is exactness
(rational arithmetic throughout), not speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._bits import mask_from_indices, popcount_u64
from .boolfn import BooleanFunction, PartiallySymmetricCore
from .influence import _symmetric_distance_table

MAX_DIST_N = 22
MAX_TSYM_N = 14
MAX_ISO_N = 10
MAX_CORE_N = 16
MAX_MEASURE_N = 16


def dist_exact(f: BooleanFunction, g: BooleanFunction) -> Fraction:
    """Exact fraction of points where f and g disagree."""
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    if f.n > MAX_DIST_N:
        raise ValueError(f"exact distance is capped at n <= {MAX_DIST_N}")
    diff = int(np.count_nonzero(f.truth_table() != g.truth_table()))
    return Fraction(diff, 1 << f.n)


def dist_to_t_symmetric(f: BooleanFunction, t: int) -> Fraction:
    """Min over |J| = t of the distance to the closest J-symmetric function."""
    n = f.n
    if n > MAX_TSYM_N:
        raise ValueError(f"t-symmetric distance is capped at n <= {MAX_TSYM_N}")
    if not 0 <= t <= n:
        raise ValueError("t outside 0..n")
    table = f.truth_table()
    best = Fraction(1)
    for members in itertools.combinations(range(n), t):
        d = _symmetric_distance_table(table, n, mask_from_indices(members))
        if d < best:
            best = d
            if best == 0:
                break
    return best


def dist_to_k_junta(f: BooleanFunction, k: int) -> Fraction:
    """Min over |S| = k of the distance to the closest function on S only."""
    n = f.n
    if n > MAX_TSYM_N:
        raise ValueError(f"junta distance is capped at n <= {MAX_TSYM_N}")
    if not 0 <= k <= n:
        raise ValueError("k outside 0..n")
    table = f.truth_table()
    idx = np.arange(1 << n, dtype=np.int64)
    best = Fraction(1)
    for members in itertools.combinations(range(n), k):
        key = np.zeros(1 << n, dtype=np.int64)
        for j, s in enumerate(members):
            key |= ((idx >> s) & 1) << j
        ones = np.bincount(key[table.astype(bool)], minlength=1 << k)
        cube = 1 << (n - k)
        flips = int(np.sum(np.minimum(ones, cube - ones)))
        d = Fraction(flips, 1 << n)
        if d < best:
            best = d
            if best == 0:
                break
    return best


def dist_to_iso_class(f_spec: PartiallySymmetricCore, g: BooleanFunction) -> Fraction:
    """Min distance from g to any relabeling of the core-form function.

    A relabeling is determined by the ordered placement of the k core
    coordinates; the symmetric block is interchangeable.
    """
    n = f_spec.n
    if g.n != n:
        raise ValueError("dimension mismatch")
    if n > MAX_ISO_N:
        raise ValueError(f"isomorphism-class distance is capped at n <= {MAX_ISO_N}")
    k = f_spec.k
    g_table = g.truth_table()
    idx = np.arange(1 << n, dtype=np.uint64)
    best = Fraction(1)
    for placement in itertools.permutations(range(n), k):
        xc = np.zeros(1 << n, dtype=np.int64)
        for c, p in enumerate(placement):
            xc |= ((idx.astype(np.int64) >> p) & 1) << c
        placed_mask = mask_from_indices(placement)
        w_sym = popcount_u64(idx & np.uint64(((1 << n) - 1) ^ placed_mask)).astype(np.int64)
        vals = f_spec.core[xc, w_sym]
        diff = int(np.count_nonzero(vals != g_table))
        d = Fraction(diff, 1 << n)
        if d < best:
            best = d
            if best == 0:
                break
    return best


def _invariant_transposition(table: np.ndarray, n: int, i: int, j: int) -> bool:
    idx = np.arange(1 << n, dtype=np.int64)
    bi = (idx >> i) & 1
    bj = (idx >> j) & 1
    sel = bi != bj
    swapped = idx[sel] ^ ((1 << i) | (1 << j))
    return bool(np.array_equal(table[sel], table[swapped]))


def is_j_symmetric(f: BooleanFunction, members: Iterable[int]) -> bool:
    """Exhaustive check that every transposition inside J leaves f unchanged."""
    n = f.n
    if n > MAX_CORE_N:
        raise ValueError(f"symmetry check is capped at n <= {MAX_CORE_N}")
    mem = sorted(set(int(v) for v in members))
    if mem and not (0 <= mem[0] and mem[-1] < n):
        raise ValueError("set members outside range(n)")
    table = f.truth_table()
    return all(
        _invariant_transposition(table, n, a, b) for a, b in itertools.combinations(mem, 2)
    )


def find_core(f: BooleanFunction) -> tuple[int, ...]:
    """Largest class of mutually interchangeable variables.

    Invariance under single transpositions is an equivalence relation here
    (invariances compose), and transpositions generate all permutations of a
    class, so the classes are exactly the maximal sets on which f is
    symmetric.  Ties break toward the class with the smallest member.
    """
    n = f.n
    if n > MAX_CORE_N:
        raise ValueError(f"core search is capped at n <= {MAX_CORE_N}")
    table = f.truth_table()
    parent = list(range(n))

    def root(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in itertools.combinations(range(n), 2):
        if _invariant_transposition(table, n, i, j):
            parent[root(i)] = root(j)
    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(root(v), []).append(v)
    best = max(classes.values(), key=lambda c: (len(c), -min(c)))
    return tuple(sorted(best))


@dataclass(frozen=True)
class SetFamily:
    """Generator sets of a family over the ground set range(n)."""

    n: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        for s in self.sets:
            if any(not 0 <= v < self.n for v in s):
                raise ValueError("family member outside the ground set")

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(n, tuple(frozenset(int(v) for v in s) for s in sets))


def is_t_intersecting(family: SetFamily, t: int) -> bool:
    """Every two members (a member with itself included) share >= t elements."""
    sets = family.sets
    for i in range(len(sets)):
        for j in range(i, len(sets)):
            if len(sets[i] & sets[j]) < t:
                return False
    return True


def mu_p(family: SetFamily, p) -> Fraction:
    """Biased measure of the family's upward closure.

    A p-biased random subset J belongs iff it contains some generator set.
    Exact enumeration of the ground cube, so capped at n <= 16; no sampled
    approximation is substituted.
    """
    n = family.n
    if n > MAX_MEASURE_N:
        raise ValueError(f"exact biased measure is capped at n <= {MAX_MEASURE_N}")
    pf = Fraction(p)
    if not 0 <= pf <= 1:
        raise ValueError("p outside [0, 1]")
    js = np.arange(1 << n, dtype=np.int64)
    member = np.zeros(1 << n, dtype=bool)
    for s in family.sets:
        m = mask_from_indices(s)
        member |= (js & m) == m
    sizes = popcount_u64(js.astype(np.uint64)).astype(np.int64)
    counts = np.bincount(sizes[member], minlength=n + 1)
    total = Fraction(0)
    for s, c in enumerate(counts):
        if c:
            total += int(c) * pf**s * (1 - pf) ** (n - s)
    return total


def hypergeometric_pmf(n: int, m: int, k: int) -> list[Fraction]:
    """Exact law of the red count when drawing k of n balls, m of them red."""
    if not (0 <= m <= n and 0 <= k <= n):
        raise ValueError("need 0 <= m <= n and 0 <= k <= n")
    denom = comb(n, k)
    return [Fraction(comb(m, i) * comb(n - m, k - i), denom) for i in range(k + 1)]


def binomial_pmf(k: int, p) -> list[Fraction]:
    """Exact law of successes in k trials at success probability p."""
    pf = Fraction(p)
    if k < 0 or not 0 <= pf <= 1:
        raise ValueError("need k >= 0 and p in [0, 1]")
    return [comb(k, i) * pf**i * (1 - pf) ** (k - i) for i in range(k + 1)]


def tv_exact(p, q) -> Fraction:
    """Total variation distance between two finite-support distributions.

    Accepts mappings keyed by outcome or sequences aligned by index; values
    must be exact (int or Fraction).
    """
    if isinstance(p, Mapping) or isinstance(q, Mapping):
        pm = dict(p) if isinstance(p, Mapping) else dict(enumerate(p))
        qm = dict(q) if isinstance(q, Mapping) else dict(enumerate(q))
        keys = set(pm) | set(qm)
        total = sum(abs(Fraction(pm.get(key, 0)) - Fraction(qm.get(key, 0))) for key in keys)
    else:
        ps: Sequence = list(p)
        qs: Sequence = list(q)
        length = max(len(ps), len(qs))
        ps = ps + [0] * (length - len(ps))
        qs = qs + [0] * (length - len(qs))
        total = sum(abs(Fraction(a) - Fraction(b)) for a, b in zip(ps, qs))
    return total / 2


def tv_hypergeometric_binomial(n: int, m: int, k: int) -> Fraction:
    """Exact distance between the k-draw hypergeometric law and its binomial
    match at success probability m/n."""
    if n <= 0:
        raise ValueError("need n >= 1")
    return tv_exact(hypergeometric_pmf(n, m, k), binomial_pmf(k, Fraction(m, n)))


__all__ = [
    "SetFamily",
    "binomial_pmf",
    "dist_exact",
    "dist_to_iso_class",
    "dist_to_k_junta",
    "dist_to_t_symmetric",
    "find_core",
    "hypergeometric_pmf",
    "is_j_symmetric",
    "is_t_intersecting",
    "mu_p",
    "tv_exact",
    "tv_hypergeometric_binomial",
]
