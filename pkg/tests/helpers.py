"""Independent brute-force oracles for the tests.

These deliberately avoid the package's layer/bucketing tricks: straight
double loops over points and explicitly enumerated permutations, so they can
serve as ground truth for the library's faster implementations.
"""

from fractions import Fraction
from itertools import permutations

import numpy as np


def apply_perm_to_point(x: int, mapping, n: int) -> int:
    """y with y_{mapping[i]} = x_i."""
    y = 0
    for i in range(n):
        if (x >> i) & 1:
            y |= 1 << mapping[i]
    return y


def brute_influence(f, members) -> Fraction:
    """Enumerate every (x, rerandomized y_J) pair."""
    n = f.n
    members = sorted(members)
    j = len(members)
    hits = 0
    for x in range(1 << n):
        for ybits in range(1 << j):
            z = x
            for pos, var in enumerate(members):
                z &= ~(1 << var)
                z |= ((ybits >> pos) & 1) << var
            hits += f(x) != f(z)
    return Fraction(hits, 1 << (n + j))


def brute_syminf(f, members) -> Fraction:
    """Enumerate every x and every permutation of the J coordinates."""
    n = f.n
    members = sorted(members)
    hits = 0
    total = 0
    for perm in permutations(members):
        mapping = list(range(n))
        for src, dst in zip(members, perm):
            mapping[src] = dst
        for x in range(1 << n):
            hits += f(x) != f(apply_perm_to_point(x, mapping, n))
            total += 1
    return Fraction(hits, total)


def brute_dist(f, g) -> Fraction:
    n = f.n
    hits = sum(f(x) != g(x) for x in range(1 << n))
    return Fraction(hits, 1 << n)


def strong_core_spec(n: int):
    """Two-asymmetric-variable instance whose variables are easy to locate:
    f(x) = x_a xor (x_b and parity of the symmetric block)."""
    import psymtest as pt

    a, b = (5, 11) if n > 12 else (2, 5)
    core = np.zeros((4, n - 1), dtype=np.uint8)
    for xc in range(4):
        for w in range(n - 1):
            core[xc, w] = (xc & 1) ^ (((xc >> 1) & 1) & (w & 1))
    return pt.PartiallySymmetricCore(n, 2, (a, b), core)


def random_junta(n: int, k: int, relevant, table_bits):
    """k-junta as a core-form function whose core ignores the weight."""
    import psymtest as pt

    rows = np.asarray(table_bits, dtype=np.uint8).reshape(1 << k, 1)
    core = np.repeat(rows, n - k + 1, axis=1)
    return pt.PartiallySymmetricCore(n, k, tuple(relevant), core)
