"""Bit-level helpers shared across the package.

Points of the hypercube are plain Python ints used as bit masks: variable i
is bit i (variable 0 least significant), so a mask doubles as the truth-table
index of the point it encodes.  Vectorized paths use uint64 arrays and are
limited to n <= 64; everything has a plain-int fallback for larger n.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

_FULL64 = (1 << 64) - 1

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


def popcount_u64(a: np.ndarray) -> np.ndarray:
    """Per-element population count of a uint64 array."""
    a = a - ((a >> np.uint64(1)) & _M1)
    a = (a & _M2) + ((a >> np.uint64(2)) & _M2)
    a = (a + (a >> np.uint64(4))) & _M4
    return (a * _H01) >> np.uint64(56)


def mask_from_indices(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << int(i)
    return m


def indices_of(mask: int) -> list[int]:
    """Ascending variable indices of the set bits of ``mask``."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def random_mask(n: int, rng: np.random.Generator) -> int:
    """Uniform n-bit mask (any n)."""
    if n == 0:
        return 0
    return int.from_bytes(rng.bytes((n + 7) // 8), "little") & ((1 << n) - 1)


def random_masks_u64(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform n-bit masks as a uint64 array (n <= 64)."""
    if n > 64:
        raise ValueError("vectorized masks need n <= 64")
    if n == 64:
        return rng.integers(0, _FULL64, size=size, dtype=np.uint64, endpoint=True)
    return rng.integers(0, 1 << n, size=size, dtype=np.uint64)


def rearrange_bits(x: int, mask: int, positions: np.ndarray, rng: np.random.Generator) -> int:
    """Uniformly rearrange the bits of ``x`` at the masked positions.

    Equivalent to applying a uniformly random permutation of those
    coordinates: the multiset of bits inside ``mask`` is preserved, all
    placements are equally likely, bits outside ``mask`` stay put.
    """
    m = (x & mask).bit_count()
    y = x & ~mask
    if m:
        for p in rng.choice(positions, size=m, replace=False):
            y |= 1 << int(p)
    return y


def rearrange_bits_block(
    xs: np.ndarray, mask: int, positions: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Row-wise independent ``rearrange_bits`` over a uint64 block.

    A uniform arrangement of m ones among L slots is the indicator of the m
    smallest of L iid keys; rows where float ties spoil the count are
    redrawn, so the result is exact.
    """
    b = len(xs)
    length = len(positions)
    m = popcount_u64(xs & np.uint64(mask)).astype(np.int64)

    def draw(counts: np.ndarray) -> np.ndarray:
        keys = rng.random((len(counts), length), dtype=np.float32)
        skeys = np.sort(keys, axis=1)
        idx = np.maximum(counts - 1, 0)
        thresh = np.take_along_axis(skeys, idx[:, None], axis=1)
        return (keys <= thresh) & (counts > 0)[:, None]

    bits = draw(m)
    todo = np.flatnonzero(bits.sum(axis=1) != m)
    while len(todo):
        cand = draw(m[todo])
        bits[todo] = cand
        todo = todo[cand.sum(axis=1) != m[todo]]
    full = np.unpackbits(xs.view(np.uint8).reshape(b, 8), axis=1, bitorder="little")
    full[:, positions] = bits
    return np.packbits(full, axis=1, bitorder="little").view(np.uint64).ravel()


def bits_to_hex(bits: np.ndarray) -> str:
    """Pack a 0/1 array little-endian (bit j of byte j//8) into a hex string."""
    return np.packbits(np.asarray(bits, dtype=np.uint8), bitorder="little").tobytes().hex()


def hex_to_bits(hexstr: str, nbits: int) -> np.ndarray:
    raw = bytes.fromhex(hexstr)
    if len(raw) != (nbits + 7) // 8:
        raise ValueError(f"expected {(nbits + 7) // 8} bytes for {nbits} bits, got {len(raw)}")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    if bits[nbits:].any():
        raise ValueError("nonzero padding bits")
    return bits[:nbits].copy()


def randrange_bigint(bound: int, rng: np.random.Generator) -> int:
    """Uniform integer in [0, bound) for arbitrarily large bounds."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    nbytes = (bound.bit_length() + 7) // 8
    shift = nbytes * 8 - bound.bit_length()
    while True:
        u = int.from_bytes(rng.bytes(nbytes), "little") >> shift
        if u < bound:
            return u
