"""Randomized query-access testers.

``junta_test`` looks for parts of a random partition that contain relevant
variables; ``partially_symmetric_test`` looks for parts containing asymmetric
variables, using weight-preserving permutations so the workspace part absorbs
the surplus.  Both accept when at most k parts are identified.

Every verdict reports the exact number of oracle evaluations performed; the
hot loops generate query pairs in vectorized blocks, and a block's unused
tail still counts as queried, which the asserted query bounds absorb.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2
from typing import Iterable, Sequence

import numpy as np

from ._bits import (
    indices_of,
    random_mask,
    random_masks_u64,
    rearrange_bits,
    rearrange_bits_block,
)
from .boolfn import BooleanFunction, CountingFunction

_BLOCK_START = 64
_BLOCK_CAP = 1 << 14


@dataclass(frozen=True)
class TesterConfig:
    """Multipliers for the hidden constants of the testers.

    ``c_parts`` scales the partition size, ``c_iters`` the main loop length.
    The defaults are calibrated so the statistical contracts hold at the
    sample sizes used in the acceptance suite.  ``seed`` is a convenience
    slot for callers that bundle a seed with the multipliers; the library
    functions themselves always take an explicit generator.
    """

    __test__ = False  # keep pytest from collecting the class

    c_parts: float = 3.0
    c_iters: float = 24.0
    seed: int | None = None

    def __post_init__(self):
        if self.c_parts < 1 or self.c_iters < 1:
            raise ValueError("multipliers must be >= 1")


@dataclass
class Partition:
    """Disjoint parts (bit masks) covering range(n); parts may be empty."""

    n: int
    parts: list[int]

    def __post_init__(self):
        union = 0
        total = 0
        for mask in self.parts:
            union |= mask
            total += mask.bit_count()
        if union != (1 << self.n) - 1 or total != self.n:
            raise ValueError("parts must be disjoint and cover range(n)")
        self._positions: dict[int, np.ndarray] = {}

    @property
    def r(self) -> int:
        return len(self.parts)

    def size(self, i: int) -> int:
        return self.parts[i].bit_count()

    def positions(self, i: int) -> np.ndarray:
        if i not in self._positions:
            self._positions[i] = np.array(indices_of(self.parts[i]), dtype=np.int64)
        return self._positions[i]


def random_partition(n: int, r: int, rng: np.random.Generator) -> Partition:
    """Assign each index independently and uniformly among r parts.

    Once r >= n there is nothing to gain from collisions, so the partition
    degenerates to the n single-element sets.
    """
    if r < 1:
        raise ValueError("need at least one part")
    if r >= n:
        return Partition(n, [1 << i for i in range(n)])
    assign = rng.integers(0, r, size=n)
    parts = []
    for p in range(r):
        sel = np.flatnonzero(assign == p)
        parts.append(int(sum(1 << int(i) for i in sel)))
    return Partition(n, parts)


@dataclass
class TestVerdict:
    __test__ = False  # keep pytest from collecting the class

    accepted: bool
    queries: int
    found_parts: list[int]
    partition: Partition
    workspace: int | None = None
    failure_reason: str | None = None


def _rounds(cfg: TesterConfig, k: int, eps: float) -> int:
    return ceil(cfg.c_iters * max(k, 1) / eps)


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")


# ---------------------------------------------------------------------------
# Junta testing


def _junta_locate(
    g: BooleanFunction, x: int, z: int, order: Sequence[int], cum: Sequence[int], fx: int
) -> int:
    """Binary-search the hybrid path from x to z for a part that flips f.

    ``cum[i]`` is the union mask of the first i parts in ``order``; the
    hybrid point i takes z's bits there and x's bits elsewhere.
    """
    lo, hi = 0, len(order)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        point = (x & ~cum[mid]) | (z & cum[mid])
        if g(point) != fx:
            hi = mid
        else:
            lo = mid
    return order[hi - 1]


def junta_test(
    f: BooleanFunction,
    k: int,
    eps: float,
    rng: np.random.Generator,
    cfg: TesterConfig | None = None,
) -> TestVerdict:
    """Accepts every k-junta; rejects functions far from all k-juntas.

    Each round rerandomizes the coordinates outside the identified parts and,
    when the value flips, binary-searches the affected part.  Rejects as soon
    as more than k parts are identified.
    """
    cfg = cfg or TesterConfig()
    if k < 0:
        raise ValueError("k must be >= 0")
    _check_eps(eps)
    n = f.n
    r = max(1, ceil(cfg.c_parts * k * k))
    partition = random_partition(n, r, rng)
    g = CountingFunction(f)
    rounds = _rounds(cfg, k, eps)
    max_block = min(_BLOCK_CAP, max(_BLOCK_START, rounds // (8 * (k + 1))))

    found: list[int] = []
    j_mask = 0
    accepted = True
    consumed = 0
    block = _BLOCK_START
    vector = n <= 64

    while consumed < rounds:
        todo = rounds - consumed
        b = min(block, todo)
        if vector:
            xs = random_masks_u64(n, b, rng)
            ys = random_masks_u64(n, b, rng)
            zs = (xs & np.uint64(j_mask)) | (ys & np.uint64(((1 << 64) - 1) ^ j_mask))
            fx = g.eval_many(xs)
            fz = g.eval_many(zs)
            hits = np.nonzero(fx != fz)[0]
            if len(hits) == 0:
                consumed += b
                block = min(block * 2, max_block)
                continue
            h = int(hits[0])
            consumed += h + 1
            x, z, fxv = int(xs[h]), int(zs[h]), int(fx[h])
        else:
            x = random_mask(n, rng)
            y = random_mask(n, rng)
            z = (x & j_mask) | (y & ~j_mask)
            fxv = g(x)
            consumed += 1
            if g(z) == fxv:
                continue
        order = [p for p in range(partition.r) if p not in found and partition.parts[p]]
        cum = [0]
        for p in order:
            cum.append(cum[-1] | partition.parts[p])
        part = _junta_locate(g, x, z, order, cum, fxv)
        found.append(part)
        j_mask |= partition.parts[part]
        block = _BLOCK_START
        if len(found) > k:
            accepted = False
            break

    return TestVerdict(accepted, g.count, found, partition)


# ---------------------------------------------------------------------------
# Partial-symmetry testing


def _chunks_of(partition: Partition, workspace: int) -> list[tuple[int, int]]:
    """Split every non-workspace part into pieces of at most ceil(|W|/4).

    Returns (owner part index, chunk mask) pairs; owners repeat when a part
    splits.  Small pieces keep every weight adjustment within the slack the
    workspace can absorb.
    """
    w_size = partition.size(workspace)
    cap = max(1, -(-w_size // 4))
    out = []
    for p in range(partition.r):
        if p == workspace:
            continue
        pos = partition.positions(p)
        for start in range(0, len(pos), cap):
            piece = pos[start : start + cap]
            out.append((p, int(sum(1 << int(v) for v in piece))))
    return out


def _weight_preserving_chain(
    x: int,
    y: int,
    partition: Partition,
    workspace: int,
    j_parts: Iterable[int],
    rng: np.random.Generator,
) -> tuple[list[int], list[int]]:
    """Inputs x = x^0, ..., x^t = y, each step a permutation of one chunk + W.

    Every step settles one chunk to y's bits, parking the weight difference
    in the workspace at uniformly random positions; the final step also
    aligns the workspace itself.  All points keep the Hamming weight of x.
    """
    if x.bit_count() != y.bit_count():
        raise ValueError("endpoints must have equal weight")
    j_set = set(j_parts)
    w_mask = partition.parts[workspace]
    w_positions = partition.positions(workspace)
    w_size = len(w_positions)
    weight = x.bit_count()

    pending: list[tuple[int, int, int]] = []  # (owner, chunk mask, ones deficit)
    for owner, cmask in _chunks_of(partition, workspace):
        if (x ^ y) & cmask:
            d = (y & cmask).bit_count() - (x & cmask).bit_count()
            pending.append((owner, cmask, d))

    points = [x]
    owners: list[int] = []
    cur = x
    cur_w = (x & w_mask).bit_count()
    prefer_surplus = True

    while pending:
        if len(pending) == 1:
            pick = 0
        else:
            pick = -1
            for want_surplus in (prefer_surplus, not prefer_surplus):
                for idx, (_, _, d) in enumerate(pending):
                    if d == 0:
                        continue
                    if (d < 0) != want_surplus:
                        continue
                    if d > 0 and cur_w >= d:
                        pick = idx
                        break
                    if d < 0 and w_size - cur_w >= -d:
                        pick = idx
                        break
                if pick >= 0:
                    break
            if pick < 0:
                for idx, (_, _, d) in enumerate(pending):
                    if d == 0:
                        pick = idx
                        break
            assert pick >= 0, "no feasible chunk; cannot happen for |W| >= n/(2r)"
        owner, cmask, d = pending.pop(pick)
        cur = (cur & ~cmask) | (y & cmask)
        cur_w -= d
        assert 0 <= cur_w <= w_size
        if pending:
            cur &= ~w_mask
            if cur_w:
                for p in rng.choice(w_positions, size=cur_w, replace=False):
                    cur |= 1 << int(p)
        else:
            cur = (cur & ~w_mask) | (y & w_mask)
            assert cur == y
        assert cur.bit_count() == weight, "chain step changed the Hamming weight"
        points.append(cur)
        owners.append(owner)
        if d:
            prefer_surplus = d > 0

    if cur != y:
        # x and y agree outside W; a lone workspace-internal step remains and
        # gets attributed to the lowest-indexed free part, if any exists.
        assert (cur ^ y) & ~w_mask == 0
        fallback = next(
            (p for p in range(partition.r) if p != workspace and p not in j_set), None
        )
        if fallback is None:
            return [], []
        points.append(y)
        owners.append(fallback)
    return points, owners


def _chain_search(g: BooleanFunction, points: list[int], f_first: int) -> int:
    """Index of the step whose permutation flips the value of f."""
    lo, hi = 0, len(points) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if g(points[mid]) != f_first:
            hi = mid
        else:
            lo = mid
    return hi - 1


def _locate_asymmetric_part(
    g: BooleanFunction,
    x: int,
    y: int,
    partition: Partition,
    j_parts: Iterable[int],
    workspace: int,
    fx: int,
    rng: np.random.Generator,
) -> int | None:
    points, owners = _weight_preserving_chain(x, y, partition, workspace, j_parts, rng)
    if not owners:
        return None
    step = _chain_search(g, points, fx)
    owner = owners[step]
    assert owner != workspace and owner not in set(j_parts)
    return owner


def find_asymmetric_set(
    f: BooleanFunction,
    partition: Partition,
    j_parts: Iterable[int],
    workspace: int,
    rng: np.random.Generator,
) -> int | None:
    """One probe for a part holding an asymmetric variable.

    Draws x and a uniform permutation of the coordinates outside the
    identified parts; on a value flip, walks the weight-preserving chain and
    returns the part whose step flipped f.  Succeeds with probability equal
    to the symmetric influence of the unidentified coordinates.
    """
    j_parts = list(j_parts)
    if workspace in j_parts:
        raise ValueError("workspace cannot be an identified part")
    n = f.n
    if 2 * partition.r * partition.size(workspace) < n:
        raise ValueError("workspace too small (needs |W| >= n / (2r))")
    j_mask = 0
    for p in j_parts:
        j_mask |= partition.parts[p]
    jbar_mask = ((1 << n) - 1) ^ j_mask
    positions = np.array(indices_of(jbar_mask), dtype=np.int64)
    x = random_mask(n, rng)
    y = rearrange_bits(x, jbar_mask, positions, rng)
    fx = f(x)
    if f(y) == fx:
        return None
    return _locate_asymmetric_part(f, x, y, partition, j_parts, workspace, fx, rng)


def psym_partition_size(n: int, k: int, eps: float, cfg: TesterConfig) -> int:
    """Part count for the partial-symmetry tester: next odd >= c_parts k^2 / eps^2."""
    r = max(3, ceil(cfg.c_parts * k * k / (eps * eps)))
    return r if r % 2 == 1 else r + 1


def psym_query_bound(rounds: int, r: int, n: int, w_size: int) -> int:
    """Worst-case query budget: every round costs two probes plus, on a hit,
    a binary search over at most r + 4n/|W| chunks."""
    t_bound = max(2, r + ceil(4 * n / w_size))
    return rounds * (2 + ceil(log2(t_bound)))


def _check_psym_sizing(n: int, k: int) -> None:
    if k < 0:
        raise ValueError("k must be >= 0")
    if k >= n / 2:
        raise ValueError(f"k = {k} too large for n = {n} (need k < n/2)")


def partially_symmetric_test(
    f: BooleanFunction,
    k: int,
    eps: float,
    rng: np.random.Generator,
    cfg: TesterConfig | None = None,
) -> TestVerdict:
    """Tests whether all but at most k variables are interchangeable.

    Draws a random partition with an odd number of parts and a random
    workspace; too small a workspace rejects immediately with
    ``failure_reason="workspace"``.  Each round permutes the coordinates
    outside the identified parts and attributes any value flip to a part;
    more than k identified parts reject.  The verdict keeps the partition,
    workspace, and parts for reuse by the core sampler.
    """
    cfg = cfg or TesterConfig()
    n = f.n
    _check_psym_sizing(n, k)
    _check_eps(eps)
    r = psym_partition_size(n, k, eps, cfg)
    partition = random_partition(n, r, rng)
    workspace = int(rng.integers(0, partition.r))
    w_size = partition.size(workspace)
    if 2 * partition.r * w_size < n:
        return TestVerdict(False, 0, [], partition, workspace, failure_reason="workspace")

    g = CountingFunction(f)
    rounds = _rounds(cfg, k, eps)
    max_block = min(_BLOCK_CAP, max(_BLOCK_START, rounds // (8 * (k + 1))))
    found: list[int] = []
    accepted = True
    consumed = 0
    block = _BLOCK_START
    vector = n <= 64

    j_mask = 0
    jbar_mask = (1 << n) - 1
    positions = np.array(indices_of(jbar_mask), dtype=np.int64)

    while consumed < rounds:
        b = min(block, rounds - consumed)
        if vector:
            xs = random_masks_u64(n, b, rng)
            ys = rearrange_bits_block(xs, jbar_mask, positions, rng)
            fx = g.eval_many(xs)
            fy = g.eval_many(ys)
            hits = np.nonzero(fx != fy)[0]
            if len(hits) == 0:
                consumed += b
                block = min(block * 2, max_block)
                continue
            h = int(hits[0])
            consumed += h + 1
            x, y, fxv = int(xs[h]), int(ys[h]), int(fx[h])
        else:
            x = random_mask(n, rng)
            y = rearrange_bits(x, jbar_mask, positions, rng)
            fxv = g(x)
            consumed += 1
            if g(y) == fxv:
                continue
        part = _locate_asymmetric_part(g, x, y, partition, found, workspace, fxv, rng)
        block = _BLOCK_START
        if part is None:
            continue
        found.append(part)
        j_mask |= partition.parts[part]
        jbar_mask = ((1 << n) - 1) ^ j_mask
        positions = np.array(indices_of(jbar_mask), dtype=np.int64)
        if len(found) > k:
            accepted = False
            break

    bound = psym_query_bound(rounds, partition.r, n, w_size)
    assert g.count <= bound, f"query count {g.count} exceeds budget {bound}"
    return TestVerdict(accepted, g.count, found, partition, workspace)


__all__ = [
    "Partition",
    "TesterConfig",
    "TestVerdict",
    "find_asymmetric_set",
    "junta_test",
    "partially_symmetric_test",
    "psym_partition_size",
    "psym_query_bound",
    "random_partition",
]
