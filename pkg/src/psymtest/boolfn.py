"""Boolean function representations with uniform query access.

Every function is a total map {0,1}^n -> {0,1} queried at integer masks
(variable i is bit i, variable 0 least significant, so a mask is also the
truth-table index of the point).  Dense truth tables are capped at n <= 25;
larger n must use one of the structured kinds.  All functions are immutable
after construction and safe to query concurrently; the counting wrapper's
counter is the single mutable spot and needs external synchronization if
shared across threads.
"""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from ._bits import (
    bits_to_hex,
    hex_to_bits,
    indices_of,
    mask_from_indices,
    popcount_u64,
    random_mask,
)

MAX_DENSE_N = 25


def point_from_bits(bits: Iterable[int]) -> int:
    """Mask of a point given as a bit sequence (bits[i] = variable i)."""
    x = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        x |= b << i
    return x


def point_bits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(n))


class Permutation:
    """Relabeling of n variable positions.

    ``mapping[i]`` is the destination of variable i: applying the permutation
    to a point moves bit i of the input to bit ``mapping[i]`` of the result.
    """

    __slots__ = ("mapping",)

    def __init__(self, mapping: Sequence[int]):
        m = tuple(int(v) for v in mapping)
        if sorted(m) != list(range(len(m))):
            raise ValueError("mapping is not a bijection on range(n)")
        self.mapping = m

    def __len__(self) -> int:
        return len(self.mapping)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.mapping == other.mapping

    def __hash__(self) -> int:
        return hash(self.mapping)

    def __repr__(self) -> str:
        return f"Permutation({list(self.mapping)})"

    def apply(self, x: int) -> int:
        """Move each set bit i of ``x`` to position mapping[i]."""
        y = 0
        while x:
            low = x & -x
            y |= 1 << self.mapping[low.bit_length() - 1]
            x ^= low
        return y

    def apply_many(self, xs: np.ndarray) -> np.ndarray:
        ys = np.zeros_like(xs)
        one = np.uint64(1)
        for i, d in enumerate(self.mapping):
            ys |= ((xs >> np.uint64(i)) & one) << np.uint64(d)
        return ys

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.mapping)
        for i, d in enumerate(self.mapping):
            inv[d] = i
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """Permutation applying ``other`` first, then ``self``."""
        if len(other) != len(self):
            raise ValueError("size mismatch")
        return Permutation(tuple(self.mapping[d] for d in other.mapping))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(rng.permutation(n))


class BooleanFunction:
    """Base query interface; subclasses fill in ``_eval``."""

    kind = "abstract"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one variable")
        self.n = int(n)

    def __call__(self, x: int) -> int:
        if not 0 <= x < (1 << self.n):
            raise ValueError(f"point {x} outside {{0,1}}^{self.n}")
        return self._eval(x)

    def _eval(self, x: int) -> int:
        raise NotImplementedError

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        """Evaluate a batch of masks; one query is counted per element."""
        return np.fromiter((self._eval(int(v)) for v in xs), dtype=np.uint8, count=len(xs))

    def permuted(self, pi: Permutation) -> "BooleanFunction":
        """Lazy g with g(x) = f(pi x); no table is materialized."""
        if len(pi) != self.n:
            raise ValueError("permutation size mismatch")
        return Permuted(self, pi)

    def truth_table(self) -> np.ndarray:
        if self.n > MAX_DENSE_N:
            raise ValueError(f"truth table needs n <= {MAX_DENSE_N}")
        return self.eval_many(np.arange(1 << self.n, dtype=np.uint64))


class TruthTable(BooleanFunction):
    kind = "truth_table"

    def __init__(self, n: int, table):
        super().__init__(n)
        if n > MAX_DENSE_N:
            raise ValueError(f"dense tables are capped at n <= {MAX_DENSE_N}")
        t = np.asarray(table, dtype=np.uint8)
        if t.shape != (1 << n,):
            raise ValueError(f"table must have 2^{n} entries")
        if t.max(initial=0) > 1:
            raise ValueError("table entries must be bits")
        self.table = t
        self.table.flags.writeable = False

    def _eval(self, x: int) -> int:
        return int(self.table[x])

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        return self.table[np.asarray(xs, dtype=np.int64)]

    def truth_table(self) -> np.ndarray:
        return self.table


class KLinear(BooleanFunction):
    """Parity of a fixed index set."""

    kind = "k_linear"

    def __init__(self, n: int, indices: Iterable[int]):
        super().__init__(n)
        idx = tuple(sorted(int(i) for i in indices))
        if len(set(idx)) != len(idx) or any(not 0 <= i < n for i in idx):
            raise ValueError("indices must be distinct and in range(n)")
        self.indices = idx
        self.mask = mask_from_indices(idx)

    def _eval(self, x: int) -> int:
        return (x & self.mask).bit_count() & 1

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        if self.n <= 64:
            return (popcount_u64(np.asarray(xs, dtype=np.uint64) & np.uint64(self.mask)) & np.uint64(1)).astype(np.uint8)
        return super().eval_many(xs)

    def permuted(self, pi: Permutation) -> "BooleanFunction":
        inv = pi.inverse().mapping
        return KLinear(self.n, (inv[i] for i in self.indices))


class SymmetricProfile(BooleanFunction):
    """Output depends only on the Hamming weight: f(x) = profile[|x|]."""

    kind = "symmetric_profile"

    def __init__(self, n: int, profile):
        super().__init__(n)
        p = np.asarray(profile, dtype=np.uint8)
        if p.shape != (n + 1,):
            raise ValueError("profile needs n + 1 entries")
        if p.max(initial=0) > 1:
            raise ValueError("profile entries must be bits")
        self.profile = p
        self.profile.flags.writeable = False

    def _eval(self, x: int) -> int:
        return int(self.profile[x.bit_count()])

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        if self.n <= 64:
            return self.profile[popcount_u64(np.asarray(xs, dtype=np.uint64)).astype(np.int64)]
        return super().eval_many(xs)

    def permuted(self, pi: Permutation) -> "BooleanFunction":
        # weight is permutation-invariant
        if len(pi) != self.n:
            raise ValueError("permutation size mismatch")
        return self


class PartiallySymmetricCore(BooleanFunction):
    """Function symmetric outside k distinguished variables.

    ``asym`` lists the k asymmetric positions in core-coordinate order and
    ``core[x, w]`` gives the output for asymmetric values x (a k-bit mask)
    and Hamming weight w of the remaining n - k variables.
    """

    kind = "psym_core"

    def __init__(self, n: int, k: int, asym: Iterable[int], core):
        super().__init__(n)
        asym = tuple(int(a) for a in asym)
        if not 0 <= k < n or len(asym) != k:
            raise ValueError("need 0 <= k < n and k asymmetric positions")
        if len(set(asym)) != k or any(not 0 <= a < n for a in asym):
            raise ValueError("asym positions must be distinct and in range(n)")
        c = np.asarray(core, dtype=np.uint8)
        if c.shape != (1 << k, n - k + 1):
            raise ValueError(f"core must have shape (2^{k}, {n - k + 1})")
        if c.max(initial=0) > 1:
            raise ValueError("core entries must be bits")
        self.k = k
        self.asym = asym
        self.core = c
        self.core.flags.writeable = False
        self.asym_mask = mask_from_indices(asym)
        self.sym_mask = ((1 << n) - 1) ^ self.asym_mask

    def core_eval(self, x: int, w: int) -> int:
        """Value of the core at asymmetric values ``x`` and symmetric weight ``w``."""
        if not 0 <= x < (1 << self.k):
            raise ValueError("core point outside {0,1}^k")
        if not 0 <= w <= self.n - self.k:
            raise ValueError(f"weight {w} outside 0..{self.n - self.k}")
        return int(self.core[x, w])

    def _eval(self, x: int) -> int:
        xc = 0
        for c, a in enumerate(self.asym):
            xc |= ((x >> a) & 1) << c
        return int(self.core[xc, (x & self.sym_mask).bit_count()])

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        if self.n > 64:
            return super().eval_many(xs)
        xs = np.asarray(xs, dtype=np.uint64)
        xc = np.zeros(len(xs), dtype=np.uint64)
        for c, a in enumerate(self.asym):
            xc |= ((xs >> np.uint64(a)) & np.uint64(1)) << np.uint64(c)
        w = popcount_u64(xs & np.uint64(self.sym_mask))
        return self.core[xc.astype(np.int64), w.astype(np.int64)]

    def permuted(self, pi: Permutation) -> "BooleanFunction":
        # g(x) = f(pi x) reads asymmetric value c at pi^{-1}(asym[c])
        inv = pi.inverse().mapping
        return PartiallySymmetricCore(self.n, self.k, (inv[a] for a in self.asym), self.core)


class Permuted(BooleanFunction):
    """Lazy wrapper: g(x) = inner(pi x)."""

    kind = "permuted"

    def __init__(self, inner: BooleanFunction, pi: Permutation):
        super().__init__(inner.n)
        if len(pi) != inner.n:
            raise ValueError("permutation size mismatch")
        self.inner = inner
        self.pi = pi

    def _eval(self, x: int) -> int:
        return self.inner(self.pi.apply(x))

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        if self.n <= 64:
            return self.inner.eval_many(self.pi.apply_many(np.asarray(xs, dtype=np.uint64)))
        return super().eval_many(xs)

    def permuted(self, pi: Permutation) -> "BooleanFunction":
        return Permuted(self.inner, self.pi.compose(pi))


class CountingFunction(BooleanFunction):
    """Wrapper that counts every evaluation of the inner function."""

    kind = "counting"

    def __init__(self, inner: BooleanFunction):
        super().__init__(inner.n)
        self.inner = inner
        self.count = 0

    def _eval(self, x: int) -> int:
        self.count += 1
        return self.inner(x)

    def eval_many(self, xs: np.ndarray) -> np.ndarray:
        self.count += len(xs)
        return self.inner.eval_many(xs)

    def reset(self) -> None:
        self.count = 0


def counting_oracle(f: BooleanFunction) -> CountingFunction:
    """Wrap ``f`` so every query is counted (count starts at 0)."""
    return CountingFunction(f)


def read_count(f: BooleanFunction) -> int:
    if not isinstance(f, CountingFunction):
        raise TypeError("read_count needs a counting wrapper")
    return f.count


def apply_permutation(f: BooleanFunction, pi: Permutation) -> BooleanFunction:
    """Return g with g(x) = f(pi x)."""
    return f.permuted(pi)


def random_function(n: int, rng: np.random.Generator) -> TruthTable:
    """Uniformly random dense function (n <= 25)."""
    if n > MAX_DENSE_N:
        raise ValueError(f"random dense tables need n <= {MAX_DENSE_N}")
    return TruthTable(n, rng.integers(0, 2, size=1 << n, dtype=np.uint8))


def random_core_spec(n: int, k: int, rng: np.random.Generator) -> PartiallySymmetricCore:
    """Uniformly random (n-k)-symmetric function in core form."""
    asym = tuple(int(a) for a in rng.choice(n, size=k, replace=False))
    core = rng.integers(0, 2, size=(1 << k, n - k + 1), dtype=np.uint8)
    return PartiallySymmetricCore(n, k, asym, core)


def random_point(n: int, rng: np.random.Generator) -> int:
    return random_mask(n, rng)


def function_to_json(f: BooleanFunction) -> dict:
    """JSON-serializable spec; truth tables and cores are hex, little-endian."""
    if isinstance(f, TruthTable):
        return {"kind": "truth_table", "n": f.n, "table_hex": bits_to_hex(f.table)}
    if isinstance(f, KLinear):
        return {"kind": "k_linear", "n": f.n, "indices": list(f.indices)}
    if isinstance(f, SymmetricProfile):
        return {"kind": "symmetric_profile", "n": f.n, "profile": [int(b) for b in f.profile]}
    if isinstance(f, PartiallySymmetricCore):
        return {
            "kind": "psym_core",
            "n": f.n,
            "k": f.k,
            "asym": list(f.asym),
            "core_hex": bits_to_hex(f.core.reshape(-1)),
        }
    raise ValueError(f"kind {f.kind!r} has no file form")


def function_from_json(obj: dict) -> BooleanFunction:
    kind = obj.get("kind")
    n = int(obj["n"])
    if kind == "truth_table":
        return TruthTable(n, hex_to_bits(obj["table_hex"], 1 << n))
    if kind == "k_linear":
        return KLinear(n, obj["indices"])
    if kind == "symmetric_profile":
        return SymmetricProfile(n, obj["profile"])
    if kind == "psym_core":
        k = int(obj["k"])
        bits = hex_to_bits(obj["core_hex"], (1 << k) * (n - k + 1))
        return PartiallySymmetricCore(n, k, obj["asym"], bits.reshape(1 << k, n - k + 1))
    raise ValueError(f"unknown function kind {kind!r}")


def save_function(f: BooleanFunction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(function_to_json(f), fh)
        fh.write("\n")


def load_function(path) -> BooleanFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return function_from_json(json.load(fh))


def variables_mask(f: BooleanFunction) -> int:
    return (1 << f.n) - 1


__all__ = [
    "MAX_DENSE_N",
    "BooleanFunction",
    "CountingFunction",
    "KLinear",
    "PartiallySymmetricCore",
    "Permutation",
    "Permuted",
    "SymmetricProfile",
    "TruthTable",
    "apply_permutation",
    "counting_oracle",
    "function_from_json",
    "function_to_json",
    "indices_of",
    "load_function",
    "mask_from_indices",
    "point_bits",
    "point_from_bits",
    "random_core_spec",
    "random_function",
    "random_point",
    "read_count",
    "save_function",
]
