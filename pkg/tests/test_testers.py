from fractions import Fraction
from math import ceil, log2

import numpy as np
import pytest

import psymtest as pt
from psymtest.testers import psym_partition_size, psym_query_bound

from helpers import random_junta, strong_core_spec


def test_random_partition_single_part_and_singletons():
    rng = np.random.default_rng(0)
    p = pt.random_partition(10, 1, rng)
    assert p.r == 1 and p.parts[0] == (1 << 10) - 1
    p = pt.random_partition(10, 10, rng)
    assert p.r == 10 and sorted(p.parts) == [1 << i for i in range(10)]
    p = pt.random_partition(10, 50, rng)
    assert p.r == 10


def test_random_partition_is_disjoint_cover():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(5, 200))
        r = int(rng.integers(1, 20))
        p = pt.random_partition(n, r, rng)
        union = 0
        total = 0
        for mask in p.parts:
            union |= mask
            total += mask.bit_count()
        assert union == (1 << n) - 1 and total == n


def test_random_partition_max_part_size_concentrates():
    n, r = 10_000, 100
    good = 0
    seeds = 1000
    for s in range(seeds):
        p = pt.random_partition(n, r, np.random.default_rng(s))
        if max(p.size(i) for i in range(r)) <= 2 * n / r:
            good += 1
    assert good / seeds >= 0.99


def test_junta_accepts_juntas_always():
    rng = np.random.default_rng(2)
    and2 = random_junta(64, 2, (0, 1), [0, 0, 0, 1])
    for s in range(50):
        assert pt.junta_test(and2, 2, 0.1, np.random.default_rng(s)).accepted
    const = pt.SymmetricProfile(32, np.zeros(33, dtype=np.uint8))
    for k in (0, 1, 3):
        assert pt.junta_test(const, k, 0.2, rng).accepted


def test_junta_rejects_far_parity():
    f = pt.KLinear(64, range(6))
    rejected = sum(
        not pt.junta_test(f, 2, 0.1, np.random.default_rng(s)).accepted for s in range(50)
    )
    assert rejected / 50 >= 0.6


def test_junta_found_parts_contain_relevant_variables():
    f = pt.KLinear(64, (7, 20, 33))
    for s in range(10):
        v = pt.junta_test(f, 3, 0.1, np.random.default_rng(s))
        assert v.accepted
        for part in v.found_parts:
            assert v.partition.parts[part] & ((1 << 7) | (1 << 20) | (1 << 33))


def test_junta_verdict_queries_match_counting_oracle():
    f = pt.counting_oracle(pt.KLinear(64, range(6)))
    v = pt.junta_test(f, 1, 0.1, np.random.default_rng(3))
    assert pt.read_count(f) == v.queries
    assert not v.accepted


def test_find_asymmetric_set_on_symmetric_function_returns_none():
    rng = np.random.default_rng(4)
    f = pt.SymmetricProfile(32, (np.arange(33) % 2).astype(np.uint8))
    partition = pt.random_partition(32, 9, rng)
    w = max(range(partition.r), key=partition.size)
    for _ in range(100):
        assert pt.find_asymmetric_set(f, partition, [], w, rng) is None


def test_find_asymmetric_set_pins_single_asymmetric_variable():
    # f(x) = x_11 and parity(|rest|): one asymmetric variable at 11
    n = 32
    core = np.array([[0] * n, [w & 1 for w in range(n)]], dtype=np.uint8)
    f = pt.PartiallySymmetricCore(n, 1, (11,), core)
    assert pt.find_core(pt.PartiallySymmetricCore(10, 1, (3,), core[:, :10])) == (
        0, 1, 2, 4, 5, 6, 7, 8, 9,
    )
    rng = np.random.default_rng(5)
    hits = 0
    for _ in range(20_000):
        partition = pt.random_partition(n, 9, rng)
        candidates = [
            i
            for i in range(partition.r)
            if not (partition.parts[i] >> 11) & 1 and 2 * partition.r * partition.size(i) >= n
        ]
        if not candidates:
            continue
        w = candidates[0]
        part = pt.find_asymmetric_set(f, partition, [], w, rng)
        if part is None:
            continue
        hits += 1
        assert (partition.parts[part] >> 11) & 1
        if hits == 500:
            break
    assert hits == 500


def test_find_asymmetric_set_query_budget_per_invocation():
    n = 48
    f = strong_core_spec(n)
    rng = np.random.default_rng(6)
    for _ in range(50):
        partition = pt.random_partition(n, 7, rng)
        w = max(range(partition.r), key=partition.size)
        wrapped = pt.counting_oracle(f)
        pt.find_asymmetric_set(wrapped, partition, [], w, rng)
        t = partition.r + ceil(4 * n / partition.size(w))
        assert pt.read_count(wrapped) <= 2 + ceil(log2(t))


def test_find_asymmetric_set_rejects_bad_arguments():
    rng = np.random.default_rng(7)
    f = strong_core_spec(16)
    partition = pt.random_partition(16, 4, rng)
    with pytest.raises(ValueError):
        pt.find_asymmetric_set(f, partition, [0], 0, rng)
    tiny = pt.Partition(16, [1, (1 << 16) - 2])
    with pytest.raises(ValueError):
        pt.find_asymmetric_set(f, tiny, [], 0, rng)


def test_weight_preserved_along_chain():
    from psymtest.testers import _weight_preserving_chain

    rng = np.random.default_rng(8)
    n = 24
    for _ in range(50):
        partition = pt.random_partition(n, 5, rng)
        w = max(range(partition.r), key=partition.size)
        x = int(rng.integers(0, 1 << n))
        jbar_positions = np.array([i for i in range(n)], dtype=np.int64)
        from psymtest._bits import rearrange_bits

        y = rearrange_bits(x, (1 << n) - 1, jbar_positions, rng)
        points, owners = _weight_preserving_chain(x, y, partition, w, [], rng)
        assert points[0] == x and points[-1] == y
        assert all(p.bit_count() == x.bit_count() for p in points)
        assert all(o != w for o in owners)


def test_psym_accepts_symmetric_profile():
    f = pt.SymmetricProfile(64, (np.arange(65) % 3 == 0).astype(np.uint8))
    accepted = sum(
        pt.partially_symmetric_test(f, 2, 0.1, np.random.default_rng(s)).accepted
        for s in range(200)
    )
    assert accepted / 200 >= 0.9


def test_psym_accepts_two_asymmetric_core():
    f = strong_core_spec(64)
    accepted = 0
    for s in range(100):
        v = pt.partially_symmetric_test(f, 2, 0.1, np.random.default_rng(s))
        accepted += v.accepted
        if v.accepted and len(v.found_parts) == 2:
            for part in v.found_parts:
                assert v.partition.parts[part] & ((1 << 5) | (1 << 11))
    assert accepted / 100 >= 0.6


def test_psym_rejects_random_function():
    rng = np.random.default_rng(9)
    f = pt.random_function(12, rng)
    assert pt.dist_to_t_symmetric(f, 10) >= 0.05
    rejected = sum(
        not pt.partially_symmetric_test(f, 2, 0.05, np.random.default_rng(s)).accepted
        for s in range(50)
    )
    assert rejected / 50 >= 0.6


def test_psym_found_parts_distinct_and_bounded():
    rng = np.random.default_rng(10)
    f = pt.random_function(12, rng)
    for s in range(20):
        v = pt.partially_symmetric_test(f, 2, 0.05, np.random.default_rng(s))
        assert len(set(v.found_parts)) == len(v.found_parts) <= 3
        assert v.workspace not in v.found_parts


def test_psym_queries_match_counting_oracle_and_bound():
    f = pt.counting_oracle(strong_core_spec(64))
    cfg = pt.TesterConfig()
    v = pt.partially_symmetric_test(f, 2, 0.1, np.random.default_rng(11), cfg=cfg)
    assert pt.read_count(f) == v.queries
    rounds = ceil(cfg.c_iters * 2 / 0.1)
    bound = psym_query_bound(rounds, v.partition.r, 64, v.partition.size(v.workspace))
    assert v.queries <= bound


def test_psym_workspace_failure_reason():
    # 40 vars over 35 parts: some workspaces come out empty
    f = pt.SymmetricProfile(40, np.zeros(41, dtype=np.uint8))
    cfg = pt.TesterConfig(c_parts=3.0, c_iters=24.0)
    seen = False
    for s in range(60):
        v = pt.partially_symmetric_test(f, 3, 0.9, np.random.default_rng(s), cfg=cfg)
        if not v.accepted:
            assert v.failure_reason == "workspace"
            assert v.queries == 0
            seen = True
    assert seen


def test_far_function_keeps_high_symmetric_influence_over_random_partitions():
    # at n = 16 and a far function, unions of k parts of a nontrivial random
    # partition should almost always leave high symmetric influence behind
    from psymtest.influence import symmetric_distance

    rng = np.random.default_rng(13)
    n, k = 16, 1
    f = pt.random_function(n, rng)
    farness = min(
        symmetric_distance(f, [i for i in range(n) if i != v]) for v in range(n)
    )
    assert farness > Fraction(2, 5)
    eps = float(farness) * 0.95
    r = psym_partition_size(n, k, eps, pt.TesterConfig())
    assert r < n
    good = 0
    trials = 20
    for s in range(trials):
        partition = pt.random_partition(n, r, np.random.default_rng(s))
        ok = True
        for p in range(partition.r):
            members = [i for i in range(n) if not (partition.parts[p] >> i) & 1]
            if pt.symmetric_influence_exact(f, members) < eps / 9:
                ok = False
                break
        good += ok
    assert good / trials >= 0.8


def test_psym_sizing_guard():
    f = pt.random_function(8, np.random.default_rng(12))
    with pytest.raises(ValueError):
        pt.partially_symmetric_test(f, 4, 0.1, np.random.default_rng(0))


def test_psym_partition_size_is_odd():
    cfg = pt.TesterConfig()
    for k in range(7):
        for eps in (0.05, 0.1, 0.3, 0.9):
            assert psym_partition_size(256, k, eps, cfg) % 2 == 1


def test_tester_config_validation():
    with pytest.raises(ValueError):
        pt.TesterConfig(c_parts=0.5)
