import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import psymtest as pt
from psymtest.boolfn import MAX_DENSE_N

from helpers import apply_perm_to_point


def test_klinear_eval():
    f = pt.KLinear(3, [0, 2])
    # x = 101 reading variables 0..2, i.e. mask 0b101
    assert f(0b101) == 0
    assert f(0b001) == 1
    assert f(0b111) == 0


def test_symmetric_profile_eval():
    f = pt.SymmetricProfile(2, [0, 1, 0])
    assert f(0b01) == 1
    assert f(0b10) == 1
    assert f(0b00) == 0
    assert f(0b11) == 0


def test_core_spec_eval_hand_expanded():
    # one asymmetric variable at position 1, core(x, w) = x xor (w mod 2)
    core = np.array([[w & 1 for w in range(4)], [1 - (w & 1) for w in range(4)]], dtype=np.uint8)
    f = pt.PartiallySymmetricCore(4, 1, (1,), core)
    # x = 0110: asymmetric bit is 1, weight outside is 1 -> 1 xor 1 = 0
    assert f(0b0110) == 0
    assert f.core_eval(1, 2) == 1
    # agree with a hand-expanded truth table
    for x in range(16):
        xa = (x >> 1) & 1
        w = (x & 0b1101).bit_count()
        assert f(x) == (xa ^ (w & 1))


def test_core_eval_matches_full_eval_on_consistent_points():
    rng = np.random.default_rng(0)
    spec = pt.random_core_spec(10, 2, rng)
    sym_positions = [i for i in range(10) if i not in spec.asym]
    for _ in range(100):
        xc = int(rng.integers(0, 4))
        w = int(rng.integers(0, 9))
        ones = rng.choice(sym_positions, size=w, replace=False)
        point = sum(1 << int(p) for p in ones)
        for c, a in enumerate(spec.asym):
            point |= ((xc >> c) & 1) << a
        assert spec(point) == spec.core_eval(xc, w)


def test_constant_core_is_constant():
    core = np.zeros((2, 6), dtype=np.uint8)
    f = pt.PartiallySymmetricCore(6, 1, (3,), core)
    assert all(f(x) == 0 for x in range(64))
    assert all(f.core_eval(x, w) == 0 for x in range(2) for w in range(6))


def test_core_eval_range_errors():
    spec = pt.random_core_spec(8, 2, np.random.default_rng(1))
    with pytest.raises(ValueError):
        spec.core_eval(0, 7)
    with pytest.raises(ValueError):
        spec.core_eval(4, 0)


def test_eval_rejects_out_of_range_points():
    f = pt.KLinear(4, [0])
    with pytest.raises(ValueError):
        f(16)
    with pytest.raises(ValueError):
        f(-1)


def test_apply_permutation_identity_and_dictator_swap():
    rng = np.random.default_rng(2)
    f = pt.random_function(5, rng)
    g = pt.apply_permutation(f, pt.Permutation.identity(5))
    assert all(g(x) == f(x) for x in range(32))

    dictator = pt.TruthTable(2, [0, 1, 0, 1])  # f(x) = x_0
    swapped = pt.apply_permutation(dictator, pt.Permutation([1, 0]))
    # x = 10 (mask 0b01) maps to 01 (mask 0b10): f there is 0
    assert swapped(0b01) == 0
    assert [swapped(x) for x in range(4)] == [0, 0, 1, 1]


def test_symmetric_function_is_permutation_invariant():
    rng = np.random.default_rng(3)
    f = pt.SymmetricProfile(7, rng.integers(0, 2, size=8, dtype=np.uint8))
    for _ in range(5):
        pi = pt.Permutation.random(7, rng)
        g = pt.apply_permutation(f, pi)
        assert all(g(x) == f(x) for x in range(128))


def test_permutation_matches_coordinate_relabeling_definition():
    rng = np.random.default_rng(4)
    f = pt.random_function(6, rng)
    pi = pt.Permutation.random(6, rng)
    g = pt.apply_permutation(f, pi)
    for x in range(64):
        assert g(x) == f(apply_perm_to_point(x, pi.mapping, 6))


def test_permutation_roundtrip_pointwise():
    rng = np.random.default_rng(5)
    f = pt.random_function(6, rng)
    for _ in range(10):
        pi = pt.Permutation.random(6, rng)
        h = pt.apply_permutation(pt.apply_permutation(f, pi), pi.inverse())
        assert all(h(x) == f(x) for x in range(64))


@given(st.integers(0, 2**12 - 1), st.permutations(list(range(12))))
def test_permutation_preserves_weight(x, mapping):
    pi = pt.Permutation(mapping)
    assert pi.apply(x).bit_count() == x.bit_count()


@given(st.permutations(list(range(8))), st.permutations(list(range(8))))
@settings(max_examples=50)
def test_permutation_compose_inverse(m1, m2):
    p1, p2 = pt.Permutation(m1), pt.Permutation(m2)
    x = 0b10110101
    assert p1.compose(p2).apply(x) == p1.apply(p2.apply(x))
    assert p1.compose(p1.inverse()).mapping == tuple(range(8))


def test_core_spec_invariant_under_symmetric_block_permutations():
    rng = np.random.default_rng(6)
    spec = pt.random_core_spec(8, 2, rng)
    sym = [i for i in range(8) if i not in spec.asym]
    for _ in range(5):
        mapping = list(range(8))
        shuffled = rng.permutation(sym)
        for src, dst in zip(sym, shuffled):
            mapping[src] = int(dst)
        pi = pt.Permutation(mapping)
        for x in range(256):
            assert spec(x) == spec(pi.apply(x))


def test_counting_oracle():
    f = pt.KLinear(6, [1, 2])
    g = pt.counting_oracle(f)
    assert pt.read_count(g) == 0
    for x in range(7):
        g(x)
    assert pt.read_count(g) == 7
    g.eval_many(np.arange(5, dtype=np.uint64))
    assert pt.read_count(g) == 12
    g.reset()
    assert pt.read_count(g) == 0
    with pytest.raises(TypeError):
        pt.read_count(f)


def test_counting_junta_cross_check():
    rng = np.random.default_rng(7)
    f = pt.counting_oracle(pt.KLinear(64, [3]))
    verdict = pt.junta_test(f, 1, 0.1, rng)
    assert pt.read_count(f) == verdict.queries


def test_random_function_determinism_and_bias():
    t1 = pt.random_function(12, np.random.default_rng(42)).table
    t2 = pt.random_function(12, np.random.default_rng(42)).table
    assert np.array_equal(t1, t2)
    assert abs(t1.mean() - 0.5) < 0.05
    with pytest.raises(ValueError):
        pt.random_function(MAX_DENSE_N + 1, np.random.default_rng(0))


def test_random_core_spec_is_symmetric_outside_asym():
    rng = np.random.default_rng(8)
    spec = pt.random_core_spec(10, 2, rng)
    sym = [i for i in range(10) if i not in spec.asym]
    assert len(sym) == 8
    assert pt.is_j_symmetric(spec, sym)


def test_json_roundtrip_all_kinds():
    rng = np.random.default_rng(9)
    fns = [
        pt.random_function(6, rng),
        pt.KLinear(40, [0, 7, 31]),
        pt.SymmetricProfile(20, rng.integers(0, 2, size=21, dtype=np.uint8)),
        pt.random_core_spec(30, 3, rng),
    ]
    for f in fns:
        g = pt.function_from_json(pt.function_to_json(f))
        assert g.n == f.n and g.kind == f.kind
        for _ in range(50):
            x = int(rng.integers(0, 1 << min(f.n, 63)))
            assert f(x) == g(x)


def test_json_hex_encoding_is_little_endian():
    f = pt.TruthTable(2, [0, 1, 0, 0])
    blob = pt.function_to_json(f)
    # bit j of byte j // 8 holds table[j]: table 0100 -> byte 0b0010
    assert blob["table_hex"] == "02"
    assert np.array_equal(pt.function_from_json(blob).table, f.table)


def test_save_load_roundtrip(tmp_path):
    f = pt.random_core_spec(16, 2, np.random.default_rng(10))
    path = tmp_path / "f.json"
    pt.save_function(f, path)
    g = pt.load_function(path)
    assert np.array_equal(g.truth_table(), f.truth_table())


def test_wrappers_have_no_file_form():
    f = pt.counting_oracle(pt.KLinear(4, [0]))
    with pytest.raises(ValueError):
        pt.function_to_json(f)


def test_dense_table_cap():
    with pytest.raises(ValueError):
        pt.TruthTable(MAX_DENSE_N + 1, np.zeros(2 ** (MAX_DENSE_N + 1), dtype=np.uint8))


def test_point_bits_roundtrip():
    assert pt.point_from_bits((1, 0, 1, 1)) == 0b1101
    assert pt.point_bits(0b1101, 4) == (1, 0, 1, 1)
