import numpy as np
import pytest
from hypothesis import given, strategies as st

from qstrings.strings_core import (
    BitString,
    MatchInstance,
    compare_classical,
    lcp_classical,
    naive_match_all,
)

bits = st.lists(st.integers(0, 1), max_size=24).map(BitString.from_bits)


def test_lcp_examples():
    assert lcp_classical(BitString.from_text("011"), BitString.from_text("010")) == 2
    assert lcp_classical(BitString.from_text("101"), BitString.from_text("101")) == 3
    assert lcp_classical(BitString.from_bits([]), BitString.from_text("1")) == 0


def test_compare_examples():
    assert compare_classical(BitString.from_text("10"), BitString.from_text("11")) == -1
    # a proper prefix precedes its extension
    assert compare_classical(BitString.from_text("01"), BitString.from_text("011")) == -1
    assert compare_classical(BitString.from_text("1"), BitString.from_text("1")) == 0


def test_naive_match_examples():
    inst = MatchInstance(BitString.from_text("010101"), BitString.from_text("010"))
    assert naive_match_all(inst) == {1, 3}
    inst = MatchInstance(BitString.from_text("0000"), BitString.from_text("11"))
    assert naive_match_all(inst) == set()
    inst = MatchInstance(BitString.from_text("101"), BitString.from_text("101"))
    assert naive_match_all(inst) == {1}


@given(bits, bits)
def test_compare_antisymmetric(u, v):
    assert compare_classical(u, v) == -compare_classical(v, u)


@given(bits)
def test_compare_reflexive(u):
    assert compare_classical(u, u) == 0


@given(bits, bits)
def test_lcp_is_longest_common_prefix(u, v):
    t = lcp_classical(u, v)
    assert t <= min(len(u), len(v))
    assert u.bits[:t] == v.bits[:t]
    if t < min(len(u), len(v)):
        assert u.bits[t] != v.bits[t]


def _match_all_by_bit_loop(inst: MatchInstance) -> set[int]:
    # independent oracle: explicit window-by-window bit comparison
    found = set()
    for d in range(1, inst.num_windows + 1):
        if all(inst.text.bit(d + i) == inst.pattern.bit(1 + i) for i in range(inst.m)):
            found.add(d)
    return found


def test_naive_match_against_bit_loop():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        n = int(rng.integers(1, 65))
        m = int(rng.integers(1, n + 1))
        inst = MatchInstance(
            BitString.from_bits(rng.integers(0, 2, n)),
            BitString.from_bits(rng.integers(0, 2, m)),
        )
        assert naive_match_all(inst) == _match_all_by_bit_loop(inst)


def test_substring_indexing():
    u = BitString.from_text("10110")
    assert str(u.substring(2, 4)) == "011"
    assert str(u.substring(1, 5)) == "10110"
    assert len(u.substring(3, 2)) == 0  # empty view
    assert u.bit(1) == 1 and u.bit(5) == 0
    with pytest.raises(IndexError):
        u.substring(0, 2)
    with pytest.raises(IndexError):
        u.substring(2, 6)
    with pytest.raises(IndexError):
        u.bit(6)


def test_ascii_expansion_msb_first():
    assert str(BitString.from_ascii("A")) == "01000001"
    assert str(BitString.from_ascii("ab")) == "0110000101100010"


def test_bad_inputs_rejected():
    with pytest.raises(ValueError):
        BitString.from_text("012")
    with pytest.raises(ValueError):
        BitString.from_bits([0, 2])
    with pytest.raises(ValueError):
        MatchInstance(BitString.from_text("01"), BitString.from_bits([]))
    with pytest.raises(ValueError):
        MatchInstance(BitString.from_text("0"), BitString.from_text("01"))


def test_instance_window_and_counts():
    inst = MatchInstance(BitString.from_text("010101"), BitString.from_text("010"))
    assert (inst.n, inst.m, inst.num_windows) == (6, 3, 4)
    assert str(inst.window(3)) == "010"
