from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oov.core import (
    BitVec,
    ContractError,
    CoordSet,
    OVInstance,
    binom,
    binom_leq,
    colex_rank,
    colex_unrank,
    compressor,
    is_orthogonal,
    is_zero_on,
    iter_weight_masks,
    lowest_bits,
    rank_sparse_query,
    rank_subset,
    restrict,
    set_positions,
    sparse_rank,
    unrank_subset,
)


def bv(s: str) -> BitVec:
    return BitVec.from_str(s)


def cs(d: int, *members: int) -> CoordSet:
    return CoordSet.of(d, members)


# --- value types -----------------------------------------------------------


def test_text_form_puts_coordinate_zero_first():
    v = bv("1010")
    assert v.support() == [0, 2]
    assert v.bits == 0b0101
    assert str(v) == "1010"


def test_bitvec_rejects_stray_bits():
    with pytest.raises(ContractError):
        BitVec(3, 0b1000)


def test_instance_requires_rows():
    with pytest.raises(ContractError):
        OVInstance(4, ())
    X = OVInstance.from_strings(["0011", "1100"])
    assert X.n == 2 and X.dim == 4 and str(X[1]) == "1100"


def test_instance_rejects_mixed_dimensions():
    with pytest.raises(ContractError):
        OVInstance.from_vectors([bv("01"), bv("011")])


# --- worked examples ------------------------------------------------------


@pytest.mark.parametrize(
    "x,q,expected",
    [("1100", "0011", True), ("0000", "1111", True), ("1010", "0010", False)],
)
def test_is_orthogonal_examples(x, q, expected):
    assert is_orthogonal(bv(x), bv(q)) is expected


def test_is_orthogonal_dimension_mismatch():
    with pytest.raises(ContractError):
        is_orthogonal(bv("10"), bv("100"))


def test_restrict_examples():
    assert str(restrict(bv("1010"), cs(4, 0, 2))) == "11"
    empty = restrict(bv("1010"), cs(4))
    assert empty.dim == 0 and str(empty) == ""
    assert str(restrict(bv("0110"), cs(4, 1, 3))) == "10"


def test_is_zero_on_examples():
    assert is_zero_on(bv("1010"), cs(4, 1, 3))
    assert not is_zero_on(bv("1010"), cs(4, 0))
    assert is_zero_on(bv("0000"), cs(4, 0, 1, 2, 3))


def test_rank_examples():
    assert rank_subset(cs(4, 0, 1), 2) == 0
    assert unrank_subset(5, 4, 2) == cs(4, 2, 3)
    assert rank_subset(cs(3, 0, 1, 2), 3) == 0


def test_rank_subset_wrong_size():
    with pytest.raises(ContractError):
        rank_subset(cs(4, 0), 2)
    with pytest.raises(ContractError):
        unrank_subset(6, 4, 2)


def test_sparse_rank_examples():
    assert rank_sparse_query(BitVec.zeros(4), 2) == 0
    assert rank_sparse_query(BitVec.from_indices(4, [0]), 2) == 1
    assert rank_sparse_query(BitVec.from_indices(4, [2, 3]), 3) == 10
    with pytest.raises(ContractError):
        rank_sparse_query(BitVec.from_indices(4, [2, 3]), 2)


def test_binom_leq_examples():
    assert binom_leq(4, 0) == 1
    assert binom_leq(4, 2) == 11
    assert binom_leq(10, 10) == 1024
    assert binom_leq(10, 50) == 1024
    assert binom_leq(5, -1) == 0


def test_binom_leq_is_exact_for_large_arguments():
    assert binom_leq(200, 100) == sum(math.comb(200, w) for w in range(101))


# --- exhaustive ranking ---------------------------------------------------


def test_colex_rank_unrank_exhaustive_d16():
    seen: dict[int, set[int]] = {}
    for mask in range(1 << 16):
        t = mask.bit_count()
        r = colex_rank(mask)
        assert 0 <= r < binom(16, t)
        assert colex_unrank(r, t) == mask
        seen.setdefault(t, set()).add(r)
    for t, ranks in seen.items():
        assert len(ranks) == binom(16, t)


@pytest.mark.parametrize("d", range(0, 17))
def test_iter_weight_masks_is_colex_order(d):
    for t in range(d + 1):
        masks = list(iter_weight_masks(d, t))
        assert len(masks) == binom(d, t)
        assert [colex_rank(m) for m in masks] == list(range(len(masks)))


def test_colex_matches_tuple_enumeration():
    # colex order of t-subsets = sort by reversed tuple
    for d in range(1, 9):
        for t in range(d + 1):
            combos = sorted(itertools.combinations(range(d), t), key=lambda c: c[::-1])
            for r, c in enumerate(combos):
                assert rank_subset(CoordSet.of(d, c), t) == r


@pytest.mark.parametrize("d", range(1, 13))
def test_sparse_rank_bijection(d):
    for t in range(1, d + 1):
        ranks = sorted(sparse_rank(d, q) for q in range(1 << d) if q.bit_count() < t)
        assert ranks == list(range(binom_leq(d, t - 1)))


def test_rank_beyond_lookup_table_width():
    mask = (1 << 70) | (1 << 40) | (1 << 3)
    assert colex_unrank(colex_rank(mask), 3) == mask
    assert colex_rank(mask) == math.comb(3, 1) + math.comb(40, 2) + math.comb(70, 3)


# --- properties -----------------------------------------------------------

dims = st.integers(min_value=1, max_value=80)


@st.composite
def vec_pairs(draw):
    d = draw(dims)
    x = draw(st.integers(min_value=0, max_value=(1 << d) - 1))
    q = draw(st.integers(min_value=0, max_value=(1 << d) - 1))
    return BitVec(d, x), BitVec(d, q)


@given(vec_pairs())
def test_orthogonal_matches_inner_product(pair):
    x, q = pair
    assert is_orthogonal(x, q) == (sum(x[j] * q[j] for j in range(x.dim)) == 0)


@given(vec_pairs())
def test_restrict_matches_selection_and_composes(pair):
    v, c = pair
    C = CoordSet.from_mask(v.dim, c.bits)
    r = restrict(v, C)
    assert [r[k] for k in range(r.dim)] == [v[j] for j in sorted(C)]
    assert restrict(r, CoordSet.of(r.dim, range(r.dim))) == r


@given(st.integers(min_value=0, max_value=(1 << 90) - 1), st.integers(min_value=0, max_value=90))
def test_lowest_bits(mask, t):
    t = min(t, mask.bit_count())
    low = lowest_bits(mask, t)
    assert low.bit_count() == t
    assert set_positions(low) == set_positions(mask)[:t]


@given(st.integers(min_value=1, max_value=70), st.data())
def test_compressor_matches_reference(d, data):
    keep = data.draw(st.integers(min_value=0, max_value=(1 << d) - 1))
    x = data.draw(st.integers(min_value=0, max_value=(1 << d) - 1))
    expect = 0
    for k, j in enumerate(set_positions(keep)):
        expect |= ((x >> j) & 1) << k
    assert compressor(d, keep)(x) == expect


@given(st.integers(min_value=1, max_value=40), st.data())
def test_str_roundtrip(d, data):
    bits = data.draw(st.integers(min_value=0, max_value=(1 << d) - 1))
    v = BitVec(d, bits)
    assert BitVec.from_str(str(v)) == v
    assert CoordSet.from_mask(d, bits).complement().mask == ((1 << d) - 1) ^ bits
