import numpy as np
import pytest

from omv_tools.bitcore import (
    BitMatrix,
    BitVector,
    IndexSet,
    count_ones,
    inner_product_bool,
    ones_in_rectangle,
    submatrix_has_one,
    zero_rectangle,
)
from omv_tools.errors import ContractViolation


def test_inner_product_disjoint_supports():
    assert inner_product_bool(BitVector.from_string("1010"), BitVector.from_string("0101")) == 0


def test_inner_product_shared_position():
    assert inner_product_bool(BitVector.from_string("1010"), BitVector.from_string("0010")) == 1


def test_inner_product_length_mismatch():
    with pytest.raises(ContractViolation):
        inner_product_bool(BitVector.zeros(3), BitVector.zeros(4))


@pytest.mark.parametrize("n", [1, 63, 64, 65, 130])
def test_ones_keeps_tail_bits_clear(n):
    v = BitVector.ones(n)
    assert v.popcount() == n
    assert (~v).popcount() == 0
    assert v.to_string() == "1" * n


def test_word_boundary_positions():
    v = BitVector.from_indices(130, [0, 63, 64, 127, 128, 129])
    assert v.support().tolist() == [0, 63, 64, 127, 128, 129]
    w = BitVector.from_indices(130, [64])
    assert inner_product_bool(v, w) == 1
    assert inner_product_bool(v, BitVector.from_indices(130, [65])) == 0


def test_string_round_trip_and_set():
    v = BitVector.from_string("0010")
    v.set(0)
    v.set(2, 0)
    assert v.to_string() == "1000"
    with pytest.raises(IndexError):
        v.get(4)


def test_invalid_vector_text():
    with pytest.raises(ContractViolation):
        BitVector.from_string("01x")


def test_identity_submatrix_single_diagonal_entry():
    eye = BitMatrix.identity(4)
    s = IndexSet.from_indices(4, [0])
    assert submatrix_has_one(eye, s, s) == 1
    assert submatrix_has_one(eye, s, IndexSet.from_indices(4, [1, 2, 3])) == 0


def test_submatrix_empty_sets():
    ones = BitMatrix.ones(5)
    assert submatrix_has_one(ones, IndexSet.empty(5), IndexSet.full(5)) == 0
    assert count_ones(ones, IndexSet.full(5), IndexSet.empty(5)) == 0


def test_zero_rectangle_counts_and_is_idempotent():
    d = BitMatrix.ones(4)
    full = IndexSet.full(4)
    assert zero_rectangle(d, full, full) == 16
    assert zero_rectangle(d, full, full) == 0
    assert d.popcount() == 0


def test_zero_rectangle_updates_row_counts():
    d = BitMatrix.ones(6)
    row_card = d.row_popcounts().astype(np.int64)
    u = IndexSet.from_indices(6, [1, 4])
    v = IndexSet.from_indices(6, [0, 2, 5])
    assert zero_rectangle(d, u, v, row_card) == 6
    assert row_card.tolist() == [6, 3, 6, 6, 3, 6]
    assert d.get(1, 1) == 1 and d.get(1, 2) == 0


def test_rectangle_shape_mismatch():
    with pytest.raises(ContractViolation):
        submatrix_has_one(BitMatrix.zeros(4), IndexSet.full(3), IndexSet.full(4))


def test_submatrix_matches_dense_scan(random_matrix, rng):
    m = random_matrix(130, 0.02)
    dense = m.to_array()
    for _ in range(50):
        rows = np.flatnonzero(rng.random(130) < 0.3)
        cols = np.flatnonzero(rng.random(130) < 0.3)
        u, v = IndexSet.from_indices(130, rows), IndexSet.from_indices(130, cols)
        expected = dense[np.ix_(rows, cols)]
        assert submatrix_has_one(m, u, v) == int(expected.any())
        assert count_ones(m, u, v) == int(expected.sum())
        assert len(ones_in_rectangle(m, u, v)) == int(expected.sum())


def test_window_pads_with_zeros():
    m = BitMatrix.ones(5)
    w = m.window(3, 3, 4, 4)
    assert w.shape == (4, 4)
    assert w.to_strings() == ["1100", "1100", "0000", "0000"]


def test_append_column():
    m = BitMatrix.zeros(3, 0)
    m = m.append_column(BitVector.from_string("101"))
    m = m.append_column(BitVector.from_string("011"))
    assert m.to_strings() == ["10", "01", "11"]


def test_index_set_operations():
    a = IndexSet.from_indices(8, [0, 2, 4, 6])
    assert a.complement().indices().tolist() == [1, 3, 5, 7]
    assert 2 in a and 3 not in a and 99 not in a
    low, high = a.halves()
    assert low.indices().tolist() == [0, 2] and high.indices().tolist() == [4, 6]
    assert a.restrict(4, 4).indices().tolist() == [0, 2]
    assert a.without(0).cardinality == 3
    assert a.cardinality == 4


def test_index_out_of_range():
    with pytest.raises(ContractViolation):
        IndexSet.from_indices(4, [4])
