import numpy as np
import pytest

from omv_tools.bitcore import BitMatrix, IndexSet
from omv_tools.errors import ContractViolation
from omv_tools.ovlist import (
    OvInstance,
    SideVectors,
    WordParallelDetector,
    build_side_vectors,
    list_orthogonal_pairs,
    orthogonality,
)
from omv_tools.vmv import ExtractedTriple


def _triple(n, rows, cols):
    empty = np.zeros((0, 2), dtype=np.int64)
    return ExtractedTriple(IndexSet.from_indices(n, rows), IndexSet.from_indices(n, cols), empty)


def test_empty_list_lists_every_pair():
    n = 5
    u = IndexSet.from_indices(n, [0, 3])
    v = IndexSet.from_indices(n, [1, 2, 4])
    inst = OvInstance(SideVectors.empty(n), u, v, 2, BitMatrix.ones(n))
    pairs = list_orthogonal_pairs(inst)
    assert sorted(pairs) == [(i, j) for i in (0, 3) for j in (1, 2, 4)]
    assert len(set(pairs)) == len(pairs)


def test_side_vectors_single_rectangle():
    side = build_side_vectors([_triple(2, [0], [1])], 2)
    assert side.dimension == 1
    assert side.row_vector(0).to_string() == "1"
    assert side.row_vector(1).to_string() == "0"
    assert side.col_vector(1).to_string() == "1"
    assert side.col_vector(0).to_string() == "0"


def test_extend_matches_rebuild():
    n = 6
    triples = [_triple(n, [0, 1], [2, 3]), _triple(n, [4], [0, 5])]
    side = SideVectors.empty(n)
    for t in triples:
        side.extend(t.rows, t.cols)
    expected = build_side_vectors(triples, n)
    assert side.u == expected.u and side.v == expected.v


def test_group_pair_detection():
    detector = WordParallelDetector()
    ones = np.array([[0b11]], dtype=np.uint64)
    assert detector.detect_group_pair(ones, ones) == 0
    assert detector.detect_group_pair(np.array([[0b01]], dtype=np.uint64), np.array([[0b10]], dtype=np.uint64)) == 1


def test_orthogonality_of_zero_dimensional_vectors():
    out = orthogonality(np.zeros((3, 0), dtype=np.uint64), np.zeros((2, 0), dtype=np.uint64))
    assert out.shape == (3, 2) and out.all()


@pytest.mark.parametrize("group_size", [1, 2, 3, 8])
def test_listing_equals_set_difference(rng, group_size):
    n = 24
    triples = []
    covered = np.zeros((n, n), dtype=bool)
    for _ in range(5):
        rows = np.flatnonzero(rng.random(n) < 0.4)
        cols = np.flatnonzero(rng.random(n) < 0.4)
        triples.append(_triple(n, rows, cols))
        covered[np.ix_(rows, cols)] = True
    side = build_side_vectors(triples, n)
    unseen = BitMatrix.from_array(~covered)

    for _ in range(10):
        u = IndexSet.from_indices(n, np.flatnonzero(rng.random(n) < 0.5))
        v = IndexSet.from_indices(n, np.flatnonzero(rng.random(n) < 0.5))
        inst = OvInstance(side, u, v, group_size, unseen)
        pairs = list_orthogonal_pairs(inst)
        expected = {(int(i), int(j)) for i in u for j in v if not covered[i, j]}
        assert len(pairs) == len(expected)
        assert set(pairs) == expected


def test_instance_rejects_bad_group_size():
    with pytest.raises(ContractViolation):
        OvInstance(SideVectors.empty(3), IndexSet.full(3), IndexSet.full(3), 0, BitMatrix.ones(3))
