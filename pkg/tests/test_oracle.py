import pytest

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation
from omv_tools.oracle import (
    naive_cnf_eval,
    naive_inner_product,
    naive_matvec,
    naive_partial_match,
    naive_set_query,
    naive_triangle,
    naive_vmv,
    word_parallel_matvec,
)


def test_identity_returns_vector():
    v = BitVector.from_string("1011001")
    assert naive_matvec(BitMatrix.identity(7), v) == v


def test_all_ones_matrix():
    ones = BitMatrix.ones(5)
    assert naive_matvec(ones, BitVector.from_string("00100")) == BitVector.ones(5)
    assert naive_matvec(ones, BitVector.zeros(5)) == BitVector.zeros(5)


def test_word_parallel_agrees_with_loop(random_matrix, random_vector):
    for n in (1, 17, 64, 70):
        m = random_matrix(n, 0.1)
        for _ in range(10):
            v = random_vector(n, 0.1)
            assert word_parallel_matvec(m, v) == naive_matvec(m, v)


def test_matvec_length_mismatch():
    with pytest.raises(ContractViolation):
        naive_matvec(BitMatrix.identity(3), BitVector.zeros(4))


def test_vmv_on_identity():
    eye = BitMatrix.identity(2)
    first = IndexSet.from_indices(2, [0])
    second = IndexSet.from_indices(2, [1])
    assert naive_vmv(eye, first, first) == 1
    assert naive_vmv(eye, first, second) == 0


def test_inner_product_reference():
    assert naive_inner_product(BitVector.from_string("1010"), BitVector.from_string("0101")) == 0
    assert naive_inner_product(BitVector.from_string("1010"), BitVector.from_string("0010")) == 1


def test_partial_match_wildcards():
    strings = [[0, 1], [None, None], [1, 1]]
    assert naive_partial_match(strings, [0, None]).to_string() == "110"
    assert naive_partial_match(strings, [None, None]).to_string() == "111"


def test_set_queries_on_path():
    # path 0 - 1 - 2
    adj = BitMatrix.from_strings(["010", "101", "010"])
    assert naive_set_query(adj, [0, 2], "independent") == 1
    assert naive_set_query(adj, [0, 1], "independent") == 0
    assert naive_set_query(adj, [1], "vertex_cover") == 1
    assert naive_set_query(adj, [0], "vertex_cover") == 0
    assert naive_set_query(adj, [1], "dominating") == 1
    assert naive_set_query(adj, [0], "dominating") == 0
    with pytest.raises(ContractViolation):
        naive_set_query(adj, [0], "clique")


def test_triangle_reference():
    k3 = BitMatrix.from_strings(["011", "101", "110"])
    star = BitMatrix.from_strings(["0111", "1000", "1000", "1000"])
    assert naive_triangle(k3, 0) == 1
    assert naive_triangle(star, 0) == 0


def test_cnf_reference():
    assert naive_cnf_eval([], BitVector.from_string("0")) == 1
    assert naive_cnf_eval([(1, 1)], BitVector.from_string("0")) == 0
    assert naive_cnf_eval([(1, -2)], BitVector.from_string("01")) == 0
    assert naive_cnf_eval([(1, -2)], BitVector.from_string("00")) == 1
