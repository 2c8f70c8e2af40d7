import numpy as np
import pytest

from omv_tools.apps import (
    CnfHandle,
    GraphHandle,
    SetQueryMode,
    cnf_eval,
    pm_build,
    pm_query,
    set_query,
    subset_codes,
    triangle_query,
)
from omv_tools.apps.cnf import literal_node, true_literals
from omv_tools.apps.codes import code_dimension
from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation, InputError
from omv_tools.oracle import naive_cnf_eval, naive_partial_match, naive_set_query, naive_triangle


# --------------------------------------------------------------------------- #
# Subset codes
# --------------------------------------------------------------------------- #

def test_codes_for_two_symbols():
    codes = subset_codes(2)
    assert codes.dim == 2
    assert codes.s_sets == (frozenset({0}), frozenset({1}))
    assert codes.t_sets == (frozenset({1}), frozenset({0}))


def test_codes_for_four_symbols_use_pairs():
    codes = subset_codes(4)
    assert codes.dim == 4
    assert all(len(s) == 2 for s in codes.s_sets)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 8, 26, 33, 64])
def test_code_intersection_property(k):
    codes = subset_codes(k)
    assert codes.dim == code_dimension(k)
    assert len(set(codes.s_sets)) == k
    for a in range(k):
        for b in range(k):
            meets = bool(codes.s_sets[a] & codes.t_sets[b])
            assert meets == (a != b)
            assert meets == bool(np.any(codes.s_bits[a] & codes.t_bits[b]))


def test_codes_reject_empty_alphabet():
    with pytest.raises(InputError):
        subset_codes(0)


# --------------------------------------------------------------------------- #
# Graph queries
# --------------------------------------------------------------------------- #

def _random_graph(n, p, rng):
    upper = np.triu(rng.random((n, n)) < p, k=1)
    return BitMatrix.from_array(upper | upper.T)


def test_complete_graph_set_queries():
    g = GraphHandle.from_edges(4, [(x, y) for x in range(4) for y in range(x + 1, 4)])
    s = IndexSet.from_indices(4, [0, 1])
    assert set_query(g, s, SetQueryMode.INDEPENDENT) == 0
    assert set_query(g, s, SetQueryMode.VERTEX_COVER) == 0
    assert set_query(g, s, SetQueryMode.DOMINATING) == 1
    assert set_query(g, IndexSet.from_indices(4, [0, 1, 2]), "vertex_cover") == 1


def test_set_queries_match_edge_scan(rng):
    n = 48
    adj = _random_graph(n, 0.1, rng)
    g = GraphHandle(adj)
    for _ in range(60):
        members = np.flatnonzero(rng.random(n) < rng.random())
        s = IndexSet.from_indices(n, members)
        for mode in SetQueryMode:
            assert set_query(g, s, mode) == naive_set_query(adj, members, mode.value)
        assert set_query(g, s, SetQueryMode.VERTEX_COVER) == set_query(g, s.complement(), SetQueryMode.INDEPENDENT)


def test_triangle_small_graphs():
    k3 = GraphHandle.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert [triangle_query(k3, v) for v in range(3)] == [1, 1, 1]
    star = GraphHandle.from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
    assert triangle_query(star, 0) == 0


def test_triangle_matches_scan(rng):
    n = 40
    adj = _random_graph(n, 0.15, rng)
    g = GraphHandle(adj)
    for v in range(n):
        assert triangle_query(g, v) == naive_triangle(adj, v)


def test_graph_contract_errors():
    with pytest.raises(ContractViolation):
        GraphHandle(BitMatrix.from_strings(["01", "00"]))
    with pytest.raises(ContractViolation):
        GraphHandle(BitMatrix.from_strings(["10", "00"]))
    loops = GraphHandle(BitMatrix.from_strings(["10", "00"]), simple=False)
    with pytest.raises(ContractViolation):
        triangle_query(loops, 0)
    with pytest.raises(ContractViolation):
        set_query(loops, IndexSet.full(3), SetQueryMode.INDEPENDENT)


# --------------------------------------------------------------------------- #
# 2-CNF evaluation
# --------------------------------------------------------------------------- #

def test_literal_nodes():
    assert literal_node(1) == 0
    assert literal_node(-1) == 1
    assert literal_node(3) == 4
    with pytest.raises(InputError):
        literal_node(0)
    assert true_literals(2, BitVector.from_string("10")).indices().tolist() == [0, 3]


def test_empty_formula_is_true():
    f = CnfHandle(3, [])
    for bits in ("000", "101", "111"):
        assert cnf_eval(f, BitVector.from_string(bits)) == 1


def test_forced_clause():
    f = CnfHandle(1, [(1, 1)])
    assert cnf_eval(f, BitVector.from_string("0")) == 0
    assert cnf_eval(f, BitVector.from_string("1")) == 1


def test_cnf_matches_clause_loop(rng):
    n_vars = 32
    clauses = []
    for _ in range(120):
        a, b = rng.integers(1, n_vars + 1, size=2)
        clauses.append((int(a) * int(rng.choice([-1, 1])), int(b) * int(rng.choice([-1, 1]))))
    f = CnfHandle(n_vars, clauses)
    for _ in range(80):
        assignment = BitVector.from_bits(rng.random(n_vars) < 0.5)
        expected = naive_cnf_eval(clauses, assignment)
        assert cnf_eval(f, assignment) == expected


def test_cnf_errors():
    with pytest.raises(InputError):
        CnfHandle(0, [])
    with pytest.raises(InputError):
        CnfHandle(2, [(1, 3)])
    with pytest.raises(ContractViolation):
        cnf_eval(CnfHandle(2, []), BitVector.zeros(3))


# --------------------------------------------------------------------------- #
# Partial match
# --------------------------------------------------------------------------- #

def test_all_wildcard_string_has_zero_row():
    index = pm_build([[None, None], [0, 1]], 2)
    assert index.matrix.row(0).popcount() == 0
    assert index.matrix.row(1).to_string() == "1001"


def test_tile_shape():
    strings = [[s % 4, (s + 1) % 4, None, 3] for s in range(8)]
    index = pm_build(strings, 4)
    assert index.tile_shape == (2, 4)
    assert all(t.n == 4 for row in index.tiles for t in row)


def test_star_query_and_self_match(rng):
    strings = [list(map(int, rng.integers(0, 4, size=6))) for _ in range(12)]
    index = pm_build(strings, 4)
    assert pm_query(index, [None] * 6) == BitVector.ones(12)
    for i, s in enumerate(strings):
        assert pm_query(index, s).get(i) == 1


def test_exhaustive_small_alphabet():
    # every string over {a, b, *} of length 2 as both corpus and query
    symbols = [0, 1, None]
    strings = [[x, y] for x in symbols for y in symbols]
    index = pm_build(strings, 2)
    for q in strings:
        assert pm_query(index, q) == naive_partial_match(strings, q)


@pytest.mark.parametrize("k", [1, 2, 4, 26, 40])
def test_random_corpora_match_position_loop(rng, k):
    n, m = 64, 8
    corpus = [[None if rng.random() < 0.2 else int(rng.integers(0, k)) for _ in range(m)] for _ in range(n)]
    index = pm_build(corpus, k)
    for _ in range(40):
        q = [None if rng.random() < 0.5 else int(rng.integers(0, k)) for _ in range(m)]
        assert pm_query(index, q) == naive_partial_match(corpus, q)


def test_partial_match_input_errors():
    with pytest.raises(InputError):
        pm_build([], 2)
    with pytest.raises(InputError):
        pm_build([[0, 1], [0]], 2)
    with pytest.raises(InputError):
        pm_build([[0, 2], [0, 1]], 2)
    with pytest.raises(InputError):
        pm_build([[0, 1, 0]], 2)
    index = pm_build([[0, 1], [1, 1]], 2)
    with pytest.raises(InputError):
        pm_query(index, [0])
    with pytest.raises(InputError):
        pm_query(index, [0, 5])
