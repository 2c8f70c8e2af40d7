import pytest

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ConfigurationError, ContractViolation
from omv_tools.omv import audit_grid, omv_new, omv_query, recover_block_row
from omv_tools.oracle import naive_matvec
from omv_tools.vmv import VmvConfig, VmvParams
from omv_tools.workloads import WorkloadKind, vector_workload


def test_grid_shape_square_side():
    state = omv_new(BitMatrix.zeros(16))
    assert state.block == 4
    assert state.grid_side == 4
    assert all(s.matrix.shape == (4, 4) for row in state.grid for s in row)


def test_grid_shape_ragged_side():
    m = BitMatrix.ones(17)
    state = omv_new(m)
    assert state.block == 5
    assert state.grid_side == 4
    corner = state.grid[3][3].matrix
    # rows and columns 17..19 of the last block are padding
    assert corner.to_strings()[0] == "11000"
    assert corner.to_strings()[2] == "00000"
    assert omv_query(state, BitVector.ones(17)) == BitVector.ones(17)


def test_identity_returns_vector(random_vector):
    state = omv_new(BitMatrix.identity(20))
    for _ in range(20):
        v = random_vector(20)
        assert omv_query(state, v) == v


def test_all_ones_with_zero_vector():
    state = omv_new(BitMatrix.ones(9))
    assert omv_query(state, BitVector.zeros(9)) == BitVector.zeros(9)
    assert state.stats.vmv_queries == 0


def test_single_entry_matrix():
    assert omv_query(omv_new(BitMatrix.ones(1)), BitVector.ones(1)) == BitVector.ones(1)
    assert omv_query(omv_new(BitMatrix.zeros(1)), BitVector.ones(1)) == BitVector.zeros(1)


@pytest.mark.parametrize("n", [16, 64])
@pytest.mark.parametrize("kind", list(WorkloadKind))
def test_matches_oracle(random_matrix, rng, n, kind):
    for density in (0.5, 0.05):
        m = random_matrix(n, density)
        state = omv_new(m, VmvConfig(seed=11))
        for v in vector_workload(kind, n, 40, rng):
            assert omv_query(state, v) == naive_matvec(m, v)
        assert audit_grid(state) == []
        assert all(len(s.triples) <= state.params.Z for row in state.grid for s in row)
        assert state.stats.bound_violations == 0


def test_parallel_block_rows_match_serial(random_matrix, rng):
    m = random_matrix(49, 0.1)
    serial = omv_new(m)
    parallel = omv_new(m, max_workers=4)
    for v in vector_workload(WorkloadKind.UNIFORM, 49, 20, rng, density=0.2):
        expected = naive_matvec(m, v)
        assert omv_query(serial, v) == expected
        assert omv_query(parallel, v) == expected


def test_accepts_explicit_params_and_dict():
    state = omv_new(BitMatrix.zeros(16), VmvParams(Y=8, Z=2))
    assert state.params.Z == 2
    assert omv_new(BitMatrix.zeros(16), {"seed": 4}).params.seed == 4
    with pytest.raises(ConfigurationError):
        omv_new(BitMatrix.zeros(16), VmvParams(Y=8, Z=3))


def test_length_and_shape_errors():
    with pytest.raises(ContractViolation):
        omv_new(BitMatrix.zeros(3, 4))
    state = omv_new(BitMatrix.zeros(4))
    with pytest.raises(ContractViolation):
        omv_query(state, BitVector.zeros(5))


def test_recover_block_row_binary_search():
    ones = {(0, 2), (0, 5), (1, 6)}

    def query(j, rows):
        return int(any((j, r) in ones for r in rows))

    rows = IndexSet.full(8)
    blocks = [(0, IndexSet.full(8)), (1, IndexSet.full(8))]
    found, issued = recover_block_row(query, rows, blocks)
    assert found == [2, 5, 6]
    assert issued <= 2 + 3 * (3 + 1)


def test_recover_block_row_no_hits():
    found, issued = recover_block_row(lambda j, rows: 0, IndexSet.full(4), [(0, IndexSet.full(4))])
    assert found == [] and issued == 1
