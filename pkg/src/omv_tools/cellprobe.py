"""
Toy-scale cell-probe simulation and the worst-case preprocessing variant.

The cell-probe structure stores a list of all-zero rectangles of ``A``, chosen
greedily while some rectangle still covers at least ``n^{3/2} / sqrt(w)`` new
cells. A query reads the whole list (``ceil(2n/w)`` cells per rectangle), computes
the uncovered part ``Q`` of ``U x V`` for free, and either answers 1 (``Q`` is
too large to be all-zero) or probes every entry of ``Q``.

The worst-case variant preprocesses an amortized vMv structure until no query
can trigger another extraction, then answers step-5 queries with a guess.

Both searches are exhaustive over subsets of ``[n]`` and are limited to small ``n``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from blake3 import blake3

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation, InvariantViolation, ScaleError
from omv_tools.omv import recover_block_row
from omv_tools.vmv import VmvConfig, VmvParams, VmvState, answer_query, brute_force_extract, resolve_params, \
    validate_params, vmv_new

logger = logging.getLogger(__name__)

DEFAULT_N_MAX = 12
DEFAULT_WC_N_MAX = 8


def matrix_fingerprint(m: BitMatrix) -> str:
    hasher = blake3()
    hasher.update(f"{m.rows}x{m.cols}".encode("ascii"))
    hasher.update(np.ascontiguousarray(m.words).tobytes())
    return hasher.hexdigest()


def probe_threshold(n: int, w: int) -> float:
    """``n^{3/2} / sqrt(w)``."""
    return n ** 1.5 / math.sqrt(w)


def _membership(n: int) -> np.ndarray:
    """``(2^n, n)`` 0/1 matrix; row ``mask`` lists the members of ``mask``."""
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(np.int64)


def _mask_set(n: int, mask: int) -> IndexSet:
    return IndexSet.from_indices(n, [i for i in range(n) if (mask >> i) & 1])


@dataclass
class ProbeLedger:
    """
    Probe counter of the cell-probe model.

    :ivar w: Bits per memory cell.
    :ivar charge_list: Charge reading the rectangle list.
    :ivar charge_entries: Charge reading entries of ``A``.
    """

    w: int
    probes: int = 0
    charge_list: bool = True
    charge_entries: bool = True
    history: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.w < 1:
            raise ContractViolation(f"Word size must be at least 1, got {self.w}")

    def begin(self) -> None:
        self.probes = 0

    def charge(self, cells: int) -> None:
        if cells < 0:
            raise ContractViolation("Probe charges are non-negative")
        self.probes += cells

    def end(self) -> int:
        self.history.append(self.probes)
        return self.probes


@dataclass
class ZeroRectList:
    n: int
    w: int
    rects: list[tuple[IndexSet, IndexSet]]
    coverage: np.ndarray
    fingerprint: str
    increments: list[int] = field(default_factory=list)

    @property
    def threshold(self) -> float:
        return probe_threshold(self.n, self.w)

    @property
    def list_read_cost(self) -> int:
        """Cells read to scan the list, ``2n`` bits per rectangle."""
        return len(self.rects) * math.ceil(2 * self.n / self.w)

    @property
    def size_bound(self) -> float:
        """``n^{1/2} sqrt(w)``."""
        return math.sqrt(self.n) * math.sqrt(self.w)

    def audit(self, matrix: BitMatrix) -> list[str]:
        problems = []
        a = matrix.to_array()
        for k, (u, v) in enumerate(self.rects):
            if np.any(a[np.ix_(u.indices(), v.indices())]):
                problems.append(f"Rectangle {k} is not all-zero")
        for k, inc in enumerate(self.increments):
            if inc < self.threshold:
                problems.append(f"Rectangle {k} covered {inc} new cells, below {self.threshold:.2f}")
        if len(self.rects) > self.size_bound:
            problems.append(f"|L|={len(self.rects)} exceeds n^(1/2) sqrt(w)={self.size_bound:.2f}")
        return problems


def cp_preprocess(matrix: BitMatrix, w: int, n_max: int = DEFAULT_N_MAX) -> ZeroRectList:
    """
    Greedy list of all-zero rectangles.

    For each row set ``U`` only the widest all-zero column set (columns with no 1 in
    any row of ``U``) is considered. The rectangle covering the most new cells is
    added while that count reaches the threshold; ties go to the smallest ``U`` bitmask.

    :raises ScaleError: If ``n > n_max``.
    """
    if not matrix.is_square():
        raise ContractViolation(f"Expected a square matrix, got {matrix.shape}")
    n = matrix.rows
    if n > n_max:
        raise ScaleError(f"Exhaustive rectangle search limited to n <= {n_max}, got n={n}")
    if w < 1:
        raise ContractViolation(f"Word size must be at least 1, got {w}")
    a = matrix.to_array().astype(bool)
    full = (1 << n) - 1
    row_bits = [int(sum(1 << j for j in range(n) if a[i, j])) for i in range(n)]

    # OR of the rows of every subset U
    rows_or = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        rows_or[1 << i: 1 << (i + 1)] = rows_or[: 1 << i] | row_bits[i]
    zero_cols = full & ~rows_or
    zero_cols[0] = 0
    mem = _membership(n)
    col_mem = mem[zero_cols]  # members of V(U), per U

    covered = np.zeros((n, n), dtype=np.int64)
    rects: list[tuple[IndexSet, IndexSet]] = []
    increments: list[int] = []
    tau = probe_threshold(n, w)
    while True:
        new_cells = np.einsum("ui,uj,ij->u", mem, col_mem, 1 - covered)
        best = int(np.argmax(new_cells))
        gain = int(new_cells[best])
        if gain <= 0 or gain < tau:
            break
        u, v = _mask_set(n, best), _mask_set(n, int(zero_cols[best]))
        covered[np.ix_(u.indices(), v.indices())] = 1
        rects.append((u, v))
        increments.append(gain)
        logger.debug(f"Zero rectangle {len(rects)}: |U|={u.cardinality}, |V|={v.cardinality}, new cells={gain}")

    return ZeroRectList(n=n, w=w, rects=rects, coverage=covered.astype(bool),
                        fingerprint=matrix_fingerprint(matrix), increments=increments)


def _check_list(matrix: BitMatrix, rects: ZeroRectList) -> None:
    if matrix.shape != (rects.n, rects.n) or matrix_fingerprint(matrix) != rects.fingerprint:
        raise ContractViolation("Rectangle list was not built from this matrix")


def cp_query(matrix: BitMatrix, rects: ZeroRectList, u: IndexSet, v: IndexSet,
             ledger: ProbeLedger) -> tuple[int, int]:
    """
    Answer ``u^T A v`` and count the probes.

    :return: ``(answer, probes charged for this query)``.
    """
    _check_list(matrix, rects)
    if u.universe != rects.n or v.universe != rects.n:
        raise ContractViolation(f"Query sets over ({u.universe}, {v.universe}) for n={rects.n}")
    ledger.begin()
    if ledger.charge_list:
        ledger.charge(rects.list_read_cost)

    ri, ci = u.indices(), v.indices()
    uncovered = ~rects.coverage[np.ix_(ri, ci)]
    q_size = int(uncovered.sum())
    if q_size >= rects.threshold:
        # an all-zero U x V would have been listed
        return 1, ledger.end()

    if ledger.charge_entries:
        ledger.charge(q_size)
    qr, qc = np.nonzero(uncovered)
    answer = int(bool(matrix.get_many(ri[qr], ci[qc]).any())) if q_size else 0
    return answer, ledger.end()


@dataclass
class CpGrid:
    """Rectangle lists of the ``b x b`` blocks of an ``n x n`` matrix, ``b = ceil(sqrt(n))``."""

    n: int
    block: int
    w: int
    blocks: list[list[BitMatrix]]
    lists: list[list[ZeroRectList]]
    fingerprint: str

    @property
    def grid_side(self) -> int:
        return len(self.blocks)

    def total_rectangles(self) -> int:
        return sum(len(r.rects) for row in self.lists for r in row)


def build_cp_grid(matrix: BitMatrix, w: int, n_max: int = DEFAULT_N_MAX) -> CpGrid:
    if not matrix.is_square() or matrix.rows < 1:
        raise ContractViolation(f"Expected a non-empty square matrix, got {matrix.shape}")
    n = matrix.rows
    b = math.isqrt(n - 1) + 1
    if b > n_max:
        raise ScaleError(f"Block side {b} exceeds the exhaustive search limit {n_max}")
    g = -(-n // b)
    blocks = [[matrix.window(bi * b, bj * b, b, b) for bj in range(g)] for bi in range(g)]
    lists = [[cp_preprocess(blk, w, n_max) for blk in row] for row in blocks]
    return CpGrid(n=n, block=b, w=w, blocks=blocks, lists=lists, fingerprint=matrix_fingerprint(matrix))


def cp_omv_query(matrix: BitMatrix, grid: CpGrid, v: BitVector, ledger: ProbeLedger) -> tuple[BitVector, int]:
    """``A v`` through block vMv queries; the probes of all block queries are summed."""
    if matrix_fingerprint(matrix) != grid.fingerprint:
        raise ContractViolation("Block grid was not built from this matrix")
    if v.length != grid.n:
        raise ContractViolation(f"Vector length {v.length} does not match n={grid.n}")
    b, g = grid.block, grid.grid_side
    support = IndexSet(v)
    col_blocks = [(bj, support.restrict(bj * b, b)) for bj in range(g)]
    col_blocks = [(bj, cols) for bj, cols in col_blocks if cols.cardinality]
    inner = ProbeLedger(ledger.w, charge_list=ledger.charge_list, charge_entries=ledger.charge_entries)

    cols_of = dict(col_blocks)
    ledger.begin()
    out = np.zeros(grid.n, dtype=np.uint8)
    for bi in range(g):

        def query(bj: int, rows: IndexSet) -> int:
            answer, probes = cp_query(grid.blocks[bi][bj], grid.lists[bi][bj], rows, cols_of[bj], inner)
            ledger.charge(probes)
            return answer

        found, _ = recover_block_row(query, IndexSet.full(b), col_blocks)
        for r in found:
            out[bi * b + r] = 1
    return BitVector.from_bits(out), ledger.end()


def find_insertable_query(state: VmvState, n_max: int = DEFAULT_WC_N_MAX) -> Optional[tuple[IndexSet, IndexSet]]:
    """
    First query, in (U bitmask, V bitmask) order, that would enter step 5 and extract.

    A query qualifies when ``|L| < Z``, ``|U||V| >= n^2/Z``, no stored 1-entry lies in
    ``U x V``, the exact unseen count is at least ``2n^2/Z`` and the 1-entries of
    ``M[U x V]`` respect the sparsity bound.

    :raises ScaleError: If ``n > n_max``.
    """
    n = state.n
    if n > n_max:
        raise ScaleError(f"Exhaustive query scan limited to n <= {n_max}, got n={n}")
    z = state.params.Z
    if len(state.triples) >= z:
        return None
    mem = _membership(n)
    sizes = mem.sum(axis=1)
    m = state.matrix.to_array().astype(np.int64)
    d = state.unseen.to_array().astype(np.int64)
    stored = np.zeros((n, n), dtype=np.int64)
    for t in state.triples:
        if t.ones.shape[0]:
            stored[t.ones[:, 0], t.ones[:, 1]] = 1

    n2 = n * n
    ones = mem @ m @ mem.T
    unseen = mem @ d @ mem.T
    seen_ones = mem @ stored @ mem.T
    ok = (
        (sizes[:, None] * sizes[None, :] * z >= n2)
        & (seen_ones == 0)
        & (unseen * z >= 2 * n2)
        & (ones <= state.sparsity_bound)
    )
    hits = np.argwhere(ok)
    if not hits.size:
        return None
    um, vm = (int(x) for x in hits[0])
    return _mask_set(n, um), _mask_set(n, vm)


def wc_preprocess(matrix: BitMatrix, params: VmvParams, n_max: int = DEFAULT_WC_N_MAX) -> VmvState:
    """
    Extract rectangles until no query can trigger another extraction.

    :raises ScaleError: If ``n > n_max``.
    """
    if matrix.rows > n_max:
        raise ScaleError(f"Worst-case preprocessing limited to n <= {n_max}, got n={matrix.rows}")
    state = vmv_new(matrix, params)
    rounds = 0
    while (query := find_insertable_query(state, n_max)) is not None:
        _, extracted = brute_force_extract(state, *query)
        if not extracted:
            raise InvariantViolation("An insertable query did not extract")
        rounds += 1
    logger.debug(f"Worst-case preprocessing: n={state.n}, {rounds} extractions, |C|={state.card_c}")
    return state


def wc_query(state: VmvState, u: IndexSet, v: IndexSet, guess: int = 0) -> int:
    """Steps 1-4 and 6 of the amortized query; a query reaching step 5 gets ``guess``."""
    answer, _ = answer_query(state, u, v, allow_brute_force=False, guess=guess)
    return answer


class WorstCaseGrid:
    """
    Partitioned worst-case structure: square blocks of side ``block`` preprocessed independently.

    A query is the OR of the block answers.
    """

    def __init__(self, matrix: BitMatrix, block: int, config: VmvConfig | VmvParams | dict | None = None,
                 n_max: int = DEFAULT_WC_N_MAX):
        if not matrix.is_square() or matrix.rows < 1:
            raise ContractViolation(f"Expected a non-empty square matrix, got {matrix.shape}")
        if not 1 <= block <= n_max:
            raise ScaleError(f"Block side must lie in 1..{n_max}, got {block}")
        if isinstance(config, VmvParams):
            validate_params(block, config)
            params = config
        else:
            params = resolve_params(block, config)
        self.n = matrix.rows
        self.block = block
        g = -(-self.n // block)
        self.states = [
            [wc_preprocess(matrix.window(bi * block, bj * block, block, block), params, n_max) for bj in range(g)]
            for bi in range(g)
        ]

    def query(self, u: IndexSet, v: IndexSet, guess: int = 0) -> int:
        if u.universe != self.n or v.universe != self.n:
            raise ContractViolation(f"Query sets over ({u.universe}, {v.universe}) for n={self.n}")
        b = self.block
        col_parts = [(bj, v.restrict(bj * b, b)) for bj in range(len(self.states))]
        col_parts = [(bj, c) for bj, c in col_parts if c.cardinality]
        for bi, row in enumerate(self.states):
            rows = u.restrict(bi * b, b)
            if not rows.cardinality:
                continue
            for bj, cols in col_parts:
                if wc_query(row[bj], rows, cols, guess):
                    return 1
        return 0


def wc_omv_query(grid: WorstCaseGrid, v: BitVector, guess: int = 0) -> BitVector:
    """
    ``A v`` through the worst-case block queries.

    Rows are recovered as in the amortized product; a block query reaching step 5
    answers ``guess``, so the result is exact only when no such query occurs.
    """
    if v.length != grid.n:
        raise ContractViolation(f"Vector length {v.length} does not match n={grid.n}")
    b = grid.block
    support = IndexSet(v)
    col_blocks = [(bj, support.restrict(bj * b, b)) for bj in range(len(grid.states))]
    col_blocks = [(bj, cols) for bj, cols in col_blocks if cols.cardinality]
    cols_of = dict(col_blocks)
    out = np.zeros(grid.n, dtype=np.uint8)
    for bi, row in enumerate(grid.states):

        def query(bj: int, rows: IndexSet) -> int:
            return wc_query(row[bj], rows, cols_of[bj], guess)

        found, _ = recover_block_row(query, IndexSet.full(b), col_blocks)
        for r in found:
            # rows of a ragged last block past n are padding
            if bi * b + r < grid.n:
                out[bi * b + r] = 1
    return BitVector.from_bits(out)
