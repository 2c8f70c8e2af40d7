"""
Online matrix-vector multiplication by reduction to vector-Matrix-vector queries.

The ``n x n`` matrix is cut into a grid of ``b x b`` blocks with ``b = ceil(sqrt(n))``
(ragged blocks are zero padded), each served by its own :class:`~omv_tools.vmv.VmvState`.
For a vector ``v`` and a block row ``I``, the output rows still unresolved are
kept in a set ``R``; for every block column ``J`` with ``v_J != 0``, while the
block answers 1 for ``(R, supp(v_J))``, one output row is located by binary
search over ``R`` and removed from it.
"""
from __future__ import annotations

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation, InvariantViolation
from omv_tools.vmv import VmvConfig, VmvParams, VmvState, VmvStats, audit, resolve_params, validate_params, vmv_new, \
    vmv_query

logger = logging.getLogger(__name__)

BlockQuery = Callable[[int, IndexSet], int]


@dataclass
class OmvStats:
    queries: int = 0
    vmv_queries: int = 0
    output_ones: int = 0
    vmv_per_query: list[int] = field(default_factory=list)
    bound_violations: int = 0

    def as_dict(self) -> dict:
        return {
            "queries": self.queries,
            "vmv_queries": self.vmv_queries,
            "output_ones": self.output_ones,
            "vmv_per_query_max": max(self.vmv_per_query, default=0),
            "bound_violations": self.bound_violations,
        }


@dataclass
class OmvState:
    n: int
    block: int
    grid: list[list[VmvState]]
    params: VmvParams
    stats: OmvStats = field(default_factory=OmvStats)
    max_workers: int = 1
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def grid_side(self) -> int:
        return len(self.grid)

    @property
    def extraction_possible(self) -> bool:
        """Step 5 needs ``B * Z > 2 * block**2`` with ``B <= block**2``, so blocks with ``Z <= 2`` never extract."""
        return self.params.Z > 2

    def accounting_bound(self, output_ones: int) -> int:
        """Upper bound on the vMv queries one product may issue."""
        g = self.grid_side
        per_hit = math.ceil(math.log2(self.block)) + 1 if self.block > 1 else 1
        return g * g + (output_ones + g) * per_hit * g

    def block_stats(self) -> VmvStats:
        total = VmvStats()
        for row in self.grid:
            for s in row:
                total.merge(s.stats)
        return total


def recover_block_row(query: BlockQuery, rows: IndexSet,
                      col_blocks: Sequence[tuple[int, IndexSet]]) -> tuple[list[int], int]:
    """
    Output rows of one block row.

    :param query: ``query(J, R)`` answers the vMv query of block column ``J`` restricted to rows ``R``;
        the column set is fixed by the caller.
    :param rows: Initially unresolved rows (local indices).
    :param col_blocks: Block columns to visit; blocks with an empty column set must be left out.
    :return: ``(rows with output 1, number of queries issued)``.
    """
    unresolved = rows
    found: list[int] = []
    issued = 0
    for j, _ in col_blocks:
        while unresolved.cardinality:
            issued += 1
            if not query(j, unresolved):
                break
            candidates = unresolved
            while candidates.cardinality > 1:
                low, high = candidates.halves()
                issued += 1
                candidates = low if query(j, low) else high
            r = int(candidates.indices()[0])
            found.append(r)
            unresolved = unresolved.without(r)
    return sorted(found), issued


def omv_new(matrix: BitMatrix, config: VmvConfig | VmvParams | dict | None = None, max_workers: int = 1) -> OmvState:
    """
    Build the block grid.

    Block parameters are resolved for the block side ``b``, not for ``n``.
    """
    if not matrix.is_square() or matrix.rows < 1:
        raise ContractViolation(f"Expected a non-empty square matrix, got shape {matrix.shape}")
    n = matrix.rows
    b = math.isqrt(n - 1) + 1
    g = -(-n // b)
    if isinstance(config, VmvParams):
        validate_params(b, config)
        params = config
    else:
        params = resolve_params(b, config)

    rngs = np.random.default_rng(params.seed).spawn(g * g)
    grid = [
        [vmv_new(matrix.window(bi * b, bj * b, b, b), params, rngs[bi * g + bj]) for bj in range(g)]
        for bi in range(g)
    ]
    logger.debug(f"Built OMV grid: n={n}, b={b}, {g}x{g} blocks, Y={params.Y}, Z={params.Z}")
    return OmvState(n=n, block=b, grid=grid, params=params, max_workers=max(1, max_workers))


def _block_row(state: OmvState, bi: int, col_blocks: Sequence[tuple[int, IndexSet]]) -> tuple[list[int], int]:
    def query(bj: int, rows: IndexSet) -> int:
        return vmv_query(state.grid[bi][bj], rows, cols_of[bj])

    cols_of = dict(col_blocks)
    return recover_block_row(query, IndexSet.full(state.block), col_blocks)


def omv_query(state: OmvState, v: BitVector) -> BitVector:
    """``A v`` over the Boolean semiring, exactly."""
    if v.length != state.n:
        raise ContractViolation(f"Vector length {v.length} does not match n={state.n}")
    b, g = state.block, state.grid_side
    support = IndexSet(v)
    col_blocks = [(bj, support.restrict(bj * b, b)) for bj in range(g)]
    col_blocks = [(bj, cols) for bj, cols in col_blocks if cols.cardinality]

    with state._lock:
        if state.max_workers > 1 and g > 1:
            with ThreadPoolExecutor(max_workers=state.max_workers) as pool:
                results = list(pool.map(lambda bi: _block_row(state, bi, col_blocks), range(g)))
        else:
            results = [_block_row(state, bi, col_blocks) for bi in range(g)]

        out = np.zeros(state.n, dtype=np.uint8)
        issued = 0
        for bi, (found, count) in enumerate(results):
            issued += count
            for r in found:
                global_row = bi * b + r
                if global_row >= state.n:
                    raise InvariantViolation(f"Padding row {global_row} produced an output 1")
                out[global_row] = 1

        ones = int(out.sum())
        state.stats.queries += 1
        state.stats.vmv_queries += issued
        state.stats.output_ones += ones
        state.stats.vmv_per_query.append(issued)
        if issued > state.accounting_bound(ones):
            state.stats.bound_violations += 1
            logger.warning(f"vMv query count {issued} above the accounting bound {state.accounting_bound(ones)}")
    return BitVector.from_bits(out)


def audit_grid(state: OmvState) -> list[str]:
    """Invariant violations of every block structure, prefixed by the block coordinates."""
    problems = []
    for bi, row in enumerate(state.grid):
        for bj, block in enumerate(row):
            problems.extend(f"block ({bi}, {bj}): {p}" for p in audit(block))
    if state.stats.bound_violations:
        problems.append(f"{state.stats.bound_violations} products exceeded the vMv accounting bound")
    return problems
