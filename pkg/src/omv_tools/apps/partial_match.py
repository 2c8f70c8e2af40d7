"""
Partial-match retrieval with wildcards.

Each stored string becomes a row of a Boolean matrix ``B`` whose position ``j``
holds the ``S``-code of its symbol (all zeros for the wildcard). A query is coded
the same way with ``T``-codes; it matches row ``i`` iff row ``i`` of ``B`` is
orthogonal to the coded query. ``B`` is split into ``ceil(n/m)`` row tiles of
``m`` rows and each row tile into ``dim`` square ``m x m`` tiles, every tile
served by its own OMV structure.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from omv_tools.apps.codes import SubsetCodes, subset_codes
from omv_tools.bitcore import BitMatrix, BitVector
from omv_tools.errors import InputError
from omv_tools.omv import OmvState, omv_new, omv_query
from omv_tools.vmv import VmvConfig

logger = logging.getLogger(__name__)

Pattern = Sequence[int | None]


@dataclass
class PartialMatchIndex:
    k: int
    n: int
    m: int
    codes: SubsetCodes
    matrix: BitMatrix
    tiles: list[list[OmvState]]

    @property
    def dim(self) -> int:
        return self.codes.dim

    @property
    def tile_shape(self) -> tuple[int, int]:
        """``(row tiles, column tiles)``."""
        return len(self.tiles), len(self.tiles[0]) if self.tiles else 0


def _check_pattern(p: Pattern, m: int, k: int, what: str) -> None:
    if len(p) != m:
        raise InputError(f"{what} has length {len(p)}, expected {m}")
    for sym in p:
        if sym is not None and not 0 <= sym < k:
            raise InputError(f"{what} uses symbol {sym} outside 0..{k - 1}")


def _encode(patterns: Sequence[Pattern], table: np.ndarray, m: int, dim: int) -> np.ndarray:
    """``(len(patterns), m * dim)`` 0/1 array, wildcards coded as zeros."""
    out = np.zeros((len(patterns), m * dim), dtype=np.uint8)
    for i, p in enumerate(patterns):
        for j, sym in enumerate(p):
            if sym is not None:
                out[i, j * dim:(j + 1) * dim] = table[sym]
    return out


def encode_strings(strings: Sequence[Pattern], codes: SubsetCodes, m: int) -> BitMatrix:
    return BitMatrix.from_array(_encode(strings, codes.s_bits, m, codes.dim))


def encode_query(q: Pattern, codes: SubsetCodes, m: int) -> BitVector:
    return BitVector.from_bits(_encode([q], codes.t_bits, m, codes.dim)[0])


def pm_build(strings: Sequence[Pattern], k: int, config: VmvConfig | dict | None = None,
             max_workers: int = 1) -> PartialMatchIndex:
    """
    Index ``strings`` (symbols ``0..k-1``, ``None`` for the wildcard).

    :raises InputError: On ragged lengths, ``m > n``, or out-of-range symbols.
    """
    n = len(strings)
    if n == 0:
        raise InputError("Cannot index an empty corpus")
    m = len(strings[0])
    if m < 1 or m > n:
        raise InputError(f"String length m={m} must satisfy 1 <= m <= n={n}")
    for idx, s in enumerate(strings):
        _check_pattern(s, m, k, f"String {idx}")

    codes = subset_codes(k)
    b = encode_strings(strings, codes, m)
    row_tiles = -(-n // m)
    tiles: list[list[OmvState]] = []
    if codes.dim:
        for r in range(row_tiles):
            tiles.append([omv_new(b.window(r * m, c * m, m, m), config, max_workers=max_workers)
                          for c in range(codes.dim)])
    logger.debug(f"Partial-match index: n={n}, m={m}, k={k}, {row_tiles}x{codes.dim} tiles of {m}x{m}")
    return PartialMatchIndex(k=k, n=n, m=m, codes=codes, matrix=b, tiles=tiles)


def pm_query(index: PartialMatchIndex, q: Pattern) -> BitVector:
    """Bit ``i`` of the result is 1 iff ``q`` matches string ``i``."""
    _check_pattern(q, index.m, index.k, "Query")
    if not index.dim:
        return BitVector.ones(index.n)
    m = index.m
    coded = encode_query(q, index.codes, m).to_array()
    chunks = [BitVector.from_bits(coded[c * m:(c + 1) * m]) for c in range(index.dim)]
    parts = []
    for row in index.tiles:
        hit = np.zeros(m, dtype=np.uint8)
        for tile, chunk in zip(row, chunks):
            if chunk.any():
                hit |= omv_query(tile, chunk).to_array()
        parts.append(1 - hit)
    return BitVector.from_bits(np.concatenate(parts)[: index.n])
