"""
Orthogonal-vectors listing over the side vectors of the extracted rectangles.

Every extracted triple ``k`` contributes one coordinate to the side vectors:
``u_i[k] = 1`` iff ``i`` is in ``U_k`` and ``v_j[k] = 1`` iff ``j`` is in ``V_k``.
A pair ``(i, j)`` is covered by no rectangle exactly when ``<u_i, v_j> = 0``.

Listing partitions the restricted rows and columns into groups of ``s`` indices,
asks a :class:`GroupPairDetector` which group pairs contain an orthogonal pair,
and reads the unseen-pair indicator ``D`` inside each positive block.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence, TYPE_CHECKING

import numpy as np

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet, _unpack
from omv_tools.errors import ContractViolation

if TYPE_CHECKING:
    from omv_tools.vmv import ExtractedTriple

logger = logging.getLogger(__name__)

# Upper bound on the number of uint64 words materialised by one detection chunk.
_CHUNK_WORDS = 1 << 22


class SideVectors:
    """
    The ``d``-bit side vectors of every row and column index.

    Stored as two ``n x d`` bit matrices: row ``i`` of :attr:`u` is ``u_i`` and
    row ``j`` of :attr:`v` is ``v_j``.
    """

    __slots__ = ("u", "v")

    def __init__(self, u: BitMatrix, v: BitMatrix):
        if u.shape != v.shape:
            raise ContractViolation(f"Side vector matrices differ in shape: {u.shape} vs {v.shape}")
        self.u = u
        self.v = v

    @classmethod
    def empty(cls, n: int) -> "SideVectors":
        return cls(BitMatrix(n, 0), BitMatrix(n, 0))

    @property
    def n(self) -> int:
        return self.u.rows

    @property
    def dimension(self) -> int:
        return self.u.cols

    def extend(self, rows: IndexSet, cols: IndexSet) -> None:
        """Add the coordinate of a newly extracted rectangle ``rows x cols``."""
        self.u = self.u.append_column(rows.mask)
        self.v = self.v.append_column(cols.mask)

    def row_vector(self, i: int) -> BitVector:
        return self.u.row(i)

    def col_vector(self, j: int) -> BitVector:
        return self.v.row(j)


def build_side_vectors(triples: Sequence["ExtractedTriple"], n: int) -> SideVectors:
    """Side vectors for the list ``triples``, one coordinate per triple in list order."""
    u = np.zeros((n, len(triples)), dtype=np.uint8)
    v = np.zeros((n, len(triples)), dtype=np.uint8)
    for k, t in enumerate(triples):
        if t.rows.universe != n or t.cols.universe != n:
            raise ContractViolation(f"Triple {k} is not over a universe of size {n}")
        u[:, k] = t.rows.mask.to_array()
        v[:, k] = t.cols.mask.to_array()
    return SideVectors(BitMatrix.from_array(u), BitMatrix.from_array(v))


class GroupPairDetector(ABC):
    """
    Decides, for groups of side vectors, whether some pair across the groups is orthogonal.

    Implementations receive the packed payload words of the vectors, one row per vector.
    """

    @abstractmethod
    def detect_group_pair(self, ga: np.ndarray, gb: np.ndarray) -> int:
        """1 iff some row of ``ga`` and some row of ``gb`` share no set bit."""

    def detect_grid(self, a: np.ndarray, b: np.ndarray, s: int) -> np.ndarray:
        """
        Detection for every group pair.

        :param a: Packed vectors of the row side, grouped consecutively by ``s``.
        :param b: Packed vectors of the column side, grouped the same way.
        :return: Boolean array of shape ``(ceil(len(a)/s), ceil(len(b)/s))``.
        """
        ga = -(-a.shape[0] // s)
        gb = -(-b.shape[0] // s)
        out = np.zeros((ga, gb), dtype=bool)
        for x in range(ga):
            for y in range(gb):
                out[x, y] = bool(self.detect_group_pair(a[x * s:(x + 1) * s], b[y * s:(y + 1) * s]))
        return out


class WordParallelDetector(GroupPairDetector):
    """Brute-force detection, one AND per payload word for every cross-group pair."""

    def detect_group_pair(self, ga: np.ndarray, gb: np.ndarray) -> int:
        ga = np.asarray(ga, dtype=np.uint64)
        gb = np.asarray(gb, dtype=np.uint64)
        if not ga.shape[0] or not gb.shape[0]:
            return 0
        shares = np.any(ga[:, None, :] & gb[None, :, :], axis=2)
        return int(not shares.all())

    def detect_grid(self, a: np.ndarray, b: np.ndarray, s: int) -> np.ndarray:
        orth = orthogonality(a, b)
        return _group_any(orth, s)


def orthogonality(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``out[x, y]`` is True iff packed vectors ``a[x]`` and ``b[y]`` are orthogonal."""
    a = np.asarray(a, dtype=np.uint64)
    b = np.asarray(b, dtype=np.uint64)
    out = np.empty((a.shape[0], b.shape[0]), dtype=bool)
    if a.shape[1] == 0:
        # zero-dimensional vectors are orthogonal to everything
        out[:] = True
        return out
    step = max(1, _CHUNK_WORDS // max(1, b.shape[0] * a.shape[1]))
    for start in range(0, a.shape[0], step):
        chunk = a[start:start + step]
        out[start:start + step] = ~np.any(chunk[:, None, :] & b[None, :, :], axis=2)
    return out


def _group_any(flags: np.ndarray, s: int) -> np.ndarray:
    """OR-reduce a boolean matrix over ``s x s`` blocks (ragged tail blocks included)."""
    rows, cols = flags.shape
    ga, gb = -(-rows // s), -(-cols // s)
    padded = np.zeros((ga * s, gb * s), dtype=bool)
    padded[:rows, :cols] = flags
    return padded.reshape(ga, s, gb, s).any(axis=(1, 3))


@dataclass
class OvInstance:
    """
    One listing problem: side vectors restricted to ``rows x cols``, groups of ``group_size``.

    ``unseen`` is the indicator ``D``; ``D(i, j) = 1`` iff ``<u_i, v_j> = 0``.
    """

    side: SideVectors
    rows: IndexSet
    cols: IndexSet
    group_size: int
    unseen: BitMatrix

    def __post_init__(self):
        if self.group_size < 1:
            raise ContractViolation(f"Group size must be at least 1, got {self.group_size}")
        n = self.side.n
        if self.rows.universe != n or self.cols.universe != n or self.unseen.shape != (n, n):
            raise ContractViolation("Listing instance dimensions are inconsistent")


def orthogonal_pair_arrays(inst: OvInstance,
                           detector: GroupPairDetector | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Array form of :func:`list_orthogonal_pairs`.

    :return: ``(row_indices, col_indices)`` in (group pair, row, column) order.
    """
    detector = detector or WordParallelDetector()
    r_idx = inst.rows.indices()
    c_idx = inst.cols.indices()
    if not r_idx.size or not c_idx.size:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    s = inst.group_size
    positive = detector.detect_grid(inst.side.u.words[r_idx], inst.side.v.words[c_idx], s)
    if not positive.any():
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty

    ga, gb = positive.shape
    d_block = np.zeros((ga * s, gb * s), dtype=bool)
    d_block[: r_idx.size, : c_idx.size] = _unpack(inst.unseen.words[r_idx], inst.unseen.cols)[:, c_idx] != 0
    blocks = d_block.reshape(ga, s, gb, s).transpose(0, 2, 1, 3)
    blocks &= positive[:, :, None, None]
    g_r, g_c, in_r, in_c = np.nonzero(blocks)
    local_r = g_r * s + in_r
    local_c = g_c * s + in_c
    return r_idx[local_r], c_idx[local_c]


def list_orthogonal_pairs(inst: OvInstance, detector: GroupPairDetector | None = None) -> list[tuple[int, int]]:
    """
    All ``(i, j)`` in ``rows x cols`` whose side vectors are orthogonal, without duplicates.

    Group pairs are visited in lexicographic order; inside a positive pair the block of
    ``D`` is read row by row.
    """
    rows, cols = orthogonal_pair_arrays(inst, detector)
    return [(int(i), int(j)) for i, j in zip(rows, cols)]
