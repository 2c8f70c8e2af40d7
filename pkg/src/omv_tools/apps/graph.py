"""
Graph subset queries answered with one online matrix-vector product each.

With ``A`` the adjacency matrix and ``v_S`` the indicator of ``S``:

- ``S`` is independent iff ``A v_S`` and ``v_S`` share no 1;
- ``S`` is a vertex cover iff its complement is independent;
- ``S`` is dominating iff ``(A v_S) OR v_S`` is all ones;
- vertex ``x`` lies in a triangle iff its neighbourhood is not independent.
"""
from __future__ import annotations

import logging
from enum import Enum
from typing import Iterable

import numpy as np

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation
from omv_tools.omv import OmvState, omv_new, omv_query
from omv_tools.vmv import VmvConfig

logger = logging.getLogger(__name__)


class SetQueryMode(str, Enum):
    INDEPENDENT = "independent"
    DOMINATING = "dominating"
    VERTEX_COVER = "vertex_cover"


class GraphHandle:
    """Adjacency matrix of an undirected graph and the OMV structure over it."""

    def __init__(self, adjacency: BitMatrix, simple: bool = True, config: VmvConfig | dict | None = None,
                 max_workers: int = 1):
        if not adjacency.is_square():
            raise ContractViolation(f"Adjacency matrix must be square, got {adjacency.shape}")
        a = adjacency.to_array()
        if not np.array_equal(a, a.T):
            raise ContractViolation("Adjacency matrix of an undirected graph must be symmetric")
        if simple and np.any(np.diagonal(a)):
            raise ContractViolation("Simple graphs have no self-loops")
        self.adjacency = adjacency
        self.simple = simple
        self.omv: OmvState = omv_new(adjacency, config, max_workers=max_workers)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], **kwargs) -> "GraphHandle":
        a = np.zeros((n, n), dtype=np.uint8)
        for x, y in edges:
            a[x, y] = a[y, x] = 1
        return cls(BitMatrix.from_array(a), simple=not np.any(np.diagonal(a)), **kwargs)

    @property
    def n(self) -> int:
        return self.adjacency.rows

    def product(self, v: BitVector) -> BitVector:
        return omv_query(self.omv, v)


def _independent(g: GraphHandle, members: BitVector) -> int:
    return int(not (g.product(members) & members).any())


def set_query(g: GraphHandle, s: IndexSet, mode: SetQueryMode | str) -> int:
    mode = SetQueryMode(mode)
    if s.universe != g.n:
        raise ContractViolation(f"Vertex set over {s.universe} vertices for a graph of {g.n}")
    if mode is SetQueryMode.INDEPENDENT:
        return _independent(g, s.mask)
    if mode is SetQueryMode.VERTEX_COVER:
        return _independent(g, s.complement().mask)
    dominated = g.product(s.mask) | s.mask
    return int(dominated.popcount() == g.n)


def triangle_query(g: GraphHandle, vertex: int) -> int:
    """1 iff ``vertex`` lies in a triangle."""
    if not 0 <= vertex < g.n:
        raise ContractViolation(f"Vertex {vertex} out of range for a graph of {g.n}")
    if not g.simple:
        raise ContractViolation("Triangle queries need a simple graph")
    neighbourhood = g.adjacency.row(vertex)
    return 1 - _independent(g, neighbourhood)
