"""
Brute-force reference implementations.

These functions are the correctness oracles for the engines and the baselines
they are compared against. They deliberately avoid the engine code paths: the
naive versions work on unpacked ``numpy`` arrays with explicit loops, and the
word-parallel matvec only shares :func:`omv_tools.bitcore.inner_product_bool`.
"""
import logging
from typing import Sequence

import numpy as np

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet, inner_product_bool
from omv_tools.errors import ContractViolation

logger = logging.getLogger(__name__)


def naive_matvec(m: BitMatrix, v: BitVector) -> BitVector:
    """``output[i] = OR_j (m(i, j) AND v[j])`` by an index loop."""
    if v.length != m.cols:
        raise ContractViolation(f"Vector length {v.length} does not match {m.cols} columns")
    a = m.to_array()
    x = v.to_array()
    out = np.zeros(m.rows, dtype=np.uint8)
    for i in range(m.rows):
        for j in range(m.cols):
            if a[i, j] and x[j]:
                out[i] = 1
                break
    return BitVector.from_bits(out)


def word_parallel_matvec(m: BitMatrix, v: BitVector) -> BitVector:
    """The ``O(n^2 / w)`` baseline: one packed inner product per row."""
    if v.length != m.cols:
        raise ContractViolation(f"Vector length {v.length} does not match {m.cols} columns")
    return BitVector.from_bits([inner_product_bool(m.row(i), v) for i in range(m.rows)])


def naive_vmv(m: BitMatrix, u: IndexSet, v: IndexSet) -> int:
    """``u^T m v`` over the Boolean semiring, by a double loop over ``U x V``."""
    if u.universe != m.rows or v.universe != m.cols:
        raise ContractViolation(f"Index sets over ({u.universe}, {v.universe}) do not match shape {m.shape}")
    a = m.to_array()
    for i in u.indices():
        for j in v.indices():
            if a[i, j]:
                return 1
    return 0


def naive_inner_product(a: BitVector, b: BitVector) -> int:
    """Position-wise loop reference for :func:`omv_tools.bitcore.inner_product_bool`."""
    if a.length != b.length:
        raise ContractViolation(f"Length mismatch: {a.length} vs {b.length}")
    x, y = a.to_array(), b.to_array()
    return int(any(x[j] and y[j] for j in range(a.length)))


def naive_partial_match(strings: Sequence[Sequence[int | None]], q: Sequence[int | None]) -> BitVector:
    """Position loop: ``q`` matches ``x`` when they agree wherever neither holds the wildcard."""
    out = []
    for x in strings:
        if len(x) != len(q):
            raise ContractViolation(f"Pattern length {len(q)} does not match string length {len(x)}")
        out.append(int(all(a is None or b is None or a == b for a, b in zip(x, q))))
    return BitVector.from_bits(out) if out else BitVector(0)


def naive_independent(adjacency: BitMatrix, members: Sequence[int]) -> int:
    """Edge scan over all member pairs (self-loops included)."""
    a = adjacency.to_array()
    ms = list(members)
    return int(not any(a[x, y] for x in ms for y in ms))


def naive_set_query(adjacency: BitMatrix, members: Sequence[int], mode: str) -> int:
    n = adjacency.rows
    ms = set(int(x) for x in members)
    if mode == "independent":
        return naive_independent(adjacency, ms)
    if mode == "vertex_cover":
        a = adjacency.to_array()
        return int(all(x in ms or y in ms for x in range(n) for y in range(n) if a[x, y]))
    if mode == "dominating":
        a = adjacency.to_array()
        return int(all(x in ms or any(a[x, y] for y in ms) for x in range(n)))
    raise ContractViolation(f"Unknown set query mode {mode!r}")


def naive_triangle(adjacency: BitMatrix, vertex: int) -> int:
    """Scan all neighbour pairs of ``vertex``."""
    a = adjacency.to_array()
    nbrs = [y for y in range(adjacency.cols) if a[vertex, y] and y != vertex]
    return int(any(a[x, y] for x in nbrs for y in nbrs if x != y))


def naive_cnf_eval(clauses: Sequence[tuple[int, int]], assignment: BitVector) -> int:
    """Clause loop over signed 1-based literals."""
    bits = assignment.to_array()

    def value(lit: int) -> bool:
        return bool(bits[abs(lit) - 1]) == (lit > 0)

    return int(all(value(a) or value(b) for a, b in clauses))
