"""
Query-sequence generators for verification and benchmarking.

Kinds:
    - ``uniform``: independent random vectors (each bit 1 with probability ``density``).
    - ``repeated``: one random vector repeated.
    - ``basis``: unit vectors ``e_0, e_1, ...`` cycling through ``[n]``.
    - ``adversarial-dense``: dense supports (90% ones), which keep the rectangles
      large and push queries past the small-rectangle and dense checks.
    - ``all-ones``: the all-ones vector.
    - ``mixed``: the first four kinds interleaved.
"""
from enum import Enum
from typing import Iterator

import numpy as np

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet

DENSE_SUPPORT = 0.9


class WorkloadKind(str, Enum):
    UNIFORM = "uniform"
    REPEATED = "repeated"
    BASIS = "basis"
    ADVERSARIAL_DENSE = "adversarial-dense"
    ALL_ONES = "all-ones"
    MIXED = "mixed"


_MIXED_CYCLE = (WorkloadKind.UNIFORM, WorkloadKind.REPEATED, WorkloadKind.BASIS, WorkloadKind.ADVERSARIAL_DENSE)


def random_matrix(n: int, density: float, rng: np.random.Generator, cols: int | None = None) -> BitMatrix:
    return BitMatrix.random(n, n if cols is None else cols, density, rng)


def _random_vector(n: int, density: float, rng: np.random.Generator) -> BitVector:
    return BitVector.from_bits(rng.random(n) < density)


def _kinds(kind: WorkloadKind, q: int) -> Iterator[WorkloadKind]:
    for t in range(q):
        yield _MIXED_CYCLE[t % len(_MIXED_CYCLE)] if kind is WorkloadKind.MIXED else kind


def vector_workload(kind: WorkloadKind | str, n: int, q: int, rng: np.random.Generator,
                    density: float = 0.5) -> list[BitVector]:
    kind = WorkloadKind(kind)
    fixed = _random_vector(n, density, rng)
    out = []
    for t, k in enumerate(_kinds(kind, q)):
        if k is WorkloadKind.UNIFORM:
            out.append(_random_vector(n, density, rng))
        elif k is WorkloadKind.REPEATED:
            out.append(fixed.copy())
        elif k is WorkloadKind.BASIS:
            out.append(BitVector.from_indices(n, [t % n]))
        elif k is WorkloadKind.ADVERSARIAL_DENSE:
            out.append(_random_vector(n, DENSE_SUPPORT, rng))
        else:
            out.append(BitVector.ones(n))
    return out


def pair_workload(kind: WorkloadKind | str, n: int, q: int, rng: np.random.Generator,
                  density: float = 0.5) -> list[tuple[IndexSet, IndexSet]]:
    """Pairs ``(U, V)`` for vector-Matrix-vector queries, built from two vector workloads."""
    us = vector_workload(kind, n, q, rng, density)
    vs = vector_workload(kind, n, q, rng, density)
    if WorkloadKind(kind) in (WorkloadKind.BASIS, WorkloadKind.MIXED):
        # pair e_i with e_i on the basis steps; the rectangle is then a single entry
        vs = [v if k is not WorkloadKind.BASIS else u for u, v, k in zip(us, vs, _kinds(WorkloadKind(kind), q))]
    return [(IndexSet(u), IndexSet(v)) for u, v in zip(us, vs)]
