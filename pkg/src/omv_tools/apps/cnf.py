"""
Online evaluation of a fixed 2-CNF formula.

Literal ``x_i`` is node ``2(i-1)`` and ``not x_i`` is node ``2(i-1)+1`` of a graph with
one edge ``{not a, not b}`` per clause ``(a or b)``. An assignment satisfies the
formula iff the literals it makes true form an independent set.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from omv_tools.apps.graph import GraphHandle, SetQueryMode, set_query
from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import ContractViolation, InputError
from omv_tools.vmv import VmvConfig

logger = logging.getLogger(__name__)


def literal_node(literal: int) -> int:
    """Graph node of a signed 1-based literal."""
    if literal == 0:
        raise InputError("Literal 0 is not a variable")
    return 2 * (abs(literal) - 1) + (1 if literal < 0 else 0)


class CnfHandle:
    def __init__(self, n_vars: int, clauses: Sequence[tuple[int, int]], config: VmvConfig | dict | None = None,
                 max_workers: int = 1):
        if n_vars < 1:
            raise InputError(f"A formula needs at least one variable, got {n_vars}")
        a = np.zeros((2 * n_vars, 2 * n_vars), dtype=np.uint8)
        for a_lit, b_lit in clauses:
            if not (1 <= abs(a_lit) <= n_vars and 1 <= abs(b_lit) <= n_vars):
                raise InputError(f"Clause ({a_lit}, {b_lit}) uses a variable outside 1..{n_vars}")
            x, y = literal_node(-a_lit), literal_node(-b_lit)
            a[x, y] = a[y, x] = 1
        self.n_vars = n_vars
        self.clauses = list(clauses)
        self.graph = GraphHandle(BitMatrix.from_array(a), simple=False, config=config, max_workers=max_workers)
        logger.debug(f"Implication graph: {2 * n_vars} nodes, {len(self.clauses)} clauses")


def true_literals(n_vars: int, assignment: BitVector) -> IndexSet:
    bits = assignment.to_array()
    nodes = [2 * i + (0 if bits[i] else 1) for i in range(n_vars)]
    return IndexSet.from_indices(2 * n_vars, nodes)


def cnf_eval(formula: CnfHandle, assignment: BitVector) -> int:
    if assignment.length != formula.n_vars:
        raise ContractViolation(f"Assignment of length {assignment.length} for {formula.n_vars} variables")
    return set_query(formula.graph, true_literals(formula.n_vars, assignment), SetQueryMode.INDEPENDENT)
