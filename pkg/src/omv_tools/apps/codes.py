"""
Subset codes for the partial-match reduction.

For an alphabet of ``k`` symbols with ``t = ceil(log2 k)``, symbol ``l`` is coded by
the ``l``-th ``t``-element subset ``S_l`` of ``[2t]`` in colexicographic order, and
queries use its complement ``T_l``. Then ``S_l`` and ``T_l`` are disjoint while
``S_l`` meets ``T_m`` for every ``m != l``, because distinct subsets of equal size
are never contained in one another.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from omv_tools.errors import InputError


@dataclass(frozen=True)
class SubsetCodes:
    """
    :ivar s_bits: ``(k, dim)`` 0/1 array, row ``l`` is the indicator of ``S_l``.
    :ivar t_bits: ``(k, dim)`` 0/1 array, row ``l`` is the indicator of ``T_l``.
    """

    k: int
    dim: int
    s_sets: tuple[frozenset[int], ...]
    t_sets: tuple[frozenset[int], ...]
    s_bits: np.ndarray
    t_bits: np.ndarray


def code_dimension(k: int) -> int:
    return 2 * math.ceil(math.log2(k)) if k > 1 else 0


def subset_codes(k: int) -> SubsetCodes:
    if k < 1:
        raise InputError(f"Alphabet size must be at least 1, got {k}")
    dim = code_dimension(k)
    t = dim // 2
    colex = sorted(itertools.combinations(range(dim), t), key=lambda c: tuple(reversed(c)))[:k]
    s_sets = tuple(frozenset(c) for c in colex)
    t_sets = tuple(frozenset(range(dim)) - s for s in s_sets)
    s_bits = np.zeros((k, dim), dtype=np.uint8)
    for row, s in enumerate(s_sets):
        s_bits[row, list(s)] = 1
    return SubsetCodes(k, dim, s_sets, t_sets, s_bits, (1 - s_bits).astype(np.uint8))
