"""
Amortized online vector-Matrix-vector queries over the Boolean semiring.

A query ``(U, V)`` asks whether ``M[U x V]`` contains a 1. The structure keeps a
list ``L`` of at most ``Z`` extracted rectangles ``(U_k, V_k, S_k)``, where
``S_k`` holds every 1-entry of ``M`` inside ``U_k x V_k``, and the indicator
``D`` of the pairs covered by no extracted rectangle (the unseen set ``C``).

Each query runs the following steps, stopping at the first one that answers:

1. Small rectangle (``|U||V| < n^2/Z``): check it directly.
2. Dense check: sample ``Y`` pairs of ``U x V``; any 1 answers 1.
3. Scan the stored ``S_k`` lists for a pair inside ``U x V``.
4. Estimate ``Q = |(U x V) & C|`` from ``ceil(n^2/Z)`` uniform samples of ``C``.
5. If the estimate exceeds ``2n^2/Z``: brute force, and extract the rectangle when
   it is large in ``C`` and sparse in ``M``.
6. Otherwise list the unseen pairs ``W`` of ``U x V`` through orthogonal-vectors
   listing and check ``M`` on them.

Answers are always exact; randomness only affects which step answers.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from omv_tools.bitcore import (
    BitMatrix,
    IndexSet,
    _unpack,
    count_ones,
    inner_product_bool,
    ones_in_rectangle,
    submatrix_has_one,
    zero_rectangle,
)
from omv_tools.errors import ConfigurationError, ContractViolation, EmptySetError, InvariantViolation
from omv_tools.ovlist import (
    GroupPairDetector,
    OvInstance,
    SideVectors,
    WordParallelDetector,
    build_side_vectors,
    orthogonal_pair_arrays,
)

logger = logging.getLogger(__name__)


class VmvConfig(BaseModel):
    """User-facing tuning knobs; resolved per matrix size by :func:`resolve_params`."""

    delta: float = Field(default=1.0, gt=0, description="Exponent scale of the default extraction budget Z")
    epsilon: float = Field(default=0.5, gt=0, le=1, description="Group size exponent: s = Z ** epsilon")
    c: float = Field(default=8.0, gt=0, description="Constant of the sparsity bound c * n^2 * ln(n) / Y")
    seed: int = Field(default=0, description="Seed of the query-time random generator")
    y: Optional[int] = Field(default=None, ge=1, description="Dense-check sample count (default ceil(n^1.5))")
    z: Optional[int] = Field(default=None, ge=1, description="Extraction budget (default from delta)")
    debug_checks: bool = Field(default=False, description="Audit the structure after every extraction")


@dataclass(frozen=True)
class VmvParams:
    Y: int
    Z: int
    c: float = 8.0
    epsilon: float = 0.5
    seed: int = 0
    debug_checks: bool = False

    @property
    def group_size(self) -> int:
        return max(1, math.floor(self.Z ** self.epsilon))


def z_cap(n: int) -> int:
    """Largest admissible extraction budget, ``floor(n / log2 n)``."""
    if n < 2:
        return 1
    return max(1, math.floor(n / math.log2(n)))


def default_y(n: int) -> int:
    return max(1, math.ceil(n ** 1.5))


def default_z(n: int, delta: float = 1.0) -> int:
    lg = math.log2(n) if n > 1 else 0.0
    return max(1, min(z_cap(n), 2 ** math.ceil(delta * math.sqrt(lg))))


def resolve_params(n: int, config: VmvConfig | dict | None = None) -> VmvParams:
    """
    Parameters for an ``n x n`` structure.

    :raises ConfigurationError: If the configuration is invalid or ``Z`` exceeds ``n / log2 n``.
    """
    try:
        if config is None:
            config = VmvConfig()
        elif isinstance(config, dict):
            config = VmvConfig(**config)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid engine configuration: {e}") from e
    params = VmvParams(
        Y=config.y if config.y is not None else default_y(n),
        Z=config.z if config.z is not None else default_z(n, config.delta),
        c=config.c,
        epsilon=config.epsilon,
        seed=config.seed,
        debug_checks=config.debug_checks,
    )
    validate_params(n, params)
    return params


def validate_params(n: int, params: VmvParams) -> None:
    if params.Y < 1 or params.Z < 1:
        raise ConfigurationError(f"Y and Z must be positive, got Y={params.Y}, Z={params.Z}")
    if params.Z > z_cap(n):
        raise ConfigurationError(f"Z={params.Z} exceeds n/log2(n)={z_cap(n)} for n={n}")
    if params.c <= 0 or not 0 < params.epsilon <= 1:
        raise ConfigurationError(f"Invalid constants c={params.c}, epsilon={params.epsilon}")


@dataclass
class ExtractedTriple:
    """
    A brute-forced query kept for later scans.

    :ivar ones: ``(k, 2)`` array of the 1-entries of ``M`` inside ``rows x cols``.
    :ivar covered: Number of unseen pairs the rectangle removed when inserted.
    """

    rows: IndexSet
    cols: IndexSet
    ones: np.ndarray
    covered: int = 0


@dataclass
class VmvStats:
    queries: int = 0
    step_entries: dict[int, int] = field(default_factory=lambda: {k: 0 for k in range(1, 7)})
    answered_at: dict[int, int] = field(default_factory=lambda: {k: 0 for k in range(1, 7)})
    extractions: int = 0
    step5_no_insert: int = 0
    w_sizes: list[int] = field(default_factory=list)

    def merge(self, other: "VmvStats") -> None:
        self.queries += other.queries
        for k in self.step_entries:
            self.step_entries[k] += other.step_entries[k]
            self.answered_at[k] += other.answered_at[k]
        self.extractions += other.extractions
        self.step5_no_insert += other.step5_no_insert
        self.w_sizes.extend(other.w_sizes)

    def as_dict(self) -> dict:
        return {
            "queries": self.queries,
            "step_entries": dict(self.step_entries),
            "answered_at": dict(self.answered_at),
            "extractions": self.extractions,
            "step5_no_insert": self.step5_no_insert,
            "w_max": max(self.w_sizes, default=0),
            "w_mean": float(np.mean(self.w_sizes)) if self.w_sizes else 0.0,
        }


@dataclass
class VmvState:
    matrix: BitMatrix
    unseen: BitMatrix
    card_c: int
    row_card: np.ndarray
    triples: list[ExtractedTriple]
    side: SideVectors
    params: VmvParams
    rng: np.random.Generator
    stats: VmvStats = field(default_factory=VmvStats)
    detector: GroupPairDetector = field(default_factory=WordParallelDetector)

    @property
    def n(self) -> int:
        return self.matrix.rows

    @property
    def small_threshold(self) -> float:
        """``n^2 / Z``: queries below it are answered directly, insertions must cover at least it."""
        return self.n * self.n / self.params.Z

    @property
    def sparsity_bound(self) -> float:
        """``c * n^2 * ln(n) / Y``."""
        n = self.n
        return self.params.c * n * n * math.log(n) / self.params.Y if n > 1 else 0.0


def vmv_new(matrix: BitMatrix, params: VmvParams, rng: np.random.Generator | None = None) -> VmvState:
    """
    Fresh structure: ``C`` is every pair and ``L`` is empty.

    :raises ContractViolation: If ``matrix`` is not square and non-empty.
    :raises ConfigurationError: If ``params`` break ``Z <= n / log2 n``.
    """
    if not matrix.is_square() or matrix.rows < 1:
        raise ContractViolation(f"Expected a non-empty square matrix, got shape {matrix.shape}")
    n = matrix.rows
    validate_params(n, params)
    return VmvState(
        matrix=matrix,
        unseen=BitMatrix.ones(n),
        card_c=n * n,
        row_card=np.full(n, n, dtype=np.int64),
        triples=[],
        side=SideVectors.empty(n),
        params=params,
        rng=rng if rng is not None else np.random.default_rng(params.seed),
    )


def _check_query(state: VmvState, u: IndexSet, v: IndexSet) -> None:
    if u.universe != state.n or v.universe != state.n:
        raise ContractViolation(f"Query sets over ({u.universe}, {v.universe}) for a structure of size {state.n}")


def _sample_cells(state: VmvState, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` uniform draws (with replacement) from ``C`` as row and column arrays."""
    if state.card_c <= 0:
        raise EmptySetError("Cannot sample from an empty unseen set")
    r = state.rng.integers(0, state.card_c, size=count)
    prefix = np.cumsum(state.row_card)
    rows = np.searchsorted(prefix, r, side="right")
    offsets = r - (prefix[rows] - state.row_card[rows])
    cols = np.empty(count, dtype=np.int64)
    uniq, inverse = np.unique(rows, return_inverse=True)
    for k, row in enumerate(uniq):
        members = np.flatnonzero(_unpack(state.unseen.words[row], state.n))
        sel = inverse == k
        cols[sel] = members[offsets[sel]]
    return rows.astype(np.int64), cols


def sample_from_C(state: VmvState) -> tuple[int, int]:
    """
    One uniform member of the unseen set.

    :raises EmptySetError: If ``C`` is empty.
    """
    rows, cols = _sample_cells(state, 1)
    return int(rows[0]), int(cols[0])


def dense_check(state: VmvState, u: IndexSet, v: IndexSet) -> Optional[tuple[int, int]]:
    """First of ``Y`` uniform samples of ``U x V`` that hits a 1 of ``M``, or None."""
    _check_query(state, u, v)
    if not u.cardinality or not v.cardinality:
        return None
    y = state.params.Y
    ri = u.indices()[state.rng.integers(0, u.cardinality, size=y)]
    ci = v.indices()[state.rng.integers(0, v.cardinality, size=y)]
    hits = np.flatnonzero(state.matrix.get_many(ri, ci))
    if not hits.size:
        return None
    return int(ri[hits[0]]), int(ci[hits[0]])


def scan_extracted(state: VmvState, u: IndexSet, v: IndexSet) -> Optional[tuple[int, int]]:
    """Some stored 1-entry lying inside ``U x V``, or None."""
    _check_query(state, u, v)
    if not state.triples:
        return None
    u_bits = u.mask.to_array().astype(bool)
    v_bits = v.mask.to_array().astype(bool)
    for t in state.triples:
        if not t.ones.shape[0]:
            continue
        inside = np.flatnonzero(u_bits[t.ones[:, 0]] & v_bits[t.ones[:, 1]])
        if inside.size:
            i, j = t.ones[inside[0]]
            return int(i), int(j)
    return None


def estimate_unseen(state: VmvState, u: IndexSet, v: IndexSet) -> float:
    """
    Estimate ``B`` of ``|(U x V) & C|`` from ``ceil(n^2 / Z)`` samples of ``C``.

    ``B = 0`` when ``C`` is empty.
    """
    _check_query(state, u, v)
    if state.card_c == 0:
        return 0.0
    m = math.ceil(state.small_threshold)
    rows, cols = _sample_cells(state, m)
    u_bits = u.mask.to_array().astype(bool)
    v_bits = v.mask.to_array().astype(bool)
    inside = int(np.count_nonzero(u_bits[rows] & v_bits[cols]))
    return inside / m * state.card_c


def brute_force_extract(state: VmvState, u: IndexSet, v: IndexSet) -> tuple[int, bool]:
    """
    Exact answer, extracting ``(U, V, S)`` into ``L`` when ``Q >= n^2/Z`` and ``S`` is sparse.

    :raises InvariantViolation: If an extraction is warranted while ``|L| = Z``.
    """
    _check_query(state, u, v)
    ones = ones_in_rectangle(state.matrix, u, v)
    answer = int(bool(ones))
    q = count_ones(state.unseen, u, v)
    if q < state.small_threshold or len(ones) > state.sparsity_bound:
        state.stats.step5_no_insert += 1
        logger.debug(f"Step 5 without insertion: Q={q}, |S|={len(ones)}, bound={state.sparsity_bound:.1f}")
        return answer, False
    if len(state.triples) >= state.params.Z:
        raise InvariantViolation(f"Extraction warranted with |L|={len(state.triples)} already at Z={state.params.Z}")

    triple = ExtractedTriple(u, v, np.asarray(ones, dtype=np.int64).reshape(-1, 2))
    triple.covered = zero_rectangle(state.unseen, u, v, state.row_card)
    state.card_c -= triple.covered
    state.triples.append(triple)
    state.side.extend(u, v)
    state.stats.extractions += 1
    logger.debug(
        f"Extracted rectangle {len(state.triples)}/{state.params.Z}: |U|={u.cardinality}, |V|={v.cardinality}, "
        f"|S|={len(ones)}, covered={triple.covered}, |C|={state.card_c}"
    )
    if state.params.debug_checks:
        problems = audit(state)
        if problems:
            raise InvariantViolation("; ".join(problems))
    return answer, True


def _enter(state: VmvState, step: int) -> None:
    state.stats.step_entries[step] += 1


def _answered(state: VmvState, step: int, answer: int) -> int:
    state.stats.answered_at[step] += 1
    return answer


def answer_query(state: VmvState, u: IndexSet, v: IndexSet, allow_brute_force: bool = True,
                 guess: int = 0) -> tuple[int, int]:
    """
    Run the query steps.

    :param allow_brute_force: When False, a query reaching step 5 returns ``guess`` instead.
    :return: ``(answer, answering_step)``.
    """
    _check_query(state, u, v)
    state.stats.queries += 1
    n2 = state.n * state.n

    _enter(state, 1)
    if u.cardinality * v.cardinality * state.params.Z < n2:
        return _answered(state, 1, submatrix_has_one(state.matrix, u, v)), 1

    _enter(state, 2)
    if dense_check(state, u, v) is not None:
        return _answered(state, 2, 1), 2

    _enter(state, 3)
    if scan_extracted(state, u, v) is not None:
        return _answered(state, 3, 1), 3

    _enter(state, 4)
    b = estimate_unseen(state, u, v)

    if b * state.params.Z > 2 * n2:
        _enter(state, 5)
        if not allow_brute_force:
            return _answered(state, 5, int(guess)), 5
        answer, _ = brute_force_extract(state, u, v)
        return _answered(state, 5, answer), 5

    _enter(state, 6)
    inst = OvInstance(state.side, u, v, state.params.group_size, state.unseen)
    rows, cols = orthogonal_pair_arrays(inst, state.detector)
    state.stats.w_sizes.append(int(rows.size))
    answer = int(rows.size > 0 and bool(state.matrix.get_many(rows, cols).any()))
    return _answered(state, 6, answer), 6


def vmv_query(state: VmvState, u: IndexSet, v: IndexSet) -> int:
    """1 iff ``M[U x V]`` contains a 1. Exact for every input and seed."""
    answer, _ = answer_query(state, u, v)
    return answer


def audit(state: VmvState) -> list[str]:
    """
    Recompute the structure's invariants from scratch.

    :return: Human-readable violations; empty when the state is consistent.
    """
    problems: list[str] = []
    n = state.n
    if len(state.triples) > state.params.Z:
        problems.append(f"|L|={len(state.triples)} exceeds Z={state.params.Z}")

    covered = np.zeros((n, n), dtype=bool)
    for k, t in enumerate(state.triples):
        covered[np.ix_(t.rows.indices(), t.cols.indices())] = True
        expected = np.asarray(ones_in_rectangle(state.matrix, t.rows, t.cols), dtype=np.int64).reshape(-1, 2)
        if not np.array_equal(expected, t.ones):
            problems.append(f"Triple {k}: stored 1-entries differ from M")
        if t.ones.shape[0] > state.sparsity_bound:
            problems.append(f"Triple {k}: |S|={t.ones.shape[0]} above the sparsity bound")
        if t.covered < state.small_threshold:
            problems.append(f"Triple {k}: covered {t.covered} < n^2/Z")
    if not np.array_equal(state.unseen.to_array().astype(bool), ~covered):
        problems.append("Unseen indicator D does not match the complement of the extracted rectangles")
    if state.card_c != state.unseen.popcount():
        problems.append(f"|C|={state.card_c} but D holds {state.unseen.popcount()} ones")
    if not np.array_equal(state.row_card, state.unseen.row_popcounts()):
        problems.append("Per-row counts of D are stale")

    expected_side = build_side_vectors(state.triples, n)
    if state.side.dimension != len(state.triples):
        problems.append(f"Side vector dimension {state.side.dimension} != |L|={len(state.triples)}")
    elif state.side.u != expected_side.u or state.side.v != expected_side.v:
        problems.append("Side vectors out of sync with L")
    elif state.triples:
        # D(i, j) = 1 iff u_i and v_j are orthogonal
        unseen = state.unseen.to_array()
        cols = [state.side.col_vector(j) for j in range(n)]
        for i in range(n):
            u_i = state.side.row_vector(i)
            if [1 - inner_product_bool(u_i, v_j) for v_j in cols] != unseen[i].tolist():
                problems.append(f"Row {i} of D disagrees with side-vector orthogonality")
                break
    return problems
