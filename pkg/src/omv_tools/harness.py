"""
Verification, benchmarking and fixture generation.

Every entry point takes a Pydantic configuration and an optional
``progress_callback(event, count)``. Events are ``"<phase>_start:<label>"``
with the number of steps as ``count``, followed by ``"<phase>_progress"``
events with the number of completed steps since the previous one.
"""
import csv
import logging
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from omv_tools.apps import CnfHandle, GraphHandle, SetQueryMode, cnf_eval, pm_build, pm_query, set_query, triangle_query
from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.cellprobe import (
    DEFAULT_N_MAX,
    DEFAULT_WC_N_MAX,
    ProbeLedger,
    WorstCaseGrid,
    build_cp_grid,
    cp_omv_query,
    cp_preprocess,
    cp_query,
    find_insertable_query,
    probe_threshold,
    wc_omv_query,
)
from omv_tools.errors import ConfigurationError, InputError
from omv_tools.fixtures import format_cnf, format_corpus, format_matrix, format_pattern, format_query_pairs, \
    format_vectors, parse_cnf, parse_corpus, parse_matrix, parse_queries, parse_query_pairs, parse_vectors, read_text, \
    write_text
from omv_tools.omv import OmvState, audit_grid, omv_new, omv_query
from omv_tools.oracle import naive_cnf_eval, naive_matvec, naive_partial_match, naive_set_query, naive_triangle, \
    naive_vmv, word_parallel_matvec
from omv_tools.reports import VerifyReport
from omv_tools.vmv import VmvConfig, VmvStats, audit, resolve_params, vmv_new, vmv_query
from omv_tools.workloads import WorkloadKind, pair_workload, random_matrix, vector_workload

logger = logging.getLogger(__name__)

ProgressCallback = Optional[Callable[[str, int], None]]

BENCH_SCHEMA = "# omv-tools bench schema v1"
SWEEP_SCHEMA = "# omv-tools cellprobe schema v1"

# probability of the wildcard in generated corpora and queries
CORPUS_STAR = 0.2
QUERY_STAR = 0.5


class Engine(str, Enum):
    NAIVE = "naive"
    WORD_PARALLEL = "word-parallel"
    OMV = "omv"
    VMV = "vmv"
    PM = "pm"
    CNF = "cnf"
    GRAPH = "graph"
    CELLPROBE = "cellprobe"
    WC = "wc"


BENCH_ENGINES = (Engine.NAIVE, Engine.WORD_PARALLEL, Engine.OMV)


class RunConfig(BaseModel):
    """
    Inputs of a verify or gen run. ``m`` is the string length (pm) or the clause count (cnf).

    ``fixtures`` names a directory written by :func:`run_gen`; verify then reads its inputs from there.
    """

    engine: Engine = Engine.OMV
    n: int = Field(default=64, ge=1)
    m: Optional[int] = Field(default=None, ge=1)
    k: int = Field(default=4, ge=1)
    q: int = Field(default=100, ge=0)
    seed: int = Field(default=0, ge=0)
    density: float = Field(default=0.5, ge=0, le=1)
    workload: WorkloadKind = WorkloadKind.MIXED
    vmv: VmvConfig = Field(default_factory=VmvConfig)
    word_size: int = Field(default=4, ge=1)
    n_max: int = Field(default=DEFAULT_N_MAX, ge=1)
    wc_n_max: int = Field(default=DEFAULT_WC_N_MAX, ge=1)
    wc_block: Optional[int] = Field(default=None, ge=1)
    max_workers: int = Field(default=1, ge=1)
    fixtures: Optional[Path] = None

    def string_length(self) -> int:
        return self.m if self.m is not None else max(1, self.n // 4)

    def clause_count(self) -> int:
        return self.m if self.m is not None else 2 * self.n


class BenchConfig(BaseModel):
    engines: list[Engine] = Field(default_factory=lambda: list(BENCH_ENGINES))
    sizes: list[int] = Field(default_factory=lambda: [256])
    workloads: list[WorkloadKind] = Field(default_factory=lambda: [WorkloadKind.UNIFORM])
    q: int = Field(default=256, ge=2)
    seed: int = Field(default=0, ge=0)
    density: float = Field(default=0.5, ge=0, le=1)
    repetitions: int = Field(default=5, ge=1)
    vmv: VmvConfig = Field(default_factory=VmvConfig)
    max_workers: int = Field(default=1, ge=1)
    parallel_cells: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _check_engines(self):
        unsupported = [e.value for e in self.engines if e not in BENCH_ENGINES]
        if unsupported:
            raise ValueError(f"bench compares matrix-vector engines only, got {unsupported}")
        if any(n < 1 for n in self.sizes):
            raise ValueError("matrix sizes must be positive")
        return self


class SweepConfig(BaseModel):
    sizes: list[int] = Field(default_factory=lambda: [4, 6, 8, 10, 12])
    word_sizes: list[int] = Field(default_factory=lambda: [2, 4, 8])
    matrices: int = Field(default=5, ge=1)
    queries: int = Field(default=200, ge=1)
    density: float = Field(default=0.05, ge=0, le=1)
    seed: int = Field(default=0, ge=0)
    n_max: int = Field(default=DEFAULT_N_MAX, ge=1)


def load_config(model: type[BaseModel], data: dict) -> BaseModel:
    """Validate ``data`` into ``model``; :class:`ConfigurationError` on failure."""
    try:
        return model(**data)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid {model.__name__}: {e}") from e


def _notify(cb: ProgressCallback, event: str, count: int = 1) -> None:
    if cb is not None:
        cb(event, count)


def _diff(expected: BitVector, got: BitVector) -> list[int]:
    return [int(i) for i in (expected ^ got).support()]


# --------------------------------------------------------------------------- #
# verify inputs
# --------------------------------------------------------------------------- #

FIXTURE_FILES = {
    "matrix": "matrix.txt",
    "vectors": "vectors.txt",
    "pairs": "pairs.txt",
    "graph": "graph.txt",
    "corpus": "corpus.txt",
    "queries": "queries.txt",
    "formula": "formula.cnf",
}

# engines that read query vectors (cnf: assignments) or vMv pairs from the fixtures
VECTOR_ENGINES = (Engine.NAIVE, Engine.WORD_PARALLEL, Engine.OMV, Engine.CNF, Engine.CELLPROBE, Engine.WC)
PAIR_ENGINES = (Engine.VMV, Engine.CELLPROBE, Engine.WC)


@dataclass
class VerifyInputs:
    """Inputs read from a fixture directory; ``None`` fields are generated from the seed."""

    matrix: Optional[BitMatrix] = None
    vectors: Optional[list[BitVector]] = None
    pairs: Optional[list[tuple[IndexSet, IndexSet]]] = None
    corpus: Optional[list[list[int | None]]] = None
    alphabet: Optional[int] = None
    queries: Optional[list[list[int | None]]] = None
    formula: Optional[tuple[int, list[tuple[int, int]]]] = None


def _required_fixture(engine: Engine) -> str:
    if engine is Engine.CNF:
        return "formula"
    if engine is Engine.PM:
        return "corpus"
    if engine is Engine.GRAPH:
        return "graph"
    return "matrix"


def load_inputs(directory: Path, engine: Engine) -> VerifyInputs:
    """
    Read the fixtures ``engine`` consumes from ``directory``.

    The engine's main input (matrix, graph, corpus or formula) must exist; query files
    are optional.

    :raises InputError: Missing main input, malformed file or inconsistent dimensions.
    """
    directory = Path(directory)

    def text(kind: str) -> Optional[str]:
        path = directory / FIXTURE_FILES[kind]
        return read_text(path) if path.is_file() else None

    required = _required_fixture(engine)
    main = text(required)
    if main is None:
        raise InputError(f"{engine.value} needs {directory / FIXTURE_FILES[required]}")

    inputs = VerifyInputs()
    n = 0
    if engine is Engine.CNF:
        inputs.formula = parse_cnf(main)
        n = inputs.formula[0]
        if n < 1:
            raise InputError(f"Formula needs at least one variable, got {n}")
    elif engine is Engine.PM:
        inputs.corpus, m, inputs.alphabet = parse_corpus(main)
        if not inputs.corpus or m < 1 or inputs.alphabet < 1:
            raise InputError(f"Corpus needs n, m, k >= 1, got n={len(inputs.corpus)} m={m} k={inputs.alphabet}")
        if (queries := text("queries")) is not None:
            inputs.queries = parse_queries(queries, m, inputs.alphabet)
    else:
        inputs.matrix = parse_matrix(main)
        if not inputs.matrix.is_square() or inputs.matrix.rows < 1:
            raise InputError(f"Expected a non-empty square matrix, got {inputs.matrix.shape}")
        n = inputs.matrix.rows

    if engine in VECTOR_ENGINES and (vectors := text("vectors")) is not None:
        inputs.vectors = parse_vectors(vectors, n)
    if engine in PAIR_ENGINES and (pairs := text("pairs")) is not None:
        inputs.pairs = parse_query_pairs(pairs, n)
    logger.info(f"Loaded {engine.value} inputs from {directory}")
    return inputs


def _with_inputs(config: RunConfig, inputs: VerifyInputs) -> RunConfig:
    """Sizes and query count taken from the loaded inputs."""
    update = {}
    if inputs.matrix is not None:
        update["n"] = inputs.matrix.rows
    if inputs.formula is not None:
        update["n"] = inputs.formula[0]
        update["m"] = max(1, len(inputs.formula[1]))
    if inputs.corpus is not None:
        update.update(n=len(inputs.corpus), m=len(inputs.corpus[0]), k=inputs.alphabet)

    counts = []
    if inputs.vectors is not None:
        counts.append(len(inputs.vectors))
    if inputs.pairs is not None:
        counts.append(len(inputs.pairs))
    if inputs.queries is not None:
        counts.append(len(inputs.queries))
    if counts:
        update["q"] = min(counts)
    return config.model_copy(update=update)


def _matrix(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator) -> BitMatrix:
    return inputs.matrix if inputs.matrix is not None else random_matrix(config.n, config.density, rng)


def _vectors(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator) -> list[BitVector]:
    if inputs.vectors is not None:
        return inputs.vectors[:config.q]
    return vector_workload(config.workload, config.n, config.q, rng)


def _pairs(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator) -> list[tuple[IndexSet, IndexSet]]:
    if inputs.pairs is not None:
        return inputs.pairs[:config.q]
    return pair_workload(config.workload, config.n, config.q, rng)


# --------------------------------------------------------------------------- #
# verify
# --------------------------------------------------------------------------- #

def _audit_problems(report: VerifyReport, name: str, problems: list[str]) -> None:
    report.add_audit(name, not problems, "; ".join(problems[:10]))


def _omv_statistics(state: OmvState) -> dict:
    per_block = [len(s.triples) for row in state.grid for s in row]
    return {
        "omv": state.stats.as_dict(),
        "blocks": state.block_stats().as_dict(),
        "block_side": state.block,
        "z": state.params.Z,
        "extraction_possible": state.extraction_possible,
        "triples_added": sum(per_block),
        "triples_max_block": max(per_block, default=0),
    }


def _verify_matvec(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
                   cb: ProgressCallback) -> None:
    matrix = _matrix(config, inputs, rng)
    vectors = _vectors(config, inputs, rng)
    state = None
    if config.engine is Engine.NAIVE:
        product = lambda v: naive_matvec(matrix, v)  # noqa: E731
    elif config.engine is Engine.WORD_PARALLEL:
        product = lambda v: word_parallel_matvec(matrix, v)  # noqa: E731
    else:
        state = omv_new(matrix, config.vmv, max_workers=config.max_workers)
        product = lambda v: omv_query(state, v)  # noqa: E731

    for t, v in enumerate(vectors):
        expected, got = naive_matvec(matrix, v), product(v)
        if expected != got:
            report.add_mismatch(t, expected.popcount(), got.popcount(), positions=_diff(expected, got))
        _notify(cb, "verify_progress")

    if state is not None:
        _audit_problems(report, "block invariants", audit_grid(state))
        report.statistics.update(_omv_statistics(state))


def _verify_vmv(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
                cb: ProgressCallback) -> None:
    matrix = _matrix(config, inputs, rng)
    pairs = _pairs(config, inputs, rng)
    params = resolve_params(config.n, config.vmv)
    state = vmv_new(matrix, params)
    for t, (u, v) in enumerate(pairs):
        expected, got = naive_vmv(matrix, u, v), vmv_query(state, u, v)
        if expected != got:
            report.add_mismatch(t, expected, got, rows=u.cardinality, cols=v.cardinality)
        _notify(cb, "verify_progress")
    _audit_problems(report, "structure invariants", audit(state))
    report.statistics.update(state.stats.as_dict())
    report.statistics.update({"z": params.Z, "y": params.Y, "triples_added": len(state.triples)})


def random_graph(n: int, density: float, rng: np.random.Generator) -> BitMatrix:
    """Symmetric adjacency matrix without self-loops, each edge present with probability ``density``."""
    a = np.triu(rng.random((n, n)) < density, 1)
    return BitMatrix.from_array(a | a.T)


def _verify_graph(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
                  cb: ProgressCallback) -> None:
    adjacency = inputs.matrix if inputs.matrix is not None else random_graph(config.n, config.density, rng)
    graph = GraphHandle(adjacency, config=config.vmv, max_workers=config.max_workers)
    modes = list(SetQueryMode)
    complement_failures = []
    for t in range(config.q):
        s = IndexSet(BitVector.from_bits(rng.random(config.n) < 0.5))
        mode = modes[t % len(modes)]
        expected, got = naive_set_query(adjacency, s.indices(), mode.value), set_query(graph, s, mode)
        if expected != got:
            report.add_mismatch(t, expected, got, query=mode.value)
        if set_query(graph, s, SetQueryMode.VERTEX_COVER) != set_query(graph, s.complement(), SetQueryMode.INDEPENDENT):
            complement_failures.append(f"query {t}")
        vertex = t % config.n
        expected, got = naive_triangle(adjacency, vertex), triangle_query(graph, vertex)
        if expected != got:
            report.add_mismatch(t, expected, got, query="triangle", vertex=vertex)
        _notify(cb, "verify_progress")
    _audit_problems(report, "vertex cover complement", complement_failures)
    _audit_problems(report, "block invariants", audit_grid(graph.omv))
    report.statistics.update(_omv_statistics(graph.omv))


def random_clauses(n_vars: int, count: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    variables = rng.integers(1, n_vars + 1, size=(count, 2))
    signs = np.where(rng.random((count, 2)) < 0.5, -1, 1)
    return [(int(a), int(b)) for a, b in variables * signs]


def _verify_cnf(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
                cb: ProgressCallback) -> None:
    if inputs.formula is not None:
        clauses = inputs.formula[1]
    else:
        clauses = random_clauses(config.n, config.clause_count(), rng)
    formula = CnfHandle(config.n, clauses, config=config.vmv, max_workers=config.max_workers)
    for t in range(config.q):
        if inputs.vectors is not None:
            assignment = inputs.vectors[t]
        else:
            assignment = BitVector.from_bits(rng.random(config.n) < 0.5)
        expected, got = naive_cnf_eval(clauses, assignment), cnf_eval(formula, assignment)
        if expected != got:
            report.add_mismatch(t, expected, got, assignment=assignment.to_string())
        _notify(cb, "verify_progress")
    _audit_problems(report, "block invariants", audit_grid(formula.graph.omv))
    report.statistics.update(_omv_statistics(formula.graph.omv))
    report.statistics["clauses"] = len(clauses)


def random_patterns(count: int, m: int, k: int, star: float, rng: np.random.Generator) -> list[list[int | None]]:
    symbols = rng.integers(0, k, size=(count, m))
    stars = rng.random((count, m)) < star
    return [[None if s else int(x) for x, s in zip(row, srow)] for row, srow in zip(symbols, stars)]


def _pm_queries(strings: list[list[int | None]], q: int, k: int, rng: np.random.Generator) -> list[list[int | None]]:
    """Half fresh random patterns, half corpus strings with extra wildcards so that some queries hit."""
    m = len(strings[0])
    fresh = random_patterns(q - q // 2, m, k, QUERY_STAR, rng)
    picks = rng.integers(0, len(strings), size=q // 2)
    derived = []
    for idx in picks:
        mask = rng.random(m) < QUERY_STAR
        derived.append([None if hide else sym for sym, hide in zip(strings[idx], mask)])
    return [p for pair in zip(fresh, derived) for p in pair] + fresh[len(derived):]


def _verify_pm(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
               cb: ProgressCallback) -> None:
    m = config.string_length()
    if inputs.corpus is not None:
        strings = inputs.corpus
    else:
        strings = random_patterns(config.n, m, config.k, CORPUS_STAR, rng)
    index = pm_build(strings, config.k, config.vmv, max_workers=config.max_workers)
    queries = inputs.queries if inputs.queries is not None else _pm_queries(strings, config.q, config.k, rng)
    for t, pattern in enumerate(queries[:config.q]):
        expected, got = naive_partial_match(strings, pattern), pm_query(index, pattern)
        if expected != got:
            report.add_mismatch(t, expected.popcount(), got.popcount(), query=format_pattern(pattern, config.k),
                                positions=_diff(expected, got))
        _notify(cb, "verify_progress")

    codes = index.codes
    inter = codes.s_bits.astype(np.int64) @ codes.t_bits.astype(np.int64).T
    off_diagonal = ~np.eye(config.k, dtype=bool)
    code_ok = not np.any(np.diagonal(inter)) and bool(np.all(inter[off_diagonal] > 0))
    report.add_audit("subset codes", code_ok, "" if code_ok else f"code property broken for k={config.k}")
    problems = [f"tile ({r}, {c}): {p}" for r, row in enumerate(index.tiles) for c, tile in enumerate(row)
                for p in audit_grid(tile)]
    _audit_problems(report, "tile invariants", problems)
    report.statistics.update({"m": m, "k": config.k, "code_dimension": index.dim, "tiles": list(index.tile_shape)})


def _verify_cellprobe(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
                      cb: ProgressCallback) -> None:
    """
    The direct structure covers ``n <= n_max``; the block grid covers sides up to ``n_max**2``.
    Each query checks the grid product and, when the direct structure exists, one vMv pair.
    """
    n, w = config.n, config.word_size
    matrix = _matrix(config, inputs, rng)
    direct = n <= config.n_max
    rects = cp_preprocess(matrix, w, config.n_max) if direct else None
    grid = build_cp_grid(matrix, w, config.n_max)
    ledger = ProbeLedger(w)
    omv_ledger = ProbeLedger(w)
    pairs = _pairs(config, inputs, rng) if direct else []
    vectors = _vectors(config, inputs, rng)
    report.queries = len(vectors) + len(pairs)
    over_bound = []
    for t, x in enumerate(vectors):
        if rects is not None:
            u, v = pairs[t]
            expected, (got, probes) = naive_vmv(matrix, u, v), cp_query(matrix, rects, u, v, ledger)
            if expected != got:
                report.add_mismatch(t, expected, got, query="vmv")
            if probes > rects.list_read_cost + rects.threshold:
                over_bound.append(f"query {t}: {probes} probes")
        expected_v, (got_v, _) = naive_matvec(matrix, x), cp_omv_query(matrix, grid, x, omv_ledger)
        if expected_v != got_v:
            report.add_mismatch(t, expected_v.popcount(), got_v.popcount(), query="omv",
                                positions=_diff(expected_v, got_v))
        _notify(cb, "verify_progress")

    grid_problems = [f"block ({bi}, {bj}): {p}" for bi, row in enumerate(grid.lists) for bj, lst in enumerate(row)
                     for p in lst.audit(grid.blocks[bi][bj])]
    _audit_problems(report, "block rectangle lists", grid_problems)
    report.statistics.update({
        "w": w,
        "direct": direct,
        "omv_mean_probes": float(np.mean(omv_ledger.history)) if omv_ledger.history else 0.0,
        "grid_rectangles": grid.total_rectangles(),
    })
    if rects is None:
        logger.info(f"n={n} exceeds n_max={config.n_max}: checking the block grid only")
        return
    _audit_problems(report, "rectangle list", rects.audit(matrix))
    _audit_problems(report, "probe bound", over_bound)
    report.statistics.update({
        "rectangles": len(rects.rects),
        "threshold": rects.threshold,
        "mean_probes": float(np.mean(ledger.history)) if ledger.history else 0.0,
        "max_probes": max(ledger.history, default=0),
    })


def _verify_wc(config: RunConfig, inputs: VerifyInputs, rng: np.random.Generator, report: VerifyReport,
               cb: ProgressCallback) -> None:
    """vMv pairs and matrix-vector products through the worst-case blocks (one block unless ``wc_block``)."""
    matrix = _matrix(config, inputs, rng)
    pairs = _pairs(config, inputs, rng)
    vectors = _vectors(config, inputs, rng)
    grid = WorstCaseGrid(matrix, config.wc_block or config.n, config.vmv, config.wc_n_max)
    states = [s for row in grid.states for s in row]
    report.queries = len(pairs) + len(vectors)

    before = VmvStats()
    for s in states:
        before.merge(s.stats)
    vmv_errors = omv_errors = 0
    for t, ((u, v), x) in enumerate(zip(pairs, vectors)):
        expected, got = naive_vmv(matrix, u, v), grid.query(u, v)
        if expected != got:
            vmv_errors += 1
            report.add_mismatch(t, expected, got, query="vmv", rows=u.cardinality, cols=v.cardinality)
        expected_v, got_v = naive_matvec(matrix, x), wc_omv_query(grid, x)
        if expected_v != got_v:
            omv_errors += 1
            report.add_mismatch(t, expected_v.popcount(), got_v.popcount(), query="omv",
                                positions=_diff(expected_v, got_v))
        _notify(cb, "verify_progress")

    insertable = [f"block {k}" for k, s in enumerate(states) if find_insertable_query(s, config.wc_n_max) is not None]
    _audit_problems(report, "no insertable query", insertable)
    _audit_problems(report, "structure invariants", [p for s in states for p in audit(s)])
    after = VmvStats()
    for s in states:
        after.merge(s.stats)
    report.statistics.update({
        "block_side": grid.block,
        "preprocessing_extractions": before.extractions,
        "guessed": after.answered_at[5] - before.answered_at[5],
        "triples": sum(len(s.triples) for s in states),
        "vmv_errors": vmv_errors,
        "omv_errors": omv_errors,
    })


_VERIFIERS = {
    Engine.NAIVE: _verify_matvec,
    Engine.WORD_PARALLEL: _verify_matvec,
    Engine.OMV: _verify_matvec,
    Engine.VMV: _verify_vmv,
    Engine.GRAPH: _verify_graph,
    Engine.CNF: _verify_cnf,
    Engine.PM: _verify_pm,
    Engine.CELLPROBE: _verify_cellprobe,
    Engine.WC: _verify_wc,
}


def run_verify(config: RunConfig, progress_callback: ProgressCallback = None) -> VerifyReport:
    """
    Run ``config.engine`` and its oracle on identical inputs.

    Inputs come from ``config.fixtures`` when set (sizes and query count follow the files)
    and are generated from ``config.seed`` otherwise.

    :return: Report with mismatches, invariant audits and engine statistics. Exact
        engines fail on any mismatch; the worst-case engine only reports its error rate.
    """
    inputs = VerifyInputs()
    if config.fixtures is not None:
        inputs = load_inputs(config.fixtures, config.engine)
        config = _with_inputs(config, inputs)
    engine = config.engine
    report = VerifyReport(
        title=f"verify {engine.value} n={config.n} q={config.q} seed={config.seed}",
        engine=engine.value,
        exact=engine is not Engine.WC,
        config=config.model_dump(mode="json"),
        queries=config.q,
    )
    rng = np.random.default_rng(config.seed)
    _notify(progress_callback, f"verify_start:{engine.value}", config.q)
    _VERIFIERS[engine](config, inputs, rng, report, progress_callback)
    report.statistics["error_rate"] = report.error_rate
    report.finish()
    logger.info(f"Verify {engine.value}: {len(report.mismatches)} mismatches over {report.queries} checks, "
                f"status {report.get_status().value}")
    if report.mismatches and not report.exact:
        logger.warning(f"{engine.value} answered {len(report.mismatches)} of {report.queries} checks wrongly")
    return report



# --------------------------------------------------------------------------- #
# gen
# --------------------------------------------------------------------------- #

def run_gen(config: RunConfig, out_dir: Path, progress_callback: ProgressCallback = None) -> list[Path]:
    """
    Write deterministic fixtures: matrix, query vectors, vMv query pairs,
    partial-match corpus and queries, 2-CNF formula, simple graph.
    """
    out_dir = Path(out_dir)
    rng = np.random.default_rng(config.seed)
    n, q, k = config.n, config.q, config.k
    m = min(config.string_length(), n)
    steps = [
        ("matrix.txt", lambda: format_matrix(random_matrix(n, config.density, rng))),
        ("vectors.txt", lambda: format_vectors(vector_workload(config.workload, n, q, rng))),
        ("pairs.txt", lambda: format_query_pairs(pair_workload(config.workload, n, q, rng))),
        ("corpus.txt", lambda: format_corpus(random_patterns(n, m, k, CORPUS_STAR, rng), k)),
        ("queries.txt", lambda: "".join(format_pattern(p, k) + "\n"
                                        for p in random_patterns(q, m, k, QUERY_STAR, rng))),
        ("formula.cnf", lambda: format_cnf(n, random_clauses(n, config.clause_count(), rng))),
        ("graph.txt", lambda: format_matrix(random_graph(n, config.density, rng))),
    ]
    _notify(progress_callback, "gen_start:fixtures", len(steps))
    paths = []
    for name, render in steps:
        paths.append(write_text(out_dir / name, render()))
        _notify(progress_callback, "gen_progress")
    logger.info(f"Generated {len(paths)} fixture files in {out_dir}")
    return paths


# --------------------------------------------------------------------------- #
# bench
# --------------------------------------------------------------------------- #

BENCH_COLUMNS = [
    "engine", "n", "q", "seed", "workload", "build_s", "wall_total_s", "amortized_s",
    "step1", "step2", "step3", "step4", "step5", "step6",
    "z", "extraction_possible", "triples_added", "triples_max_block", "extractions_first_half",
    "extractions_second_half",
    "w_mean", "w_max", "baseline_ratio",
]


@dataclass
class _Timing:
    build: float
    total: float
    counters: dict = field(default_factory=dict)


def _run_engine(engine: Engine, matrix: BitMatrix, vectors: list[BitVector], config: BenchConfig) -> _Timing:
    start = time.perf_counter()
    state = omv_new(matrix, config.vmv, max_workers=config.max_workers) if engine is Engine.OMV else None
    build = time.perf_counter() - start

    half = len(vectors) // 2
    first_half = 0
    start = time.perf_counter()
    for t, v in enumerate(vectors):
        if state is not None:
            if t == half:
                first_half = state.block_stats().extractions
            omv_query(state, v)
        elif engine is Engine.WORD_PARALLEL:
            word_parallel_matvec(matrix, v)
        else:
            naive_matvec(matrix, v)
    total = time.perf_counter() - start

    counters: dict = {}
    if state is not None:
        stats = state.block_stats()
        per_block = [len(s.triples) for row in state.grid for s in row]
        counters = {f"step{k}": stats.step_entries[k] for k in range(1, 7)}
        counters.update({
            "z": state.params.Z,
            "extraction_possible": state.extraction_possible,
            "triples_added": sum(per_block),
            "triples_max_block": max(per_block, default=0),
            "extractions_first_half": first_half,
            "extractions_second_half": stats.extractions - first_half,
            "w_mean": round(float(np.mean(stats.w_sizes)), 3) if stats.w_sizes else 0.0,
            "w_max": max(stats.w_sizes, default=0),
        })
    return _Timing(build, total, counters)


def _median_timing(engine: Engine, matrix: BitMatrix, vectors: list[BitVector], config: BenchConfig) -> _Timing:
    runs = [_run_engine(engine, matrix, vectors, config) for _ in range(config.repetitions)]
    return _Timing(
        statistics.median(r.build for r in runs),
        statistics.median(r.total for r in runs),
        runs[-1].counters,
    )


def _bench_cell(config: BenchConfig, n: int, workload: WorkloadKind, cell: int, cb: ProgressCallback) -> list[dict]:
    rng = np.random.default_rng([config.seed, cell])
    matrix = random_matrix(n, config.density, rng)
    vectors = vector_workload(workload, n, config.q, rng)
    timings = {e: _median_timing(e, matrix, vectors, config) for e in config.engines}
    if Engine.WORD_PARALLEL not in timings:
        timings[Engine.WORD_PARALLEL] = _median_timing(Engine.WORD_PARALLEL, matrix, vectors, config)
    baseline = timings[Engine.WORD_PARALLEL].total / config.q

    rows = []
    for engine in config.engines:
        timing = timings[engine]
        amortized = timing.total / config.q
        row = {col: "" for col in BENCH_COLUMNS}
        row.update({
            "engine": engine.value, "n": n, "q": config.q, "seed": config.seed, "workload": workload.value,
            "build_s": f"{timing.build:.6f}", "wall_total_s": f"{timing.total:.6f}",
            "amortized_s": f"{amortized:.9f}",
            "baseline_ratio": f"{amortized / baseline:.4f}" if baseline > 0 else "",
        })
        row.update(timing.counters)
        rows.append(row)
    _notify(cb, "bench_progress")
    logger.info(f"Bench cell n={n} workload={workload.value} done")
    return rows


def run_bench(config: BenchConfig, out: Optional[Path] = None,
              progress_callback: ProgressCallback = None) -> list[dict]:
    """
    Time each engine over the same query sequence, per (size, workload) cell.

    Wall times are medians over ``config.repetitions`` fresh runs; engine counters
    come from the last run. Cells run on ``config.parallel_cells`` threads and each
    owns its engine states.
    """
    cells = [(n, wl) for n in config.sizes for wl in config.workloads]
    _notify(progress_callback, "bench_start:cells", len(cells))
    if config.parallel_cells > 1:
        with ThreadPoolExecutor(max_workers=config.parallel_cells) as pool:
            futures = [pool.submit(_bench_cell, config, n, wl, i, progress_callback) for i, (n, wl) in enumerate(cells)]
            results = [f.result() for f in futures]
    else:
        results = [_bench_cell(config, n, wl, i, progress_callback) for i, (n, wl) in enumerate(cells)]
    rows = [row for cell_rows in results for row in cell_rows]
    if out is not None:
        write_csv(Path(out), BENCH_SCHEMA, BENCH_COLUMNS, rows)
    return rows


def write_csv(path: Path, schema: str, columns: list[str], rows: list[dict]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(schema + "\n")
            writer = csv.DictWriter(f, fieldnames=columns, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise OSError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


# --------------------------------------------------------------------------- #
# cell-probe sweep
# --------------------------------------------------------------------------- #

SWEEP_COLUMNS = ["n", "w", "rectangles", "mean_probes", "max_probes", "threshold", "fitted_constant",
                 "bound_violations", "fitted_exponent"]


def fit_exponent(ns: list[int], values: list[float]) -> Optional[float]:
    """Least-squares slope of ``log(values)`` against ``log(ns)``; None with fewer than two positive points."""
    points = [(math.log(n), math.log(v)) for n, v in zip(ns, values) if v > 0 and n > 1]
    if len(points) < 2 or len({x for x, _ in points}) < 2:
        return None
    xs, ys = zip(*points)
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def run_cellprobe_sweep(config: SweepConfig, out: Optional[Path] = None,
                        progress_callback: ProgressCallback = None) -> list[dict]:
    """
    Probe counts of the rectangle-list structure over sizes and word sizes.

    Each row aggregates ``config.matrices`` random matrices with ``config.queries``
    random queries each; ``fitted_exponent`` is the log-log slope of mean probes
    against ``n`` for that word size.
    """
    rng = np.random.default_rng(config.seed)
    _notify(progress_callback, "sweep_start:cells", len(config.sizes) * len(config.word_sizes))
    rows = []
    for w in config.word_sizes:
        for n in config.sizes:
            ledger = ProbeLedger(w)
            list_sizes = []
            violations = 0
            for _ in range(config.matrices):
                matrix = random_matrix(n, config.density, rng)
                rects = cp_preprocess(matrix, w, config.n_max)
                list_sizes.append(len(rects.rects))
                for u, v in pair_workload(WorkloadKind.UNIFORM, n, config.queries, rng):
                    _, probes = cp_query(matrix, rects, u, v, ledger)
                    if probes > rects.list_read_cost + rects.threshold:
                        violations += 1
            threshold = probe_threshold(n, w)
            max_probes = max(ledger.history, default=0)
            rows.append({
                "n": n,
                "w": w,
                "rectangles": round(float(np.mean(list_sizes)), 3),
                "mean_probes": round(float(np.mean(ledger.history)), 3),
                "max_probes": max_probes,
                "threshold": round(threshold, 3),
                "fitted_constant": round(max_probes / threshold, 3),
                "bound_violations": violations,
            })
            _notify(progress_callback, "sweep_progress")
        w_rows = [r for r in rows if r["w"] == w]
        exponent = fit_exponent([r["n"] for r in w_rows], [r["mean_probes"] for r in w_rows])
        for r in w_rows:
            r["fitted_exponent"] = "" if exponent is None else round(exponent, 3)
        logger.info(f"Sweep w={w}: fitted exponent {exponent}")
    if out is not None:
        write_csv(Path(out), SWEEP_SCHEMA, SWEEP_COLUMNS, rows)
    return rows
