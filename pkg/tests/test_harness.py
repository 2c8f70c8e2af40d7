import csv

import pytest

from omv_tools.bitcore import BitMatrix, BitVector
from omv_tools.errors import ConfigurationError, InputError, ScaleError
from omv_tools.fixtures import format_matrix, format_vectors, parse_cnf, parse_corpus, parse_matrix, \
    parse_query_pairs, parse_vectors, read_text, write_text
from omv_tools.harness import (
    BENCH_COLUMNS,
    BENCH_SCHEMA,
    SWEEP_SCHEMA,
    BenchConfig,
    Engine,
    RunConfig,
    SweepConfig,
    fit_exponent,
    load_config,
    run_bench,
    run_cellprobe_sweep,
    run_gen,
    run_verify,
)
from omv_tools.workloads import WorkloadKind


@pytest.mark.parametrize("engine,n", [
    (Engine.NAIVE, 16),
    (Engine.WORD_PARALLEL, 40),
    (Engine.OMV, 40),
    (Engine.VMV, 32),
    (Engine.GRAPH, 24),
    (Engine.CNF, 12),
    (Engine.PM, 32),
    (Engine.CELLPROBE, 8),
    (Engine.CELLPROBE, 16),
])
def test_exact_engines_verify_cleanly(engine, n):
    config = RunConfig(engine=engine, n=n, q=30, seed=5, density=0.1)
    report = run_verify(config)
    assert report.exact
    assert report.mismatches == []
    assert report.failed_audits() == []
    assert report.is_success()
    assert report.statistics["error_rate"] == 0.0
    assert report.end_time is not None


def test_omv_statistics():
    report = run_verify(RunConfig(engine=Engine.OMV, n=25, q=20, density=0.05))
    stats = report.statistics
    assert stats["block_side"] == 5
    assert stats["triples_max_block"] <= stats["z"]
    assert stats["omv"]["queries"] == 20
    assert "block invariants" in report.audits


def test_worst_case_is_not_exact():
    report = run_verify(RunConfig(engine=Engine.WC, n=6, q=40, density=0.05))
    assert not report.exact
    assert report.audits["no insertable query"]["passed"]
    assert report.audits["structure invariants"]["passed"]
    assert report.is_success()
    assert "guessed" in report.statistics
    assert report.statistics["block_side"] == 6
    assert report.queries == 80
    assert report.statistics["vmv_errors"] + report.statistics["omv_errors"] == len(report.mismatches)


def test_worst_case_grid():
    report = run_verify(RunConfig(engine=Engine.WC, n=12, q=20, density=0.0, wc_block=4))
    assert report.mismatches == []
    assert report.statistics["triples"] >= 1
    assert report.statistics["omv_errors"] == 0


def test_worst_case_without_block_is_limited_to_wc_n_max():
    with pytest.raises(ScaleError):
        run_verify(RunConfig(engine=Engine.WC, n=12, q=1))


@pytest.mark.parametrize("n", [16, 20])
def test_cell_grid_beyond_direct_limit(n):
    report = run_verify(RunConfig(engine=Engine.CELLPROBE, n=n, q=6, seed=2, density=0.2))
    assert report.is_success()
    assert report.statistics["direct"] is False
    assert "rectangle list" not in report.audits
    assert report.audits["block rectangle lists"]["passed"]
    assert report.queries == 6


def test_cell_direct_check_runs_up_to_n_max():
    report = run_verify(RunConfig(engine=Engine.CELLPROBE, n=8, q=5, density=0.1))
    assert report.statistics["direct"] is True
    assert report.audits["probe bound"]["passed"]
    assert report.queries == 10


@pytest.mark.parametrize("engine,extra", [
    (Engine.NAIVE, {}),
    (Engine.OMV, {}),
    (Engine.VMV, {}),
    (Engine.GRAPH, {"q": 5}),
    (Engine.CNF, {}),
    (Engine.PM, {}),
    (Engine.CELLPROBE, {}),
    (Engine.WC, {"wc_block": 4}),
])
def test_verify_reads_generated_fixtures(tmp_path, engine, extra):
    run_gen(RunConfig(n=12, q=6, k=3, seed=4, density=0.1), tmp_path)
    report = run_verify(RunConfig(engine=engine, fixtures=tmp_path, **extra))
    assert report.config["n"] == 12
    assert report.config["q"] == (5 if engine is Engine.GRAPH else 6)
    assert report.failed_audits() == []
    if report.exact:
        assert report.mismatches == []


def test_fixture_inputs_replace_generated_ones(tmp_path):
    write_text(tmp_path / "matrix.txt", format_matrix(BitMatrix.identity(5)))
    write_text(tmp_path / "vectors.txt", format_vectors([BitVector.from_string("10100"),
                                                         BitVector.from_string("00001")]))
    report = run_verify(RunConfig(engine=Engine.OMV, n=64, q=100, fixtures=tmp_path))
    assert report.config["n"] == 5
    assert report.queries == 2
    assert report.statistics["omv"]["queries"] == 2
    assert report.is_success()


def test_fixtures_missing_main_input(tmp_path):
    write_text(tmp_path / "matrix.txt", format_matrix(BitMatrix.zeros(4)))
    with pytest.raises(InputError):
        run_verify(RunConfig(engine=Engine.CNF, fixtures=tmp_path))
    with pytest.raises(InputError):
        run_verify(RunConfig(engine=Engine.GRAPH, fixtures=tmp_path))


def test_fixtures_with_bad_shapes(tmp_path):
    write_text(tmp_path / "matrix.txt", "2 3\n000\n010\n")
    with pytest.raises(InputError):
        run_verify(RunConfig(engine=Engine.NAIVE, fixtures=tmp_path))
    write_text(tmp_path / "matrix.txt", format_matrix(BitMatrix.zeros(4)))
    write_text(tmp_path / "vectors.txt", "01\n")
    with pytest.raises(InputError):
        run_verify(RunConfig(engine=Engine.NAIVE, fixtures=tmp_path))


def test_progress_events():
    events = []
    run_verify(RunConfig(engine=Engine.NAIVE, n=8, q=5), progress_callback=lambda e, c: events.append((e, c)))
    assert events[0] == ("verify_start:naive", 5)
    assert events.count(("verify_progress", 1)) == 5


def test_load_config_errors():
    with pytest.raises(ConfigurationError):
        load_config(RunConfig, {"n": 0})
    with pytest.raises(ConfigurationError):
        load_config(BenchConfig, {"engines": ["vmv"]})
    assert load_config(RunConfig, {"engine": "pm"}).engine is Engine.PM


def test_string_length_and_clause_count():
    assert RunConfig(n=64).string_length() == 16
    assert RunConfig(n=2).string_length() == 1
    assert RunConfig(n=10, m=3).clause_count() == 3
    assert RunConfig(n=10).clause_count() == 20


def test_gen_writes_parseable_fixtures(tmp_path):
    config = RunConfig(n=12, q=7, k=3, seed=9)
    paths = run_gen(config, tmp_path)
    assert [p.name for p in paths] == ["matrix.txt", "vectors.txt", "pairs.txt", "corpus.txt", "queries.txt",
                                       "formula.cnf", "graph.txt"]
    assert parse_matrix(read_text(tmp_path / "matrix.txt")).shape == (12, 12)
    assert len(parse_vectors(read_text(tmp_path / "vectors.txt"), 12)) == 7
    assert len(parse_query_pairs(read_text(tmp_path / "pairs.txt"), 12)) == 7
    strings, m, k = parse_corpus(read_text(tmp_path / "corpus.txt"))
    assert (len(strings), m, k) == (12, 3, 3)
    n_vars, clauses = parse_cnf(read_text(tmp_path / "formula.cnf"))
    assert n_vars == 12 and len(clauses) == 24
    graph = parse_matrix(read_text(tmp_path / "graph.txt")).to_array()
    assert (graph == graph.T).all()
    assert not graph.diagonal().any()


def test_gen_is_deterministic(tmp_path):
    config = RunConfig(n=10, q=4, seed=3)
    first = [p.read_text() for p in run_gen(config, tmp_path / "a")]
    second = [p.read_text() for p in run_gen(config, tmp_path / "b")]
    assert first == second


def test_gen_zero_density(tmp_path):
    run_gen(RunConfig(n=6, q=2, density=0.0), tmp_path)
    assert parse_matrix(read_text(tmp_path / "matrix.txt")) == BitMatrix.zeros(6)


def test_bench_rows_and_csv(tmp_path):
    config = BenchConfig(sizes=[16], workloads=[WorkloadKind.UNIFORM, WorkloadKind.BASIS], q=8, repetitions=1)
    out = tmp_path / "bench.csv"
    rows = run_bench(config, out)
    assert len(rows) == 2 * 3
    omv_rows = [r for r in rows if r["engine"] == "omv"]
    assert all(r["triples_max_block"] <= r["z"] for r in omv_rows)
    assert all(r["extractions_first_half"] + r["extractions_second_half"] == r["triples_added"] for r in omv_rows)

    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == BENCH_SCHEMA
    assert next(csv.reader([lines[1]])) == BENCH_COLUMNS
    assert len(lines) == 2 + len(rows)


def test_bench_parallel_cells_match_serial():
    base = dict(engines=[Engine.OMV], sizes=[9, 16], q=4, repetitions=1)
    serial = run_bench(BenchConfig(**base))
    parallel = run_bench(BenchConfig(**base, parallel_cells=2))
    keys = ("n", "workload", "triples_added", "step5")
    assert [tuple(r[k] for k in keys) for r in serial] == [tuple(r[k] for k in keys) for r in parallel]


def test_fit_exponent():
    assert fit_exponent([2, 4, 8], [4, 16, 64]) == pytest.approx(2.0)
    assert fit_exponent([4], [3.0]) is None
    assert fit_exponent([4, 8], [0, 0]) is None


def test_cell_sweep_csv(tmp_path):
    config = SweepConfig(sizes=[4, 6], word_sizes=[2, 4], matrices=2, queries=20)
    out = tmp_path / "cp.csv"
    rows = run_cellprobe_sweep(config, out)
    assert len(rows) == 4
    assert all(r["bound_violations"] == 0 for r in rows)
    assert out.read_text(encoding="utf-8").splitlines()[0] == SWEEP_SCHEMA


def test_gen_half_density_population(tmp_path):
    run_gen(RunConfig(n=256, q=1, density=0.5, seed=1), tmp_path)
    ones = parse_matrix(read_text(tmp_path / "matrix.txt")).popcount()
    sigma = (256 * 256 * 0.25) ** 0.5
    assert abs(ones - 256 * 256 / 2) <= 3 * sigma


def test_bench_reports_whether_blocks_can_extract():
    rows = run_bench(BenchConfig(engines=[Engine.OMV, Engine.NAIVE], sizes=[16], q=4, repetitions=1))
    omv_row, naive_row = rows
    assert omv_row["z"] == 2
    assert omv_row["extraction_possible"] is False
    assert omv_row["triples_added"] == 0
    assert naive_row["extraction_possible"] == ""
