"""
Engine commands: fixture generation, oracle verification, benchmarks and the
cell-probe sweep.

Exit codes: ``0`` success, ``1`` mismatch or invariant failure, ``2`` usage error.
Engine constants left unset on the command line come from the project settings
(``ENGINE``, ``CELLPROBE`` and ``BENCH`` sections).
"""
import logging
from pathlib import Path
from typing import Any, List, Optional

import typer
from pydantic import ValidationError
from typing_extensions import Annotated

import omv_tools.ui.typer.harness as harness_ui
from omv_tools.errors import ConfigurationError, ContractViolation, InputError, InvariantViolation, ScaleError
from omv_tools.harness import BENCH_ENGINES, BenchConfig, Engine, RunConfig, SweepConfig, load_config
from omv_tools.reports import VerifyReport
from omv_tools.ui.typer.i18n import _
from omv_tools.ui.typer.settings import Settings
from omv_tools.ui.typer.TyperUtils import TyperUtils
from omv_tools.workloads import WorkloadKind

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ConfigurationError, ContractViolation, InputError, ScaleError, ValidationError)


def make_dynaconf_callback(override_mapping: dict | None = None):
    def callback(ctx, param: typer.CallbackParam, value: Any):
        return TyperUtils.dynamic_dynaconf_callback(ctx, param, value, override_mapping=override_mapping)
    return callback


override_mapping = {
    "output_dir": ("BENCH", "output_dir"),
}

callback_with_override = make_dynaconf_callback(override_mapping)

ConfigOption = Annotated[Path, typer.Option(hidden=True, callback=callback_with_override)]
SeedOption = Annotated[Optional[int], typer.Option(help=_("Random seed (default: ENGINE.seed)"))]
DeltaOption = Annotated[Optional[float], typer.Option(help=_("Extraction budget exponent scale"))]
EpsilonOption = Annotated[Optional[float], typer.Option(help=_("Group size exponent, 0 < epsilon <= 1"))]
COption = Annotated[Optional[float], typer.Option("--c", help=_("Sparsity bound constant"))]
WorkersOption = Annotated[Optional[int], typer.Option(help=_("Threads for block rows"))]
ProgressOption = Annotated[bool, typer.Option(help=_("Show progress bars"))]


def _settings(ctx: typer.Context) -> Settings:
    settings = ctx.obj.get("settings") if ctx.obj else None
    return settings if settings is not None else Settings()


def _vmv_config(ctx: typer.Context, delta, epsilon, c, seed, debug_checks=None):
    return _settings(ctx).ENGINE.to_vmv_config(delta=delta, epsilon=epsilon, c=c, seed=seed,
                                                debug_checks=debug_checks)


def _run(action, *args, **kwargs):
    """Call ``action`` mapping invalid input to exit code 2 and internal failures to 1."""
    try:
        return action(*args, **kwargs)
    except USAGE_ERRORS as e:
        raise typer.BadParameter(str(e))
    except InvariantViolation as e:
        TyperUtils.fatal(_(f"Invariant violated: {e}"))
    except OSError as e:
        TyperUtils.fatal(_(f"I/O error: {e}"))


def _show_report(report: VerifyReport, output: Optional[Path] = None, raw: bool = False) -> None:
    """Save the report as YAML, display it and exit with 1 when it failed."""
    output = TyperUtils.save_report(report, output)
    TyperUtils.display_report(report, raw=raw)
    if report.is_success():
        TyperUtils.success(_(f"Verification completed. Review the report for details {output}."))
    else:
        TyperUtils.console.print(report.summary())
        TyperUtils.fatal(_(f"Verification failed. Review the report for details {output}."))


def gen(
    ctx: typer.Context,
    n: Annotated[int, typer.Option(help=_("Matrix side, corpus size and variable count"))] = 64,
    m: Annotated[Optional[int], typer.Option(help=_("String length (corpus) and clause count (formula)"))] = None,
    k: Annotated[int, typer.Option(help=_("Alphabet size"))] = 4,
    q: Annotated[int, typer.Option(help=_("Number of queries"))] = 100,
    seed: SeedOption = None,
    density: Annotated[float, typer.Option(help=_("Probability of a 1-entry"))] = 0.5,
    workload: Annotated[WorkloadKind, typer.Option(help=_("Query sequence kind"))] = WorkloadKind.MIXED,
    out: Annotated[Path, typer.Option(help=_("Output directory"), file_okay=False)] = Path("fixtures"),
    progress: ProgressOption = True,
    config: ConfigOption = None,
):
    data = {"n": n, "m": m, "k": k, "q": q, "seed": seed, "density": density, "workload": workload}
    config_model = _run(load_config, RunConfig, {k_: v for k_, v in data.items() if v is not None})
    paths = _run(harness_ui.gen, config_model, out, show_progress=progress)
    for path in paths:
        TyperUtils.info(_(f"Wrote {path}"))
    TyperUtils.success(_(f"Generated {len(paths)} fixture files in {out}"))


def verify(
    ctx: typer.Context,
    engine: Annotated[Engine, typer.Option(help=_("Engine to check against its oracle"))] = Engine.OMV,
    n: Annotated[int, typer.Option(help=_("Matrix side (pm: corpus size, cnf: variables)"))] = 64,
    m: Annotated[Optional[int], typer.Option(help=_("String length (pm) or clause count (cnf)"))] = None,
    k: Annotated[int, typer.Option(help=_("Alphabet size (pm)"))] = 4,
    q: Annotated[int, typer.Option(help=_("Number of queries"))] = 100,
    seed: SeedOption = None,
    density: Annotated[float, typer.Option(help=_("Probability of a 1-entry or an edge"))] = 0.5,
    workload: Annotated[WorkloadKind, typer.Option(help=_("Query sequence kind"))] = WorkloadKind.MIXED,
    delta: DeltaOption = None,
    epsilon: EpsilonOption = None,
    c: COption = None,
    word_size: Annotated[Optional[int], typer.Option(help=_("Cell size in bits (cellprobe)"))] = None,
    max_workers: WorkersOption = None,
    debug_checks: Annotated[Optional[bool], typer.Option(help=_("Audit after every extraction"))] = None,
    wc_block: Annotated[Optional[int], typer.Option(help=_("Block side of the partitioned worst-case engine"))] = None,
    fixtures: Annotated[Optional[Path], typer.Option(
        help=_("Read inputs from a directory written by gen; sizes and query count follow the files"),
        exists=True, file_okay=False)] = None,
    out: Annotated[Optional[Path], typer.Option(help=_("Report file (YAML)"))] = None,
    raw: Annotated[bool, typer.Option(help=_("Print the raw YAML report"))] = False,
    progress: ProgressOption = True,
    config: ConfigOption = None,
):
    settings = _settings(ctx)
    data = {
        "engine": engine, "n": n, "m": m, "k": k, "q": q, "seed": seed, "density": density, "workload": workload,
        "vmv": _run(_vmv_config, ctx, delta, epsilon, c, seed, debug_checks),
        "word_size": word_size, "max_workers": max_workers,
        "n_max": settings.CELLPROBE.n_max, "wc_n_max": settings.CELLPROBE.wc_n_max,
        "wc_block": wc_block or None, "fixtures": fixtures,
    }
    config_model = _run(load_config, RunConfig, {k_: v for k_, v in data.items() if v is not None})
    source = f"fixtures {fixtures}" if fixtures else f"n={n}, q={q}"
    TyperUtils.info(_(f"Verifying {engine.value}: {source}, seed={config_model.seed}"))
    report = _run(harness_ui.verify, config_model, show_progress=progress)
    _show_report(report, out, raw)


def bench(
    ctx: typer.Context,
    engines: Annotated[Optional[List[Engine]], typer.Option("--engine", help=_("Engines to time (repeatable)"))] = None,
    sizes: Annotated[Optional[List[int]], typer.Option("--n", help=_("Matrix sides (repeatable)"))] = None,
    workloads: Annotated[Optional[List[WorkloadKind]], typer.Option("--workload", help=_("Query kinds"))] = None,
    q: Annotated[int, typer.Option(help=_("Queries per run"))] = 256,
    seed: SeedOption = None,
    density: Annotated[float, typer.Option(help=_("Probability of a 1-entry"))] = 0.5,
    delta: DeltaOption = None,
    epsilon: EpsilonOption = None,
    c: COption = None,
    repetitions: Annotated[Optional[int], typer.Option(help=_("Runs per cell; wall times are medians"))] = None,
    max_workers: WorkersOption = None,
    parallel_cells: Annotated[int, typer.Option(help=_("Benchmark cells run in parallel"))] = 1,
    output_dir: Annotated[Optional[Path], typer.Option(hidden=True)] = None,
    out: Annotated[Optional[Path], typer.Option(help=_("CSV file (default: BENCH.output_dir/bench.csv)"))] = None,
    progress: ProgressOption = True,
    config: ConfigOption = None,
):
    data = {
        "engines": list(engines) if engines else list(BENCH_ENGINES),
        "sizes": list(sizes) if sizes else [256],
        "workloads": list(workloads) if workloads else [WorkloadKind.UNIFORM],
        "q": q, "seed": seed, "density": density, "repetitions": repetitions, "max_workers": max_workers,
        "parallel_cells": parallel_cells,
        "vmv": _run(_vmv_config, ctx, delta, epsilon, c, seed),
    }
    config_model = _run(load_config, BenchConfig, {k_: v for k_, v in data.items() if v is not None})
    out = out or Path(output_dir or ".") / "bench.csv"
    rows = _run(harness_ui.bench, config_model, out, show_progress=progress)
    TyperUtils.show_table(rows, _("Benchmark"), ["engine", "n", "workload", "amortized_s", "step5",
                                                 "triples_added", "baseline_ratio"])
    TyperUtils.success(_(f"Wrote {len(rows)} rows to {out}"))


def cellprobe_sweep(
    ctx: typer.Context,
    sizes: Annotated[Optional[List[int]], typer.Option("--n", help=_("Matrix sides (repeatable)"))] = None,
    word_sizes: Annotated[Optional[List[int]], typer.Option("--word-size", help=_("Cell sizes (repeatable)"))] = None,
    matrices: Annotated[int, typer.Option(help=_("Random matrices per cell"))] = 5,
    q: Annotated[int, typer.Option(help=_("Queries per matrix"))] = 200,
    density: Annotated[float, typer.Option(help=_("Probability of a 1-entry"))] = 0.05,
    seed: SeedOption = None,
    n_max: Annotated[Optional[int], typer.Option(help=_("Largest side for the exhaustive search"))] = None,
    output_dir: Annotated[Optional[Path], typer.Option(hidden=True)] = None,
    out: Annotated[Optional[Path], typer.Option(help=_("CSV file (default: BENCH.output_dir/cellprobe.csv)"))] = None,
    progress: ProgressOption = True,
    config: ConfigOption = None,
):
    data = {
        "sizes": list(sizes) if sizes else [4, 6, 8, 10, 12],
        "word_sizes": list(word_sizes) if word_sizes else [2, 4, 8],
        "matrices": matrices, "queries": q, "density": density, "seed": seed, "n_max": n_max,
    }
    config_model = _run(load_config, SweepConfig, {k_: v for k_, v in data.items() if v is not None})
    out = out or Path(output_dir or ".") / "cellprobe.csv"
    rows = _run(harness_ui.cellprobe_sweep, config_model, out, show_progress=progress)
    TyperUtils.show_table(rows, _("Cell-probe sweep"))
    violations = sum(r["bound_violations"] for r in rows)
    if violations:
        TyperUtils.fatal(_(f"{violations} queries exceeded the probe bound. See {out}"))
    TyperUtils.success(_(f"Wrote {len(rows)} rows to {out}"))


def register(app: typer.Typer) -> None:
    app.command(help=_("Write deterministic fixture files"), short_help=_("Generate fixtures"))(gen)
    app.command(help=_("Run an engine and its oracle on identical inputs and report mismatches and audits"),
                short_help=_("Verify an engine against its oracle"))(verify)
    app.command(help=_("Time matrix-vector engines over query sequences and write a CSV"),
                short_help=_("Benchmark engines"))(bench)
    app.command("cellprobe-sweep", help=_("Probe counts of the cell-probe structure over n and w, as CSV"),
                short_help=_("Cell-probe sweep"))(cellprobe_sweep)
