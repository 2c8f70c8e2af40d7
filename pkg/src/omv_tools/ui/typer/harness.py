from pathlib import Path
from typing import Callable, Optional

from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn

import omv_tools.harness
from omv_tools.harness import BenchConfig, RunConfig, SweepConfig
from omv_tools.reports import VerifyReport
from omv_tools.ui.typer.TyperUtils import TyperUtils


def _run_with_progress(run: Callable, show_progress: bool, *args, **kwargs):
    if not show_progress:
        return run(*args, progress_callback=None, **kwargs)

    with Progress(
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        "[progress.percentage]{task.percentage:>3.0f}%",
        TimeElapsedColumn(),
        console=TyperUtils.console,
    ) as progress:
        tasks = {}

        def on_progress(event: str, count: int):
            """
            Event forms: ``<phase>_start:<label>`` (``count`` is the total)
            and ``<phase>_progress`` (``count`` steps done).
            """
            if "_start:" in event:
                phase, label = event.split("_start:", 1)
                tasks[phase] = progress.add_task(f"{phase.capitalize()} {label}", total=count)
            elif event.endswith("_progress"):
                phase = event[: -len("_progress")]
                if phase in tasks:
                    progress.advance(tasks[phase], count)

        return run(*args, progress_callback=on_progress, **kwargs)


def verify(config: RunConfig, show_progress: bool = True) -> VerifyReport:
    return _run_with_progress(omv_tools.harness.run_verify, show_progress, config)


def gen(config: RunConfig, out_dir: Path, show_progress: bool = True) -> list[Path]:
    return _run_with_progress(omv_tools.harness.run_gen, show_progress, config, out_dir)


def bench(config: BenchConfig, out: Optional[Path], show_progress: bool = True) -> list[dict]:
    return _run_with_progress(omv_tools.harness.run_bench, show_progress, config, out)


def cellprobe_sweep(config: SweepConfig, out: Optional[Path], show_progress: bool = True) -> list[dict]:
    return _run_with_progress(omv_tools.harness.run_cellprobe_sweep, show_progress, config, out)
