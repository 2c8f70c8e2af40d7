"""
Command-line entry point of omv-tools.

Initializes localization, logging and project settings, and registers the
command groups.

Subcommands:
    - ``config``: Manage project settings files.
    - ``gen``: Write deterministic fixtures (matrices, vectors, corpora, formulas).
    - ``verify``: Run an engine against its oracle and write a YAML report.
    - ``bench``: Time the matrix-vector engines and write a CSV.
    - ``cellprobe-sweep``: Probe counts of the cell-probe structure, as CSV.

Example:
    .. code-block:: console

        $ omv-tools --help
        $ omv-tools verify --engine omv --n 64 --q 1000 --seed 7
        $ omv-tools config set ENGINE.delta 1.5
"""
import locale
import os
import sys

from omv_tools.ui.typer.i18n import _, setup_locale

locales_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "locales")
setup_locale(locale.getlocale()[0] or "en_GB", locales_dir)

from importlib.metadata import PackageNotFoundError, version as package_version  # noqa: E402
from pathlib import Path  # noqa: E402
from typing import Any, Optional  # noqa: E402

import typer  # noqa: E402
from typing_extensions import Annotated  # noqa: E402

from omv_tools.ui.typer.commands import config, engine  # noqa: E402
from omv_tools.ui.typer.logger import logger, setup_logging  # noqa: E402
from omv_tools.ui.typer.settings import SettingsManager  # noqa: E402
from omv_tools.ui.typer.TyperUtils import TyperUtils  # noqa: E402

APP_NAME = "omv-tools"

try:
    __version__ = package_version(APP_NAME)
except PackageNotFoundError:
    __version__ = "0.0.0"

app = typer.Typer(help=_("Online Boolean matrix-vector multiplication toolkit"), invoke_without_command=True)
app.add_typer(config.app, name="config")
engine.register(app)


def make_dynaconf_callback(override_mapping: dict | None = None):
    def callback(ctx, param: typer.CallbackParam, value: Any):
        return TyperUtils.dynamic_dynaconf_callback(ctx, param, value, override_mapping=override_mapping)
    return callback


override_mapping = {
    "verbosity": ("LOGGER", "loglevel"),
    "log_file": ("LOGGER", "filename"),
}

callback_with_override = make_dynaconf_callback(override_mapping)


@app.callback()
def main_callback(
    ctx: typer.Context,
    version: Annotated[Optional[bool], typer.Option(help=_("Show program's version number and exit"))] = None,
    verbosity: Annotated[Optional[int], typer.Option(help=_("Logger level: 0 (warning), 1 (info), 2 (debug)."))] = None,
    log_file: Annotated[Optional[Path], typer.Option("--logfile", help=_("Path to the log file"))] = None,
    settings_dir: Annotated[
        Optional[Path],
        typer.Option("--settings-dir", help=_("Directory containing settings files")),
    ] = Path(typer.get_app_dir(APP_NAME)),
    project: Annotated[Optional[str], typer.Option("--project", help=_("Project name for settings"))] = "default",
    config: Annotated[Path, typer.Option(hidden=True, callback=callback_with_override)] = None,
):
    """
    Load the project settings, configure logging and prepare ``ctx.obj`` for subcommands.

    :param verbosity: Logging level (0=WARNING, 1=INFO, 2=DEBUG); defaults to ``LOGGER.loglevel``.
    :param log_file: Log file; defaults to ``LOGGER.filename`` (empty logs to the console).
    :param settings_dir: Directory where settings files are stored.
    :param project: Name of the active project.
    :param config: Hidden parameter used by the settings callback.
    """
    if version:
        prog = os.path.basename(sys.argv[0])
        TyperUtils.console.print(f"{prog} {__version__}")
        raise typer.Exit()

    settings = ctx.obj["settings"]
    setup_logging("omv_tools", verbosity, Path(log_file) if log_file else None)

    TyperUtils.home = Path(settings_dir)

    ctx.obj = {
        "setting_manager": SettingsManager(settings_dir=Path(settings_dir)),
        "settings": settings,
        "logger": logger,
        "_": _,
        "project": project,
    }


if __name__ == "__main__":
    app()
