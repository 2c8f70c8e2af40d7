import json
import logging
import os
import uuid
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import typer
from pydantic import BaseModel
from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text
from typer_config import conf_callback_factory

from omv_tools.reports import ReportStatus, VerifyReport
from omv_tools.ui.typer.i18n import _
from omv_tools.ui.typer.settings import Settings, SettingsManager

logger = logging.getLogger(__name__)


class TyperUtils:
    console = Console()
    logger = logging.getLogger(__name__)
    home = os.path.expanduser("~")

    @staticmethod
    def info(message: str):
        TyperUtils.console.print(f"[blue]:information:[/blue] {message}")
        TyperUtils.logger.info(message)

    @staticmethod
    def warning(message: str):
        TyperUtils.console.print(f"[orange3]:warning:[/orange3] {message}")
        TyperUtils.logger.warning(message)

    @staticmethod
    def error(message: str):
        TyperUtils.console.print(f"[red]:cross_mark:[/red] {message}")
        TyperUtils.logger.error(message)

    @staticmethod
    def fatal(message: str):
        TyperUtils.console.print(f"[red]:skull:[/red] {message}")
        TyperUtils.logger.critical(message)
        raise typer.Exit(code=1)

    @staticmethod
    def debug(message: str):
        if TyperUtils.logger.isEnabledFor(logging.DEBUG):
            TyperUtils.console.print(f"[dim]{message}[/dim]")
        TyperUtils.logger.debug(message)

    @staticmethod
    def success(message: str):
        TyperUtils.console.print(f"[green]:white_check_mark:[/green] {message}")
        TyperUtils.logger.info(message)

    #
    # Config methods
    #

    @staticmethod
    def generate_pydantic_mapping(model: BaseModel,
                                  overrides: Dict[str, Tuple[str, str]] | None = None) -> Dict[str, Tuple[str, str]]:
        """
        Mapping ``{param_name: (section, key)}`` from the sections of a settings model.

        :param model: Settings instance.
        :param overrides: Entries replacing or extending the generated mapping.
        """
        mapping = {}
        for section_name in type(model).model_fields:
            value = getattr(model, section_name)
            if isinstance(value, BaseModel):
                for field_name in type(value).model_fields:
                    mapping[field_name] = (section_name, field_name)
            else:
                mapping[section_name] = (section_name, section_name)

        if overrides:
            mapping.update(overrides)
        return mapping

    @staticmethod
    def dynaconf_loader(file_path: str) -> dict:
        """
        Load settings for ``typer_config``.

        Accepts either the JSON dump of already loaded settings or the path
        ``<settings_dir>/<project>`` of a project (created on first use).
        """
        try:
            return json.loads(file_path)
        except (TypeError, ValueError):
            pass

        path = Path(file_path)
        logger.debug(f"Loading configuration from {path}")
        setting_manager = SettingsManager(settings_dir=path.parent)
        settings = setting_manager.load_settings(path.name, True, True)
        return SettingsManager.to_plain_dict(settings)

    base_conf_callback = conf_callback_factory(dynaconf_loader)

    @staticmethod
    def dynamic_dynaconf_callback(
        ctx,
        param: typer.CallbackParam,
        value: Any,
        override_mapping: dict | None = None,
    ):
        """
        Fill CLI parameters left unset with the active project settings.

        Settings come from ``ctx.obj["settings"]`` when already loaded, otherwise
        from ``<settings_dir>/<project>.toml``.

        :param ctx: Typer/Click context.
        :param param: Parameter associated with the callback.
        :param value: Current value of the processed parameter.
        :param override_mapping: Extra ``{param_name: (section, key)}`` entries.
        :returns: ``value`` unchanged.
        """
        if ctx.obj and ctx.obj.get("settings") is not None:
            settings_dict = SettingsManager.to_plain_dict(ctx.obj["settings"])
            TyperUtils.base_conf_callback(ctx, param, json.dumps(settings_dict, default=str))
        else:
            base_path = ctx.params.get("settings_dir") or "."
            file_path = os.path.join(str(base_path), ctx.params.get("project") or "default")
            TyperUtils.base_conf_callback(ctx, param, file_path)

        settings = ctx.default_map.copy() if ctx.default_map else {}
        settings_model = Settings(**settings)

        if not ctx.obj:
            ctx.obj = dict()
        if ctx.obj.get("settings") is None:
            ctx.obj["settings"] = settings_model

        mapping = TyperUtils.generate_pydantic_mapping(settings_model, override_mapping)
        for param_name in ctx.params:
            if ctx.params[param_name] is None and param_name in mapping:
                section, key = mapping[param_name]
                ctx.params[param_name] = settings[section][key]

        return value

    #
    # Output
    #

    @staticmethod
    def show_table(data: List[dict], title: str, fields: Optional[List[str]] = None):
        """Render a list of dictionaries as a Rich table; ``fields`` selects and orders the columns."""
        if not data:
            TyperUtils.warning(_("Nothing to show."))
            return

        if fields is None:
            fields = list(dict.fromkeys(k for d in data for k in d.keys()))

        table = Table(title=title, show_header=True, header_style="bold cyan")
        for field in fields:
            table.add_column(field)
        for d in data:
            table.add_row(*[str(d.get(field, "")) for field in fields])
        TyperUtils.console.print(table)

    @staticmethod
    def get_default_report_dir() -> Path:
        return Path(TyperUtils.home) / "reports"

    @staticmethod
    def save_report(report: VerifyReport, file_name: Optional[Path] = None) -> Path:
        if file_name is None:
            results_dir = TyperUtils.get_default_report_dir()
            results_dir.mkdir(parents=True, exist_ok=True)
            unique_id = uuid.uuid4().hex[:8]
            file_name = results_dir / f"verify_{report.engine}_{unique_id}_{datetime.now():%Y%m%d_%H%M%S}.yaml"
        report.to_yaml(Path(file_name))
        return Path(file_name)

    @staticmethod
    def display_report(report: VerifyReport, raw: bool = False) -> None:
        """Summary of a verification report: timestamps, counts, audits and status."""
        if raw:
            TyperUtils.console.print(report.to_yaml())
            return

        TyperUtils.console.rule(Text(f"Report: {report.title}"))
        TyperUtils.console.print(Panel.fit(
            f"Start: [green]{report.start_time}[/green]\n"
            f"End:   [green]{report.end_time or 'in progress'}[/green]",
            title="Timestamps",
            border_style="cyan",
        ))

        status = report.get_status()
        stats = {
            "Engine": report.engine,
            "Exact": report.exact,
            "Queries": report.queries,
            "Mismatches": len(report.mismatches),
            "Error rate": f"{report.error_rate:.4f}",
            "Status": status.value,
        }
        table = Table(box=box.SIMPLE_HEAVY)
        table.add_column("Metric", style="bold yellow")
        table.add_column("Value", justify="right", style="bold white")
        for key, value in stats.items():
            style = "white"
            if key == "Status":
                style = "green" if status == ReportStatus.SUCCESS else "red"
            table.add_row(key, f"[{style}]{value}[/{style}]")
        TyperUtils.console.print(table)

        if report.audits:
            audit_table = Table(box=box.SIMPLE)
            audit_table.add_column("Audit", style="bold magenta")
            audit_table.add_column("Result", justify="right")
            audit_table.add_column("Detail")
            for name, audit in report.audits.items():
                result = "[green]pass[/green]" if audit["passed"] else "[red]fail[/red]"
                audit_table.add_row(name, result, audit.get("detail", ""))
            TyperUtils.console.print(Panel.fit(audit_table, title="Invariant audits", border_style="magenta"))

        TyperUtils.console.rule(f"[bold cyan]Report Status: [white]{status.value.upper()}[/white]")
