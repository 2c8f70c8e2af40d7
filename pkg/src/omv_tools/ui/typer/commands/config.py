"""
Project settings commands.

Commands:
    - **init**: Create the settings file of the active project.
    - **show**: Validate and display the active project settings.
    - **list**: List the existing projects.
    - **get**: Display one parameter (``SECTION.key``).
    - **set**: Update one parameter; the new settings are validated before saving.
"""
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError
from typing_extensions import Annotated

from omv_tools.ui.typer.i18n import _
from omv_tools.ui.typer.settings import SettingsManager
from omv_tools.ui.typer.TyperUtils import TyperUtils

app = typer.Typer(
    help=_("Manage project configurations"),
    short_help=_("Manage project configurations"),
)


@app.command(help=_("Initialize a new project configuration"), short_help=_("Initialize a new project configuration"))
def init(
    ctx: typer.Context,
    template: Annotated[Optional[Path], typer.Option(help=_("Path to custom settings template"))] = None,
    env_file: Annotated[Optional[bool], typer.Option(help=_("Load .env file with environment variables"))] = False,
):
    settings_manager: SettingsManager = ctx.obj.get("setting_manager")
    project_name = str(ctx.obj.get("project", "default"))

    try:
        settings_file = settings_manager.create_project_settings(project_name, template, env_file=env_file)
    except (FileNotFoundError, ValidationError) as e:
        TyperUtils.fatal(_(f"Could not create settings for project '{project_name}': {e}"))
    TyperUtils.success(_(f"Created project settings at: {settings_file}"))


@app.command(help=_("Validate and show current project settings"),
             short_help=_("Validate and show current project settings"))
def show(ctx: typer.Context):
    settings_manager: SettingsManager = ctx.obj.get("setting_manager")
    project_name = str(ctx.obj.get("project", "default"))

    try:
        settings = settings_manager.load_settings(project_name, validate=True)
    except ValidationError as e:
        TyperUtils.fatal(_(f"Settings validation error: {e}"))

    TyperUtils.console.print(f"\nSettings for project '{project_name}':")
    TyperUtils.console.print(settings_manager.settings_to_string(settings))


@app.command("list", help=_("List all available project configurations"),
             short_help=_("List all available project configurations"))
def list_projects(ctx: typer.Context):
    settings_manager: SettingsManager = ctx.obj.get("setting_manager")

    projects = settings_manager.list_projects()
    if not projects:
        TyperUtils.info(_("No project configurations found"))
        return
    TyperUtils.console.print(_("\nAvailable project configurations:"))
    for project in projects:
        TyperUtils.console.print(f"- {project}")


@app.command(help=_("Show the value of a specific project configuration setting"),
             short_help=_("Display a project setting"))
def get(
    ctx: typer.Context,
    param: Annotated[str, typer.Argument(help=_("Parameter to get in the format 'SECTION.key'"))],
):
    settings_manager: SettingsManager = ctx.obj.get("setting_manager")
    project_name = str(ctx.obj.get("project", "default"))

    try:
        value = settings_manager.get_param(project_name, param)
    except (KeyError, ValueError) as e:
        TyperUtils.fatal(_(f"Failed to get parameter '{param}': {e}"))
    TyperUtils.console.print(f"{param} = {value}")


@app.command("set", help=_("Set or update the value of a specific project setting parameter"),
             short_help=_("Set a project setting"))
def set_param(
    ctx: typer.Context,
    param_name: Annotated[str, typer.Argument(help=_("Parameter to set in the format 'SECTION.key'"))],
    param_value: Annotated[str, typer.Argument(help=_("Value to set"))],
):
    settings_manager: SettingsManager = ctx.obj.get("setting_manager")
    project_name = str(ctx.obj.get("project", "default"))

    try:
        settings_manager.set_param(project_name, param_name, param_value)
    except ValueError as e:
        TyperUtils.fatal(_(f"Settings validation error: {e}"))
    TyperUtils.success(_(f"Settings {param_name} updated to {param_value} for project '{project_name}'"))
