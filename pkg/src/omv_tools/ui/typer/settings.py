"""
Project settings management.

Settings live in one TOML file per project (default location ``~/.omv-tools``),
loaded with `Dynaconf` and validated with `Pydantic`. Sections:

- ``LOGGER``: verbosity and optional log file.
- ``ENGINE``: vMv/OMV tuning constants and the thread pool width.
- ``CELLPROBE``: word size and exhaustive-search limits of the cell-probe tools.
- ``BENCH``: benchmark repetitions and output directory.

Example:
    .. code-block:: python

        from omv_tools.ui.typer.settings import SettingsManager

        sm = SettingsManager()
        sm.create_project_settings("experiments")
        settings = sm.load_settings("experiments", validate=True)
        print(settings.ENGINE.delta)
"""

import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Union, get_args, get_origin

from dynaconf import Dynaconf
from dynaconf import loaders
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from omv_tools.vmv import VmvConfig


class LoggerSettings(BaseModel):
    loglevel: int = Field(default=1, ge=0, le=2)
    filename: str = Field(
        default="",
        description="Empty string or string ending in .log",
        pattern=r"(^$|^.*\.log$)",
    )


class EngineSettings(BaseModel):
    delta: float = Field(default=1.0, gt=0)
    epsilon: float = Field(default=0.5, gt=0, le=1)
    c: float = Field(default=8.0, gt=0)
    seed: int = Field(default=0, ge=0)
    y: int = Field(default=0, ge=0, description="Dense-check samples; 0 uses the size-dependent default")
    z: int = Field(default=0, ge=0, description="Extraction budget; 0 uses the size-dependent default")
    debug_checks: bool = Field(default=False)
    max_workers: int = Field(default=1, ge=1)

    def to_vmv_config(self, **overrides: Any) -> VmvConfig:
        data = {
            "delta": self.delta,
            "epsilon": self.epsilon,
            "c": self.c,
            "seed": self.seed,
            "y": self.y or None,
            "z": self.z or None,
            "debug_checks": self.debug_checks,
        }
        data.update({k: v for k, v in overrides.items() if v is not None})
        return VmvConfig(**data)


class CellProbeSettings(BaseModel):
    word_size: int = Field(default=4, ge=1)
    n_max: int = Field(default=12, ge=1)
    wc_n_max: int = Field(default=8, ge=1)
    wc_block: int = Field(default=0, ge=0, description="Block side of the partitioned worst-case variant; 0 disables")


class BenchSettings(BaseModel):
    repetitions: int = Field(default=5, ge=1)
    output_dir: str = Field(default="", description="Directory for CSV output; empty for the working directory")


class Settings(BaseModel):
    LOGGER: LoggerSettings = Field(default_factory=LoggerSettings)
    ENGINE: EngineSettings = Field(default_factory=EngineSettings)
    CELLPROBE: CellProbeSettings = Field(default_factory=CellProbeSettings)
    BENCH: BenchSettings = Field(default_factory=BenchSettings)


class SettingsManager:
    """
    Manages omv-tools configuration files across multiple projects.

    :param settings_dir: Directory where settings files are stored. Defaults to ``~/.omv-tools``.
    :type settings_dir: Optional[Path]
    """

    def __init__(self, settings_dir: Optional[Path] = None):
        self.settings_dir = Path(settings_dir) if settings_dir else Path.home() / ".omv-tools"
        self.settings_dir.mkdir(parents=True, exist_ok=True)
        self.SETTINGS_ORDER = SettingsManager._generate_settings_order()

    def create_project_settings(
        self,
        project_name: str,
        template: Optional[Path] = None,
        env_file: bool = False,
        validate: bool = True,
    ) -> Path:
        """
        Create a project configuration file from a TOML template.

        :param project_name: Name of the project.
        :param template: Custom template file. Defaults to the built-in defaults.
        :param env_file: Whether Dynaconf loads a ``.env`` file.
        :raises FileNotFoundError: If the template file does not exist.
        :return: Path to the new settings file.
        """
        settings_file = self.get_settings_path(project_name)
        template = template or self._default_template_file()

        if not template.exists():
            raise FileNotFoundError(f"Settings template not found: {template}")

        settings = Dynaconf(
            settings_files=[str(template)],
            load_dotenv=env_file,
            envvar_prefix=False,
            ignore_unknown_envvars=True,
        )

        settings_model = SettingsManager.load_from_dict(settings.to_dict(), validate)
        self.export_settings(settings_model, settings_file)
        return settings_file

    def load_settings(self, project_name: str, validate: bool = True, create: bool = True) -> Settings:
        """
        Load the settings of a project.

        :param create: Create the settings file from defaults if it does not exist.
        :raises FileNotFoundError: If the file does not exist and ``create`` is False.
        """
        settings_file = self.get_settings_path(project_name)

        if not settings_file.exists() and create:
            settings_file = self.create_project_settings(project_name)
        elif not settings_file.exists():
            raise FileNotFoundError(f"Settings file not found: {settings_file}")

        settings = Dynaconf(settings_files=[str(settings_file)])
        return self.load_from_dict(settings.to_dict(), validate)

    def list_projects(self) -> list[str]:
        return sorted(f.stem for f in self.settings_dir.glob("*.toml"))

    def get_settings_path(self, project_name: str) -> Path:
        return self.settings_dir / f"{project_name}.toml"

    def _ordered(self, current: dict) -> dict:
        ordered: dict = {}
        for group in self.SETTINGS_ORDER:
            ordered[group] = {}
            for key in self.SETTINGS_ORDER[group]:
                if group in current and key in current[group]:
                    ordered[group][key] = current[group][key]
        return ordered

    def export_settings(self, settings_data: Settings, setting_path: Path) -> None:
        """Write ``settings_data`` to a TOML file, sections and keys in model order."""
        path = Path(setting_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        ordered = self._ordered(SettingsManager.to_plain_dict(settings_data))
        loaders.toml_loader.write(str(path), ordered, merge=False)

    def settings_to_string(self, settings_data: Settings) -> str:
        """Render settings as TOML-like text, in model order."""
        ordered = self._ordered(settings_data.model_dump())

        def format_value(value):
            if isinstance(value, (str, Path)):
                return f'"{value}"'
            if isinstance(value, bool):
                return str(value).lower()
            return value

        lines = []
        for group, values in ordered.items():
            lines.append(f"[{group}]")
            for key, value in values.items():
                lines.append(f"{key} = {format_value(value)}")
            lines.append("")
        return "\n".join(lines)

    def get_param(self, project_name: str, param: str):
        """
        Value of ``SECTION.KEY`` (e.g. ``ENGINE.delta``).

        :raises ValueError: On a malformed or unknown parameter.
        """
        settings = self.load_settings(project_name)
        section, key = self._split_param(param)
        self._get_section_model(settings, section, key)
        return settings.model_dump()[section][key]

    def _split_param(self, param: str) -> tuple[str, str]:
        try:
            section, key = param.split(".", 1)
        except ValueError:
            raise ValueError("Parameter must have format SECTION.KEY (e.g., ENGINE.delta)")
        return section, key

    def _get_section_model(self, settings: Settings, section: str, key: str):
        if section not in Settings.model_fields:
            raise ValueError(f"Invalid section: {section}")
        section_model = getattr(settings, section)
        if key not in type(section_model).model_fields:
            raise ValueError(f"Invalid parameter: {section}.{key}")
        return section_model

    def _parse_value(self, section_model: BaseModel, key: str, value: Any):
        field_info = type(section_model).model_fields[key]
        adapter = TypeAdapter(field_info.annotation)
        try:
            return adapter.validate_python(value)
        except ValidationError as e:
            raise ValueError(f"Invalid value for {section_model.__class__.__name__}.{key}: {e}")

    def set_param(self, project_name: str, param: str, value, validate: bool = True) -> Settings:
        """
        Assign a new value to ``SECTION.KEY``; the whole settings model is validated before saving.
        """
        return self.update_settings(project_name, {param: value}, validate)

    def update_settings(self, project_name: str, updates: Dict[str, Any], validate: bool = True) -> Settings:
        """Apply multiple ``SECTION.KEY`` updates in one pass."""
        settings_file = self.get_settings_path(project_name)
        new_settings: Settings = self.load_settings(project_name)

        for param, value in updates.items():
            section, key = self._split_param(param)
            section_model = self._get_section_model(new_settings, section, key)
            parsed_value = self._parse_value(section_model, key, value)
            updated_section = section_model.model_copy(update={key: parsed_value})
            new_settings = new_settings.model_copy(update={section: updated_section})

        if validate:
            try:
                new_settings = Settings.model_validate(new_settings.model_dump())
            except ValidationError as e:
                raise ValueError(f"Invalid settings: {e}")

        self.export_settings(new_settings, settings_file)
        return new_settings

    @staticmethod
    def load_from_dict(settings: dict, validate: bool = True) -> Settings:
        """
        Build a :class:`Settings` object from a dictionary.

        :param validate: Validate with Pydantic; otherwise construct without validation.
        """
        if validate:
            return Settings.model_validate(settings)
        return SettingsManager._construct_recursive(Settings, settings)

    @staticmethod
    def to_plain_dict(settings: Any) -> Any:
        """Recursively convert models and paths to plain Python values."""
        if isinstance(settings, Path):
            return str(settings)
        if isinstance(settings, BaseModel):
            raw = settings.model_dump(mode="python")
            return {k: SettingsManager.to_plain_dict(v) for k, v in raw.items()}
        if isinstance(settings, dict):
            return {k: SettingsManager.to_plain_dict(v) for k, v in settings.items()}
        if isinstance(settings, list):
            return [SettingsManager.to_plain_dict(v) for v in settings]
        return settings

    @staticmethod
    def _generate_settings_order() -> Dict[str, List[str]]:
        """Section and key order taken from the model definitions."""
        order: Dict[str, List[str]] = {}
        for top_name, field_info in Settings.model_fields.items():
            submodel = _unwrap_model(field_info.annotation)
            if submodel is not None:
                order[top_name] = list(submodel.model_fields.keys())
        return order

    def _default_template_file(self) -> Path:
        """Temporary TOML file holding the default settings."""
        with tempfile.NamedTemporaryFile("w+", delete=False, suffix=".toml") as tmp:
            tmp_path = Path(tmp.name)
        self.export_settings(Settings(), tmp_path)
        return tmp_path

    @staticmethod
    def _construct_recursive(model_cls: type[BaseModel], data: dict | None) -> BaseModel:
        """``model_construct`` applied to nested section models as well."""
        if data is None:
            return model_cls.model_construct()
        converted = {}
        for name, value in data.items():
            field_info = model_cls.model_fields.get(name)
            sub = _unwrap_model(field_info.annotation) if field_info is not None else None
            if sub is not None and isinstance(value, dict):
                converted[name] = SettingsManager._construct_recursive(sub, value)
            else:
                converted[name] = value
        return model_cls.model_construct(**converted)


def _unwrap_model(ann) -> Optional[type[BaseModel]]:
    if get_origin(ann) is Union:
        for a in get_args(ann):
            if isinstance(a, type) and issubclass(a, BaseModel):
                return a
    if isinstance(ann, type) and issubclass(ann, BaseModel):
        return ann
    return None
