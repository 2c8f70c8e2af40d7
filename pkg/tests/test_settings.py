import pytest

from omv_tools.ui.typer.settings import EngineSettings, Settings, SettingsManager


@pytest.fixture
def manager(tmp_path):
    return SettingsManager(settings_dir=tmp_path)


def test_load_creates_default_project(manager, tmp_path):
    settings = manager.load_settings("default")
    assert settings == Settings()
    assert (tmp_path / "default.toml").exists()
    assert manager.list_projects() == ["default"]


def test_set_and_get_param(manager):
    manager.set_param("exp", "ENGINE.delta", "1.5")
    manager.set_param("exp", "CELLPROBE.word_size", "8")
    assert manager.get_param("exp", "ENGINE.delta") == 1.5
    assert manager.load_settings("exp").CELLPROBE.word_size == 8


@pytest.mark.parametrize("param,value", [
    ("ENGINE.epsilon", "2"),
    ("LOGGER.filename", "out.txt"),
    ("ENGINE.max_workers", "zero"),
    ("NOPE.delta", "1"),
    ("ENGINE.nope", "1"),
    ("ENGINE", "1"),
])
def test_invalid_updates(manager, param, value):
    with pytest.raises(ValueError):
        manager.set_param("exp", param, value)


def test_settings_text_keeps_model_order(manager):
    text = manager.settings_to_string(Settings())
    sections = [line for line in text.splitlines() if line.startswith("[")]
    assert sections == ["[LOGGER]", "[ENGINE]", "[CELLPROBE]", "[BENCH]"]
    assert 'filename = ""' in text


def test_missing_project_without_create(manager):
    with pytest.raises(FileNotFoundError):
        manager.load_settings("absent", create=False)


def test_engine_settings_to_vmv_config():
    config = EngineSettings(delta=2.0, z=3).to_vmv_config(seed=7, epsilon=None)
    assert config.delta == 2.0
    assert config.z == 3
    assert config.y is None
    assert config.seed == 7
    assert config.epsilon == 0.5
