"""
Settings file, environment overrides and run configuration validation
"""
import json

import pytest

from minidafny.config import RunConfig, SettingsLoader
from minidafny.config.settings_loader import ENVIRONMENT
from minidafny.diagnostics import ConfigError


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    for variable in ENVIRONMENT:
        monkeypatch.delenv(variable, raising=False)
    monkeypatch.chdir(tmp_path)


def _settings(tmp_path, data) -> str:
    path = tmp_path / "settings.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_settings_file_values(tmp_path):
    loader = SettingsLoader(_settings(tmp_path, {"prover": {"fuel": 4, "timeout_ms": 500}, "jobs": 2}))
    assert loader.get_setting("prover.fuel") == 4
    assert loader.get_setting("prover.rounds", 3) == 3
    assert loader.get_setting("solver.command") is None
    config = RunConfig.from_sources({}, loader)
    assert (config.fuel, config.timeout_ms, config.jobs) == (4, 500, 2)


def test_environment_overrides_settings_file(tmp_path, monkeypatch):
    monkeypatch.setenv("MINIDAFNY_FUEL", "1")
    monkeypatch.setenv("MINIDAFNY_SOLVER", "z3 -in")
    loader = SettingsLoader(_settings(tmp_path, {"prover": {"fuel": 4}}))
    assert loader.get_setting("prover.fuel") == 1
    assert loader.get_setting("solver.command") == "z3 -in"


def test_command_line_overrides_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("MINIDAFNY_TIMEOUT_MS", "700")
    loader = SettingsLoader(_settings(tmp_path, {}))
    assert RunConfig.from_sources({"timeout_ms": None}, loader).timeout_ms == 700
    assert RunConfig.from_sources({"timeout_ms": 50}, loader).timeout_ms == 50


def test_emit_directory_becomes_a_path(tmp_path):
    config = RunConfig.from_sources({"emit_smt_dir": str(tmp_path / "smt")}, SettingsLoader(_settings(tmp_path, {})))
    assert config.emit_smt_dir == tmp_path / "smt"


def test_invalid_environment_value(tmp_path, monkeypatch):
    monkeypatch.setenv("MINIDAFNY_FUEL", "lots")
    with pytest.raises(ConfigError):
        SettingsLoader(_settings(tmp_path, {}))


def test_named_settings_file_must_exist(tmp_path):
    with pytest.raises(ConfigError):
        SettingsLoader(str(tmp_path / "missing.json"))


def test_settings_file_must_hold_an_object(tmp_path):
    with pytest.raises(ConfigError):
        SettingsLoader(_settings(tmp_path, [1, 2]))


def test_unknown_option(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_sources({"colour": True}, SettingsLoader(_settings(tmp_path, {})))


@pytest.mark.parametrize("changes", [
    {"backend": "cvc"},
    {"backend": "smtlib"},
    {"timeout_ms": 0},
    {"fuel": -1},
    {"jobs": 0},
    {"step_limit": 0},
])
def test_validate_rejects(changes):
    with pytest.raises(ConfigError):
        RunConfig(**changes).validate()


def test_smtlib_with_solver_is_valid():
    config = RunConfig(backend="smtlib", solver_command="z3").validate()
    assert config.prover_options().timeout_ms == 10000


def test_timeout_defaults_per_backend(tmp_path):
    assert RunConfig().validate().backend_timeout_ms() == 10000
    external = RunConfig.from_sources({"backend": "smtlib", "solver_command": "z3"},
                                      SettingsLoader(_settings(tmp_path, {})))
    assert external.timeout_ms is None
    assert external.backend_timeout_ms() == 30000
    assert RunConfig(backend="smtlib", solver_command="z3", timeout_ms=700).backend_timeout_ms() == 700
