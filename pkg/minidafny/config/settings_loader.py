"""
Settings loader for minidafny
Run configuration from an optional JSON settings file, the environment and the command line
"""

import json
import os
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from minidafny.diagnostics import ConfigError
from minidafny.prover.builtin import ProverOptions
from minidafny.replay.interpreter import DEFAULT_STEP_LIMIT

logger = logging.getLogger(__name__)

BACKENDS = ("builtin", "smtlib")

# per-condition timeout when none is configured
DEFAULT_TIMEOUT_MS = {"builtin": 10000, "smtlib": 30000}

# environment variable -> (dot path in the settings file, converter)
ENVIRONMENT = {
    "MINIDAFNY_SOLVER": ("solver.command", str),
    "MINIDAFNY_TIMEOUT_MS": ("prover.timeout_ms", int),
    "MINIDAFNY_FUEL": ("prover.fuel", int),
    "MINIDAFNY_ROUNDS": ("prover.rounds", int),
    "MINIDAFNY_BACKEND": ("prover.backend", str),
}


class SettingsLoader:
    """Settings file plus environment overrides"""

    def __init__(self, settings_file: str = None):
        """
        Initialize settings loader

        Args:
            settings_file: Path to settings JSON file; config/settings.json by default.
                The default file may be missing, an explicitly named one may not.
        """
        explicit = settings_file is not None
        if settings_file is None:
            project_root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
            settings_file = os.path.join(project_root, 'config', 'settings.json')

        self.settings_file = settings_file
        self._settings: Dict[str, Any] = {}
        self._load_settings(explicit)

    def _load_settings(self, required: bool):
        """Load settings from JSON file, then apply environment overrides"""
        load_dotenv()
        if os.path.exists(self.settings_file):
            try:
                with open(self.settings_file, 'r') as f:
                    self._settings = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                logger.error(f"Failed to load settings: {e}")
                raise ConfigError(f"cannot read settings file {self.settings_file}: {e}")
            if not isinstance(self._settings, dict):
                raise ConfigError(f"settings file {self.settings_file} must hold a JSON object")
            logger.debug(f"Settings loaded from {self.settings_file}")
        elif required:
            raise ConfigError(f"Settings file not found: {self.settings_file}")

        for variable, (path, convert) in ENVIRONMENT.items():
            raw = os.getenv(variable)
            if raw is None or raw == "":
                continue
            try:
                self.set_setting(path, convert(raw))
            except ValueError:
                raise ConfigError(f"{variable}={raw!r} is not a valid value")
            logger.debug(f"{variable} overrides {path}")

    def get_setting(self, path: str, default: Any = None) -> Any:
        """
        Get a setting by dot notation path

        Args:
            path: Dot notation path like 'prover.fuel'
            default: returned when the path is absent

        Returns:
            The setting value
        """
        value: Any = self._settings
        for key in path.split('.'):
            if isinstance(value, dict) and key in value:
                value = value[key]
            else:
                return default
        return value

    def set_setting(self, path: str, value: Any):
        keys = path.split('.')
        table = self._settings
        for key in keys[:-1]:
            table = table.setdefault(key, {})
        table[keys[-1]] = value


# Global instance for easy access
_settings_loader = None


def get_settings_loader(settings_file: str = None) -> SettingsLoader:
    """Get the global settings loader instance; a named file replaces it"""
    global _settings_loader
    if _settings_loader is None or settings_file is not None:
        _settings_loader = SettingsLoader(settings_file)
    return _settings_loader


@dataclass
class RunConfig:
    inputs: List[str] = field(default_factory=list)
    backend: str = "builtin"
    solver_command: Optional[str] = None
    timeout_ms: Optional[int] = None
    fuel: int = 2
    rounds: int = 3
    instantiation_cap: int = 10000
    step_limit: int = DEFAULT_STEP_LIMIT
    jobs: int = 1
    emit_smt_dir: Optional[Path] = None
    emit_gc: bool = False
    emit_vc: bool = False
    replay: bool = False
    json: bool = False
    settings_file: Optional[str] = None

    def validate(self) -> "RunConfig":
        """
        Raises:
            ConfigError: unknown backend, smtlib without a solver, or an out-of-range number
        """
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend '{self.backend}' (expected one of {', '.join(BACKENDS)})")
        if self.backend == "smtlib" and not self.solver_command:
            raise ConfigError("backend smtlib needs a solver command (--solver-cmd or MINIDAFNY_SOLVER)")
        if self.timeout_ms is not None and self.timeout_ms < 1:
            raise ConfigError(f"timeout_ms must be at least 1, got {self.timeout_ms}")
        for name, minimum in (("fuel", 0), ("rounds", 0), ("instantiation_cap", 1),
                              ("step_limit", 1), ("jobs", 1)):
            if getattr(self, name) < minimum:
                raise ConfigError(f"{name} must be at least {minimum}, got {getattr(self, name)}")
        return self

    def backend_timeout_ms(self, backend: Optional[str] = None) -> int:
        """Configured timeout, else the default of the backend (10 s built-in, 30 s external)"""
        if self.timeout_ms is not None:
            return self.timeout_ms
        return DEFAULT_TIMEOUT_MS[backend or self.backend]

    def prover_options(self) -> ProverOptions:
        return ProverOptions(timeout_ms=self.backend_timeout_ms("builtin"), rounds=self.rounds,
                             instantiation_cap=self.instantiation_cap)

    @classmethod
    def from_sources(cls, overrides: Dict[str, Any], loader: Optional[SettingsLoader] = None) -> "RunConfig":
        """
        Build a configuration: command line > environment > settings file > default

        Args:
            overrides: values given on the command line; None means not given
            loader: settings source, the global loader by default
        """
        loader = loader or get_settings_loader(overrides.get("settings_file"))
        config = cls(
            backend=loader.get_setting("prover.backend", cls.backend),
            solver_command=loader.get_setting("solver.command"),
            timeout_ms=loader.get_setting("prover.timeout_ms", cls.timeout_ms),
            fuel=loader.get_setting("prover.fuel", cls.fuel),
            rounds=loader.get_setting("prover.rounds", cls.rounds),
            instantiation_cap=loader.get_setting("prover.instantiation_cap", cls.instantiation_cap),
            step_limit=loader.get_setting("replay.step_limit", cls.step_limit),
            jobs=loader.get_setting("jobs", cls.jobs),
        )
        for name, value in overrides.items():
            if value is None:
                continue
            if not hasattr(config, name):
                raise ConfigError(f"unknown option '{name}'")
            setattr(config, name, value)
        if isinstance(config.emit_smt_dir, str):
            config.emit_smt_dir = Path(config.emit_smt_dir)
        return config.validate()
