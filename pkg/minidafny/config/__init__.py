"""
Run configuration
"""
from minidafny.config.settings_loader import RunConfig, SettingsLoader, get_settings_loader

__all__ = ["RunConfig", "SettingsLoader", "get_settings_loader"]
