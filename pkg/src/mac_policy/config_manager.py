"""
Configuration Manager for the MAC policy engine.

This module provides centralized configuration management: the project
root, the config and fixtures directories, and the engine settings read
from config/engine_settings.json.
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)

SETTINGS_FILENAME = "engine_settings.json"
HOME_VARIABLE = "MAC_POLICY_HOME"

DEFAULT_SETTINGS: Dict[str, Dict[str, Any]] = {
    "chinese_wall": {
        "grade_step": 10,
        "collection": "dominated",
        "top_grade": "numeric",
        "max_nodes": 1_000_000,
    },
    "scenario": {
        "fixtures_dir": "fixtures",
    },
    "output": {
        "default_format": "text",
    },
}


class ConfigManager:
    """Centralized configuration manager for the MAC policy engine."""

    def __init__(self, project_root: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            project_root: Root directory of the project. If None, uses
                MAC_POLICY_HOME or auto-detects.
        """
        if project_root:
            self.project_root = Path(project_root)
        elif os.environ.get(HOME_VARIABLE):
            self.project_root = Path(os.environ[HOME_VARIABLE])
        else:
            # Auto-detect project root by looking for src/mac_policy
            current = Path(__file__).resolve().parent
            while current.parent != current:
                if (current / "src" / "mac_policy").exists():
                    break
                current = current.parent
            self.project_root = current

        self.config_dir = self.project_root / "config"
        self.settings_file = self.config_dir / SETTINGS_FILENAME
        self.settings = self._load_settings()
        self.fixtures_dir = self.project_root / self.get_setting("scenario", "fixtures_dir")

        logger.debug(f"ConfigManager initialized with project root: {self.project_root}")

    def _load_settings(self) -> Dict[str, Dict[str, Any]]:
        """Load settings over the defaults; a missing or broken file keeps the defaults."""
        settings = copy.deepcopy(DEFAULT_SETTINGS)
        if not self.settings_file.exists():
            logger.warning(f"Settings file not found, using defaults: {self.settings_file}")
            return settings

        try:
            with open(self.settings_file, "r", encoding="utf-8") as f:
                loaded = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Could not read {self.settings_file}, using defaults: {e}")
            return settings

        for section, values in loaded.items():
            if section not in settings or not isinstance(values, dict):
                logger.warning(f"Ignoring unknown settings section '{section}'")
                continue
            for key, value in values.items():
                if key not in settings[section]:
                    logger.warning(f"Ignoring unknown setting '{section}.{key}'")
                    continue
                settings[section][key] = value
        return settings

    def get_setting(self, section: str, key: str) -> Any:
        """
        Get one setting value.

        Raises:
            KeyError: section or key is not a known setting
        """
        return self.settings[section][key]

    def chinese_wall_settings(self) -> Dict[str, Any]:
        return dict(self.settings["chinese_wall"])

    def resolve_fixture(self, name_or_path: str) -> Path:
        """
        Resolve a scenario file argument.

        An existing path wins; otherwise a bundled fixture name such as
        "biba-org" maps to fixtures/biba-org.mac.

        Args:
            name_or_path: File path or bundled fixture name

        Returns:
            Path to the file (which may not exist if neither form matched)
        """
        candidate = Path(name_or_path)
        if candidate.exists():
            return candidate
        bundled = self.fixtures_dir / name_or_path
        if bundled.suffix != ".mac":
            bundled = bundled.with_name(bundled.name + ".mac")
        if bundled.exists():
            return bundled
        return candidate

    def list_fixtures(self) -> Dict[str, Path]:
        """Bundled fixture names and their paths."""
        if not self.fixtures_dir.exists():
            logger.warning(f"Fixtures directory not found: {self.fixtures_dir}")
            return {}
        return {path.stem: path for path in sorted(self.fixtures_dir.glob("*.mac"))}


# Global configuration manager instance
_config_manager: Optional[ConfigManager] = None


def get_config_manager() -> ConfigManager:
    """
    Get the global configuration manager instance.

    Returns:
        The global ConfigManager instance
    """
    global _config_manager
    if _config_manager is None:
        _config_manager = ConfigManager()
    return _config_manager


def initialize_config(project_root: Optional[str] = None) -> ConfigManager:
    """
    Initialize the global configuration manager.

    Args:
        project_root: Root directory of the project

    Returns:
        The initialized ConfigManager instance
    """
    global _config_manager
    _config_manager = ConfigManager(project_root)
    return _config_manager
