"""
config.py

Configuration management for sclkit.
Loads settings from config.yaml and provides access throughout the application.
"""

import os
from pathlib import Path
from typing import Any, Dict, List

import yaml


class ConfigManager:
    """
    Singleton configuration manager that loads and provides access to settings.
    """

    _instance = None
    _config: Dict[str, Any] = {}

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(ConfigManager, cls).__new__(cls)
            cls._instance._load_config()
        return cls._instance

    @staticmethod
    def _candidate_paths() -> List[Path]:
        """Config locations in lookup order."""
        candidates = []
        override = os.environ.get("SCLKIT_CONFIG")
        if override:
            candidates.append(Path(override))
        candidates.append(Path("config.yaml"))
        candidates.append(Path(__file__).resolve().parent.parent / "config.yaml")
        return candidates

    def _load_config(self) -> None:
        """Load configuration from the first config.yaml found."""
        config_path = next((p for p in self._candidate_paths() if p.exists()), None)

        if config_path is None:
            raise FileNotFoundError(
                "config.yaml not found. Set SCLKIT_CONFIG or run from the repository root."
            )

        try:
            with open(config_path, "r", encoding="utf-8") as f:
                self._config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid YAML in {config_path}: {e}")

    def get(self, key_path: str, default: Any = None) -> Any:
        """
        Get a configuration value using dot notation.

        Example:
            config.get("numerics.tie_tol")
            config.get("verification.default_seed")
        """
        keys = key_path.split(".")
        value = self._config

        try:
            for key in keys:
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def get_float(self, key_path: str, default: float) -> float:
        """Numeric lookup; YAML may hand back scientific notation as a string."""
        return float(self.get(key_path, default))

    def get_int(self, key_path: str, default: int) -> int:
        return int(self.get(key_path, default))


# Create a global instance for easy import
config = ConfigManager()
