"""
Configuration management for lattice-dk.
"""

import copy
import os
import yaml
from typing import Dict, Any, Optional
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


DEFAULTS: Dict[str, Any] = {
    "lattice": {
        "table_threshold": 4096,
    },
    "meet": {
        "enum_budget": 10_000_000,
    },
    "knowledge": {
        "max_states": 20,
        "endo_meet_max_states": 12,
    },
    "generators": {
        "cover_probability": 0.3,
        "max_attempts": 20,
        "max_lattice_size": 4096,
        "stirling_cache": 1000,
    },
    "bench": {
        "warmup": True,
    },
}

_POSITIVE_INT_KEYS = [
    "lattice.table_threshold",
    "meet.enum_budget",
    "knowledge.max_states",
    "knowledge.endo_meet_max_states",
    "generators.max_attempts",
    "generators.max_lattice_size",
    "generators.stirling_cache",
]


def _lookup(data: Dict[str, Any], key: str) -> Any:
    for k in key.split("."):
        if not isinstance(data, dict) or k not in data:
            return None
        data = data[k]
    return data


def _coerce(raw: str, like: Any) -> Any:
    """
    Convert an environment string to the type of the built-in default.

    A string that does not parse is returned as is so ``validate`` rejects it.
    """
    if isinstance(like, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        if isinstance(like, int):
            return int(raw)
        if isinstance(like, float):
            return float(raw)
    except ValueError:
        return raw
    return raw


class Config:
    """Configuration manager for the application."""

    DEFAULT_CONFIG_PATH = os.path.join(os.getcwd(), "config", "config.yaml")

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration from file.

        Args:
            config_path: Path to configuration file. If None, uses default path.
        """
        self.config_path = config_path or self.DEFAULT_CONFIG_PATH
        self.config_data = {}
        self.load()

    def load(self) -> Dict[str, Any]:
        """
        Load configuration from file.

        Returns:
            Dict containing configuration data.
        """
        try:
            with open(self.config_path, "r") as f:
                self.config_data = yaml.safe_load(f) or {}
        except FileNotFoundError:
            self.config_data = {}
        return self.config_data

    def save(self) -> None:
        """Save current configuration to file."""
        directory = os.path.dirname(self.config_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(self.config_path, "w") as f:
            yaml.dump(self.config_data, f, default_flow_style=False)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key.

        Priority:
        1. Environment variables (UPPERCASE with _ instead of .)
        2. Configuration file
        3. ``default``
        4. Built-in defaults

        Args:
            key: Configuration key, can use dot notation for nested keys.
            default: Default value if key is not found.

        Returns:
            Configuration value or default.
        """
        builtin = _lookup(DEFAULTS, key)
        env_value = os.environ.get(key.replace(".", "_").upper())
        if env_value is not None:
            like = builtin if builtin is not None else default
            return _coerce(env_value, like) if like is not None else env_value

        value = _lookup(self.config_data, key)
        if value is not None:
            return value
        if default is not None:
            return default
        return builtin

    def set(self, key: str, value: Any) -> None:
        """
        Set configuration value.

        Args:
            key: Configuration key, can use dot notation for nested keys.
            value: Value to set.
        """
        keys = key.split(".")
        data = self.config_data
        for k in keys[:-1]:
            if k not in data:
                data[k] = {}
            data = data[k]
        data[keys[-1]] = value

    def reset_to_defaults(self) -> None:
        self.config_data = copy.deepcopy(DEFAULTS)

    def validate(self) -> bool:
        """
        Validate configuration.

        Returns:
            True if every limit is a positive integer and the cover
            probability lies strictly between 0 and 1.
        """
        for key in _POSITIVE_INT_KEYS:
            value = self.get(key)
            if isinstance(value, bool) or not isinstance(value, int) or value <= 0:
                return False

        p = self.get("generators.cover_probability")
        if not isinstance(p, (int, float)) or not 0 < p < 1:
            return False

        return isinstance(self.get("bench.warmup"), bool)
