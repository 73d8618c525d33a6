"""
Configuration Management Module
Handles loading and managing configuration settings.
"""

import copy
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from .series import Truncation

logger = logging.getLogger(__name__)


class Config:
    """Configuration manager."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration.

        Args:
            config_path: Path to JSON configuration file; defaults are used for missing sections
        """
        self.config: Dict[str, Any] = copy.deepcopy(default_config)

        if config_path:
            self.load_from_file(config_path)

    def load_from_file(self, config_path: str):
        """Load configuration from JSON file, merged section by section over the defaults."""
        try:
            path = Path(config_path)
            if path.exists():
                with open(path, 'r', encoding='utf-8') as f:
                    loaded = json.load(f)
                for key, value in loaded.items():
                    if isinstance(value, dict) and isinstance(self.config.get(key), dict):
                        self.config[key].update(value)
                    else:
                        self.config[key] = value
                logger.info(f"Loaded configuration from {config_path}")
            else:
                logger.warning(f"Configuration file not found: {config_path}")
        except Exception as e:
            logger.error(f"Error loading configuration file: {e}")
            raise

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value."""
        return self.config.get(key, default)

    def set(self, key: str, value: Any):
        """Set configuration value."""
        self.config[key] = value

    def to_dict(self) -> Dict[str, Any]:
        """Get configuration as dictionary."""
        return copy.deepcopy(self.config)

    def truncation(self) -> Truncation:
        """Truncation policy from the truncation section."""
        section = self.get("truncation", {})
        return Truncation(
            abs_tol=float(section.get("abs_tol", 1e-14)),
            rel_tol=float(section.get("rel_tol", 1e-14)),
            max_terms=int(section.get("max_terms", 10000)),
        )


# Default configuration
default_config = {
    "truncation": {
        "abs_tol": 1e-14,
        "rel_tol": 1e-14,
        "max_terms": 10000
    },
    "logging": {
        "level": "WARNING",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": None
    },
    "verify": {
        "seed": 20240601,
        "trials": 20,
        "workers": 1
    },
    "table": {
        "workers": 1
    },
    "scan": {
        "fractions": [0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 1.02]
    }
}
