"""Tests for configuration and utility modules."""

import json
import logging

import pytest

from src.config import Config, default_config
from src.series import Truncation
from src.utils import ordered_map, scaled_error, setup_logging


class TestConfig:
    """Test configuration manager."""

    def test_defaults(self):
        """Test default sections."""
        config = Config()
        assert config.get("verify")["seed"] == default_config["verify"]["seed"]
        assert config.truncation() == Truncation()

    def test_file_merges_sections(self, tmp_path):
        """A file overrides keys section by section."""
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"truncation": {"max_terms": 500}, "verify": {"trials": 3}}))
        config = Config(str(path))
        assert config.truncation().max_terms == 500
        assert config.truncation().abs_tol == 1e-14
        assert config.get("verify") == {"seed": 20240601, "trials": 3, "workers": 1}

    def test_missing_file_keeps_defaults(self, tmp_path):
        """Test a missing configuration file."""
        config = Config(str(tmp_path / "absent.json"))
        assert config.to_dict() == default_config

    def test_invalid_json(self, tmp_path):
        """Test a malformed configuration file."""
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValueError):
            Config(str(path))

    def test_set_and_copy(self):
        """to_dict returns an independent copy."""
        config = Config()
        config.set("table", {"workers": 4})
        snapshot = config.to_dict()
        snapshot["table"]["workers"] = 8
        assert config.get("table") == {"workers": 4}
        assert default_config["table"] == {"workers": 1}


class TestUtils:
    """Test utility functions."""

    def test_ordered_map_keeps_order(self):
        """Results follow input order with several workers."""
        assert ordered_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]

    def test_scaled_error(self):
        """Absolute near zero, relative for large references."""
        assert scaled_error(1e-3, 0.0) == pytest.approx(1e-3)
        assert scaled_error(101.0, 100.0) == pytest.approx(1e-2)

    def test_setup_logging_file(self, tmp_path):
        """A log file and its directory are created."""
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(level="INFO", log_file=str(log_file))
        logging.getLogger("src.test").info("hello")
        logging.shutdown()
        assert log_file.exists()
        setup_logging()
