"""
Tests for configuration handling.
"""

import os
import tempfile
import pytest
from lattice_dk.config import DEFAULTS, Config


def test_config_load_and_get():
    """Test loading config and getting values."""
    with tempfile.NamedTemporaryFile(mode='w', suffix=".yaml", delete=False) as f:
        f.write("""
meet:
  enum_budget: 5000
knowledge:
  max_states: 14
        """)
        config_path = f.name

    try:
        config = Config(config_path)

        assert config.get("meet.enum_budget") == 5000
        assert config.get("knowledge.max_states") == 14
        # Keys missing from the file fall back to the built-in defaults
        assert config.get("lattice.table_threshold") == 4096
        assert config.get("nonexistent") is None
        assert config.get("nonexistent", "default") == "default"
    finally:
        os.unlink(config_path)


def test_config_missing_file_uses_defaults():
    """Test that a missing config file yields the built-in defaults."""
    config = Config(os.path.join(tempfile.gettempdir(), "lattice-dk-missing", "config.yaml"))
    assert config.config_data == {}
    assert config.get("generators.stirling_cache") == 1000
    assert config.get("bench.warmup") is True
    assert config.validate() is True


def test_config_environment_overrides_file(monkeypatch):
    """Test that environment variables win and are coerced to the default's type."""
    with tempfile.NamedTemporaryFile(mode='w', suffix=".yaml", delete=False) as f:
        f.write("meet:\n  enum_budget: 5000\n")
        config_path = f.name

    try:
        monkeypatch.setenv("MEET_ENUM_BUDGET", "123")
        monkeypatch.setenv("BENCH_WARMUP", "false")
        monkeypatch.setenv("GENERATORS_COVER_PROBABILITY", "0.25")
        config = Config(config_path)
        assert config.get("meet.enum_budget") == 123
        assert config.get("bench.warmup") is False
        assert config.get("generators.cover_probability") == pytest.approx(0.25)
    finally:
        os.unlink(config_path)


def test_config_set_and_save():
    """Test setting config values and saving to file."""
    with tempfile.TemporaryDirectory() as tmp:
        config_path = os.path.join(tmp, "config", "config.yaml")
        config = Config(config_path)

        config.set("knowledge.max_states", 16)
        config.set("generators.max_attempts", 5)
        config.save()

        config2 = Config(config_path)
        assert config2.get("knowledge.max_states") == 16
        assert config2.get("generators.max_attempts") == 5


def test_config_reset_to_defaults():
    """Test that reset_to_defaults copies the default table."""
    config = Config(os.path.join(tempfile.gettempdir(), "lattice-dk-missing.yaml"))
    config.reset_to_defaults()
    assert config.config_data == DEFAULTS
    config.set("meet.enum_budget", 1)
    assert DEFAULTS["meet"]["enum_budget"] == 10_000_000


def test_config_validate():
    """Test config validation."""
    with tempfile.NamedTemporaryFile(mode='w', suffix=".yaml", delete=False) as f:
        f.write("lattice:\n  table_threshold: 100\n")
        config_path = f.name

    try:
        config = Config(config_path)
        assert config.validate() is True

        # Limits must be positive integers
        config.set("meet.enum_budget", 0)
        assert config.validate() is False
        config.set("meet.enum_budget", "many")
        assert config.validate() is False
        config.set("meet.enum_budget", 10)
        assert config.validate() is True

        # Probability strictly inside (0, 1)
        config.set("generators.cover_probability", 1.0)
        assert config.validate() is False
        config.set("generators.cover_probability", 0.5)
        assert config.validate() is True

        config.set("bench.warmup", "yes")
        assert config.validate() is False
    finally:
        os.unlink(config_path)


def test_config_malformed_environment_value(monkeypatch):
    """Test that an unparsable environment value fails validation instead of raising."""
    config = Config(os.path.join(tempfile.gettempdir(), "lattice-dk-missing", "config.yaml"))
    monkeypatch.setenv("MEET_ENUM_BUDGET", "lots")
    assert config.get("meet.enum_budget") == "lots"
    assert config.validate() is False
    monkeypatch.setenv("MEET_ENUM_BUDGET", "10")
    monkeypatch.setenv("GENERATORS_COVER_PROBABILITY", "half")
    assert config.validate() is False
