"""
Tests for settings.py - Environment-driven settings.
"""

from pathlib import Path

import pytest
from pydantic import ValidationError

from src.config.settings import Settings


class TestSettings:

    def test_defaults(self, monkeypatch):
        for name in ("OUTPUT_DIR", "LOG_LEVEL", "LOG_DIR", "SWEEP_WORKERS"):
            monkeypatch.delenv(f"ACCESS_MODEL_{name}", raising=False)
        settings = Settings(_env_file=None)
        assert settings.output_dir == Path("output")
        assert settings.log_level == "INFO"
        assert settings.sweep_workers == 1

    def test_environment_overrides(self, monkeypatch, tmp_path):
        monkeypatch.setenv("ACCESS_MODEL_OUTPUT_DIR", str(tmp_path))
        monkeypatch.setenv("ACCESS_MODEL_LOG_LEVEL", "debug")
        monkeypatch.setenv("ACCESS_MODEL_SWEEP_WORKERS", "4")
        settings = Settings(_env_file=None)
        assert settings.log_level == "DEBUG"
        assert settings.sweep_workers == 4
        assert settings.command_output_dir("plan") == tmp_path / "plan"

    def test_invalid_values(self, monkeypatch):
        monkeypatch.setenv("ACCESS_MODEL_LOG_LEVEL", "chatty")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)
        monkeypatch.setenv("ACCESS_MODEL_LOG_LEVEL", "INFO")
        monkeypatch.setenv("ACCESS_MODEL_SWEEP_WORKERS", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)
