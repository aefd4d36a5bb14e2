from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator
from pathlib import Path
import logging


class Settings(BaseSettings):
    """Application configuration with validation."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="ACCESS_MODEL_",
        case_sensitive=False,
        extra="ignore",
    )

    # Outputs
    output_dir: Path = Field(
        default=Path("output"),
        description="Default parent directory for command outputs (one subdirectory per command)"
    )

    # System Configuration
    log_level: str = Field(default="INFO")
    log_dir: Path = Field(default=Path("logs"))
    sweep_workers: int = Field(
        default=1, ge=1, le=32,
        description="Worker threads for sweep points and batch records"
    )

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        """Ensure the log level is one the logging module knows."""
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level '{v}'")
        return level

    def command_output_dir(self, command: str) -> Path:
        """Default output directory for a CLI command."""
        return self.output_dir / command


# Global settings instance
settings = Settings()
