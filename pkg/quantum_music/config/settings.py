"""Application settings."""

from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Execution
    workers: int = Field(default=1, ge=1)
    default_trials: int = Field(default=200, ge=1)

    # Output
    output_dir: Path = Path('results')
    log_level: str = 'WARNING'

    model_config = SettingsConfigDict(
        env_prefix='QMUSIC_',
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
    )

    def resolve_output(self, out: Optional[Path], default_name: str) -> Path:
        """Return the explicit output path, or one inside the output directory."""
        if out is not None:
            return out
        return self.output_dir / default_name


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
