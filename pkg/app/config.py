"""
Configuration management for the HankelRank toolkit
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path
from typing import List
import logging
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

ROOT_DIR = Path(__file__).parent.parent

env_path = ROOT_DIR / ".env"
if env_path.exists():
    load_dotenv(env_path)
    logger.debug(f"Loaded environment from {env_path}")


class Settings(BaseSettings):
    """Service and enumeration settings, overridable through the environment or .env"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")

    # Application
    APP_NAME: str = "HankelRank API"
    APP_VERSION: str = "1.0.0"
    ENVIRONMENT: str = "development"
    DEBUG: bool = True

    # Server
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    CORS_ORIGINS: str = "http://localhost:3000,http://localhost:8080"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = "logs/app.log"

    # Brute force refuses coefficient spaces wider than the budget
    BIT_BUDGET: int = Field(24, ge=1, le=40)
    CI_BIT_BUDGET: int = Field(20, ge=1, le=40)
    WORKERS: int = Field(1, ge=1)
    CHUNK_BITS: int = Field(16, ge=4, le=24)

    # Data files
    DATA_DIR: Path = ROOT_DIR / "data"
    CATALOG_FILE: str = "formula_catalog.json"
    GOLDEN_FILE: str = "golden_tables.json"
    ERRATA_FILE: str = "errata.json"

    @property
    def cors_origins_list(self) -> List[str]:
        return [origin.strip() for origin in self.CORS_ORIGINS.split(",") if origin.strip()]

    @property
    def catalog_path(self) -> Path:
        return self._resolve(self.CATALOG_FILE)

    @property
    def golden_path(self) -> Path:
        return self._resolve(self.GOLDEN_FILE)

    @property
    def errata_path(self) -> Path:
        return self._resolve(self.ERRATA_FILE)

    def _resolve(self, name: str) -> Path:
        """Relative data file names live under DATA_DIR; absolute ones are kept."""
        path = Path(name)
        return path if path.is_absolute() else self.DATA_DIR / path


settings = Settings()
