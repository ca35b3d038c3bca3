"""
Laboratory settings
Values come from the environment (prefix FASLAB_) or a local .env file
"""
from functools import lru_cache
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Oracle budgets, algorithm defaults and logging level"""

    model_config = SettingsConfigDict(env_prefix="FASLAB_", env_file=".env", extra="ignore")

    # Exact-oracle budgets (vertex counts unless noted)
    max_n_beta: int = 20
    max_n_tau: int = 12
    max_n_tau_full: int = 10
    max_n_tau_enumeration: int = 6
    max_n_bias: int = 12
    max_pattern_vertices: int = 6
    max_orientation_edges: int = 6
    max_switch_enum_n: int = 5
    max_switch_enum_k: int = 6
    max_components: int = 10
    budget_override: Optional[int] = None

    # Algorithm defaults
    default_trials: int = 50
    default_seed: int = 0
    greedy_constant: float = 1 / 40
    dense_density: float = 0.25
    workers: int = 1

    # Browser origins allowed to call the HTTP API; none by default
    cors_origins: List[str] = []

    log_level: str = Field(default="INFO", validation_alias="APP_LOG_LEVEL")


@lru_cache()
def get_settings() -> Settings:
    """Cached settings instance; call get_settings.cache_clear() after changing the environment"""
    return Settings()
