"""
Configuration management for pwrot.
Loads settings from config.yaml and environment variables.
"""
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict


class EnvironmentSettings(BaseSettings):
    """PWROT_* environment overrides"""
    model_config = SettingsConfigDict(env_prefix="PWROT_", env_ignore_empty=True, extra="ignore")

    threads: Optional[int] = Field(None, ge=1)
    config_path: Optional[str] = None


def environment_settings() -> EnvironmentSettings:
    try:
        return EnvironmentSettings()
    except ValidationError as exc:
        errors = "; ".join(f"PWROT_{str(e['loc'][0]).upper()}: {e['msg']}" for e in exc.errors())
        raise ValueError(f"invalid environment override: {errors}") from None


class TolerancesConfig(BaseModel):
    """Numeric tolerances"""
    bijectivity_factor: float = 1e-12
    boundary_eps: float = 1e-13
    periodic: float = 1e-9
    resonance: float = 1e-12
    translation: float = 1e-9


class DiophantineConfig(BaseModel):
    """Continued fraction defaults"""
    default_depth: int = Field(10, ge=1)


class IslandsConfig(BaseModel):
    """Periodic island search defaults"""
    transient_periods: int = Field(8, ge=1)
    exhaustive_limit: int = Field(16, ge=1)


class StripsConfig(BaseModel):
    """Strip width measurement settings"""
    sweep_steps: int = Field(64, ge=4)
    bisection_rel_tol: float = 1e-6
    probe_factor: float = 2.0


class CertificatesConfig(BaseModel):
    """Escape / attract certificate defaults"""
    samples: int = Field(360, ge=1)
    horizon: int = Field(2000, ge=1)
    start_factor: float = 1.01
    target_factor: float = 2.0


class RasterConfig(BaseModel):
    """Limit-set raster defaults"""
    seeds_per_side: int = Field(2, ge=1)
    max_seeds: int = Field(4_000_000, ge=1)
    buckets: int = Field(16, ge=1, le=255)
    escape_fallback_factor: float = 10.0


class ParallelConfig(BaseModel):
    """Worker pool configuration"""
    threads: int = Field(1, ge=1)


class LoggingConfig(BaseModel):
    """Logging configuration"""
    level: str = "WARNING"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class AppConfig(BaseModel):
    """Application-level configuration"""
    name: str = "pwrot"
    environment: str = "development"


class Config(BaseModel):
    """Main configuration container"""
    tolerances: TolerancesConfig = TolerancesConfig()
    diophantine: DiophantineConfig = DiophantineConfig()
    islands: IslandsConfig = IslandsConfig()
    strips: StripsConfig = StripsConfig()
    certificates: CertificatesConfig = CertificatesConfig()
    raster: RasterConfig = RasterConfig()
    parallel: ParallelConfig = ParallelConfig()
    logging: LoggingConfig = LoggingConfig()
    app: AppConfig = AppConfig()

    @property
    def threads(self) -> int:
        """Worker count: PWROT_THREADS if set, else the configured default"""
        return environment_settings().threads or self.parallel.threads


def load_config(
    config_path: str = None,
    env_file: str = None,
    search_parent_dirs: bool = True
) -> Config:
    """
    Load configuration from YAML file and environment variables.

    Args:
        config_path: Path to config.yaml file. If None, uses PWROT_CONFIG_PATH or
                     the config.yaml shipped next to this module.
        env_file: Path to .env file. If None, searches for .env.local in current
                 and parent directories.
        search_parent_dirs: If True, searches parent directories for .env.local.

    Returns:
        Config: Validated configuration object
    """
    if env_file is None:
        current_dir = Path.cwd()
        candidates = [current_dir] + (list(current_dir.parents) if search_parent_dirs else [])
        for parent in candidates:
            env_path = parent / ".env.local"
            if env_path.exists():
                load_dotenv(env_path)
                break
    else:
        load_dotenv(env_file)

    if config_path is None:
        config_path = environment_settings().config_path
        if config_path is None:
            config_path = Path(__file__).parent / "config.yaml"

    with open(config_path, "r") as f:
        config_data = yaml.safe_load(f) or {}

    return Config(**config_data)


# Global config instance
_config: Optional[Config] = None


def get_config(
    config_path: str = None,
    env_file: str = None,
    reload: bool = False
) -> Config:
    """
    Get the global configuration instance.

    Args:
        config_path: Optional path to config file (only used on first load or reload)
        env_file: Optional path to .env file (only used on first load or reload)
        reload: If True, reload configuration from disk

    Returns:
        Config: Configuration instance
    """
    global _config
    if _config is None or reload:
        _config = load_config(config_path=config_path, env_file=env_file)
    return _config


def set_config(config: Config) -> None:
    """
    Manually set the global configuration instance.
    Useful for testing or programmatic configuration.
    """
    global _config
    _config = config


def reset_config() -> None:
    """Reset the global configuration instance. Useful for testing."""
    global _config
    _config = None
