from pathlib import Path
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):

    app_name: str = "Hazdep API"
    debug: bool = False
    version: str = "1.0.0"
    api_prefix: str = "/api/v1"

    # Parallélisme (HAZDEP_THREADS)
    threads: Optional[int] = Field(default=None, ge=1)

    # Différences finies
    fd_relative_step: float = Field(default=1e-3, gt=0)
    fd_corner_clearance: float = Field(default=1e-6, gt=0)

    # Grilles
    boundary_delta: float = Field(default=1e-3, gt=0, lt=1)
    display_delta: float = Field(default=0.01, gt=0, lt=1)
    display_resolution: int = Field(default=101, ge=2)
    golden_dir: Path = Path(__file__).resolve().parent.parent / "data" / "goldens"

    # Quadrature
    gauss_hermite_nodes: int = Field(default=64, ge=2)
    simpson_nodes: int = Field(default=2001, ge=3)
    inf_grid_nodes: int = Field(default=201, ge=3)
    inf_safety_margin: float = Field(default=0.05, ge=0)

    # Monte Carlo
    sample_block_size: int = Field(default=65536, ge=1024)
    min_effective_sample_size: float = 100.0
    cov_batches: int = Field(default=20, ge=2)

    log_level: str = "INFO"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="HAZDEP_",
        extra="ignore",
    )

settings = Settings()
