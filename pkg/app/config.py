from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Worker pool size for residue tensors, identity checks and numeric samples
    threads: int = Field(default=4, ge=1)

    # Numeric engines
    q_terms: int = Field(default=40, ge=1)
    tol: float = Field(default=1e-9, gt=0)
    samples: int = Field(default=20, ge=1)
    seed: int = 20240601
    quadrature_nodes: int = Field(default=256, ge=256)
    cluster_tol: float = 1e-6
    semisimple_tol: float = 1e-8

    # Extra series order used by the complement residue engine
    series_guard: int = Field(default=2, ge=0)

    log_level: str = "WARNING"

    class Config:
        env_file = ".env"
        env_prefix = "OWDVV_"
        extra = "ignore"


settings = Settings()
