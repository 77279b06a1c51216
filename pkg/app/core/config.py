"""Configuration management using Pydantic Settings."""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Database
    database_url: str = "sqlite:///./batch_congest.db"

    # Simulator
    bandwidth: int = 1  # words per edge per direction per round
    bandwidth_mode: str = "default"  # default | strict
    round_ceiling_factor: int = 10  # ceiling = factor * (n + m)
    weight_cap_exponent: int = 3  # weights live in [-n^C, n^C]

    # Oracles
    oracle_enabled: bool = True
    oracle_max_n: int = 200
    matmul_verify: bool = False

    # Application
    app_name: str = "Batch Dynamic CONGEST Lab"
    debug: bool = False
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
