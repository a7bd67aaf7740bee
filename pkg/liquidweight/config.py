"""
Configuration settings for liquidweight
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Library and CLI defaults; every value can be overridden per call or by flag"""

    # Probability model
    default_probability: float = 0.5

    # Numerical tolerances
    tolerance: float = 1e-10         # power iteration
    oracle_tolerance: float = 1e-9   # analytic vs exact comparisons
    max_iters: int = 100_000

    # Exact enumeration guard (number of Bernoulli trials)
    enumeration_limit: int = 25

    # Monte Carlo
    samples: int = 100_000
    seed: int = 42
    workers: int = 1
    chunk_size: int = 8192

    # Logging Configuration
    log_level: str = "WARNING"
    log_file: str = ""

    model_config = SettingsConfigDict(
        env_prefix="LIQUIDWEIGHT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    def validate_settings(self) -> list:
        """Validate settings and return any problems"""
        problems = []

        if not 0.0 <= self.default_probability <= 1.0:
            problems.append("DEFAULT_PROBABILITY must lie in [0, 1]")
        if self.tolerance <= 0 or self.oracle_tolerance <= 0:
            problems.append("TOLERANCE and ORACLE_TOLERANCE must be positive")
        if self.max_iters < 1:
            problems.append("MAX_ITERS must be at least 1")
        if self.samples < 2:
            problems.append("SAMPLES must be at least 2")
        if self.workers < 1 or self.chunk_size < 1:
            problems.append("WORKERS and CHUNK_SIZE must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            problems.append("SEED must be an unsigned 64-bit integer")

        return problems


settings = Settings()
