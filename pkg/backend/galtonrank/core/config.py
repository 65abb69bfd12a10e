"""
Core configuration module for galton-rank-order.
Uses Pydantic Settings for environment variable validation and type safety.
"""
from functools import lru_cache
from typing import List

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from galtonrank import __version__


class Settings(BaseSettings):
    """Numerical and runtime settings, overridable through GALTON_* variables."""

    model_config = SettingsConfigDict(
        env_prefix="GALTON_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Application settings
    APP_NAME: str = "galton-rank-order"
    APP_VERSION: str = __version__

    # Runtime
    THREADS: int = 1
    DEFAULT_SEED: int = 20240101

    # Root isolation on t - F_G(t)
    SCAN_CELLS: int = 2**14
    BISECT_TOL: float = 1e-12
    SIGN_TOL: float = 1e-12
    # Zero runs of the scan narrower than this are rounding around one root, wider ones are flat
    FLAT_MIN_WIDTH: float = 1e-2
    CONTACT_BUDGET: int = 64

    # Contact analysis
    JUMP_THRESHOLD: float = 1e-9
    DERIVATIVE_TOL: float = 1e-7
    LIPSCHITZ_TOL: float = 0.05
    INTENSITY_J_MIN: int = 3
    INTENSITY_J_MAX: int = 14

    # Limit-law samplers
    BRIDGE_GRID: int = 4096
    EXTREMAL_STEP_EXPONENT: int = 16
    EXTREMAL_MAX_EXTENSIONS: int = 6
    RENEWAL_TAIL_STEPS: int = 50
    RENEWAL_MAX_STEPS: int = 2_000_000

    # Verification harness
    DEFAULT_SIZES: List[int] = [250, 500, 1000, 2000, 4000]
    DEFAULT_LAMBDA: float = 0.5
    MIN_REPS: int = 100
    RATE_MIN_POINTS: int = 4
    RATE_MIN_DECADES: float = 1.0

    # Oracle
    ENUMERATION_MAX_N: int = 8

    # Monitoring
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"

    @field_validator("THREADS", "SCAN_CELLS", "CONTACT_BUDGET", "MIN_REPS")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Counts must be at least one."""
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("BRIDGE_GRID")
    @classmethod
    def validate_bridge_grid(cls, v: int) -> int:
        """Bridge grids are powers of two, at least 2."""
        if v < 2 or v & (v - 1):
            raise ValueError("BRIDGE_GRID must be a power of two >= 2")
        return v

    @field_validator("DEFAULT_LAMBDA")
    @classmethod
    def validate_lambda(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("DEFAULT_LAMBDA must lie in (0, 1)")
        return v

    @field_validator("DEFAULT_SIZES", mode="before")
    @classmethod
    def assemble_sizes(cls, v: str | List[int]) -> List[int]:
        """Parse sizes from a comma-separated string or list."""
        if isinstance(v, str):
            return [int(item.strip()) for item in v.split(",") if item.strip()]
        return v

    @field_validator("LOG_FORMAT")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        if v not in ("json", "text"):
            raise ValueError("LOG_FORMAT must be 'json' or 'text'")
        return v

    @property
    def intensity_ladder(self) -> range:
        """Dyadic exponents j used for h_j = eta * 2**-j."""
        return range(self.INTENSITY_J_MIN, self.INTENSITY_J_MAX + 1)


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Settings: Application settings
    """
    return Settings()


# Create settings instance
settings = get_settings()
