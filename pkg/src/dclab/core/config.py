"""Laboratory configuration using Pydantic Settings management."""
import math
import os
from functools import lru_cache
from pathlib import Path
from typing import Any, ClassVar, Tuple

from pydantic import Field, computed_field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Laboratory settings using Pydantic BaseSettings.

    Attributes:
        BASE_DIR: Workspace root
        DATA_DIR: Directory where CLI artifacts are written
        DCLAB_THREADS: Upper bound on sweep workers
        POLE_TOL: Distance below which two poles are the same pole
        PATH_CLEARANCE: Minimal pole distance from an integration path
        CONTOUR_TOL: Default absolute tolerance of single contour integrals
        ITERATED_TOL: Default absolute tolerance of length-two iterated integrals
        MAX_NODES: Node cap of the quadrature doubling loop
        ODE_RTOL: Default relative tolerance of orbit integration
        ESCAPE_RADIUS: Orbits leaving this ball are reported as escaped
        RETURN_TIME_LIMIT: Orbits not back on their section by this time are open
        DISPLACEMENT_FLOOR: Displacements counted as zero by a census
        SECTION_MARGIN: Distance kept between the second section and the singular line
        ZERO_GRID: Grid size of bifurcation-function zero counting
        CENSUS_GRID: Grid size of the displacement scan in a census
        H_RANGE_FIRST: Desk-scale energy range of the annulus around (0, 0)
        H_RANGE_SECOND: Desk-scale energy range of the annulus around (0, 1)
        SEED: Default seed of randomized runs
    """
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="allow"  # Allow extra fields from .env
    )

    # Base directory is the workspace root
    BASE_DIR: ClassVar[Path] = Path(__file__).parent.parent.parent.parent.resolve()

    ENVIRONMENT: str = Field(
        default="development",
        description="Environment name reported to logfire"
    )
    DCLAB_THREADS: int = Field(
        default_factory=lambda: os.cpu_count() or 1,
        description="Upper bound on the number of sweep workers"
    )

    # Residue calculus and quadrature
    POLE_TOL: float = Field(default=1e-12, description="Pole identity tolerance")
    PATH_CLEARANCE: float = Field(
        default=1e-9,
        description="Minimal distance of a pole from an integration path"
    )
    CONTOUR_TOL: float = Field(default=1e-9, description="Contour integral tolerance")
    ITERATED_TOL: float = Field(default=1e-8, description="Iterated integral tolerance")
    MAX_NODES: int = Field(default=2**20, description="Quadrature node cap")

    # Orbit integration
    ODE_RTOL: float = Field(default=1e-11, description="Orbit integration relative tolerance")
    ESCAPE_RADIUS: float = Field(default=1e3, description="Escape radius of orbits")
    RETURN_TIME_LIMIT: float = Field(
        default=20 * math.pi,
        description="Orbits not returning before this time are open"
    )
    DISPLACEMENT_FLOOR: float = Field(
        default=1e-9,
        description="Displacements below this magnitude count as zero in a census"
    )
    SECTION_MARGIN: float = Field(
        default=0.05,
        description="Smallest distance of the second section from the line y = 1/2"
    )

    # Zero counting and censuses
    ZERO_GRID: int = Field(default=4096, description="Zero counting grid size")
    CENSUS_GRID: int = Field(default=256, description="Census displacement grid size")
    H_RANGE_FIRST: Tuple[float, float] = Field(
        default=(-0.8, -0.01),
        description="Energy range scanned around the center at (0, 0)"
    )
    H_RANGE_SECOND: Tuple[float, float] = Field(
        default=(1.01, 3.0),
        description="Energy range scanned around the center at (0, 1)"
    )
    SEED: int = Field(default=20240601, description="Default random seed")

    DATA_DIR: Path = Field(
        default_factory=lambda: Settings.BASE_DIR / "data",
        description="Directory for CLI artifacts"
    )

    @computed_field
    def WORKERS(self) -> int:
        """Get the effective worker count."""
        return max(1, self.DCLAB_THREADS)

    def model_post_init(self, context: Any) -> None:
        """Make the data directory absolute and create it."""
        self.DATA_DIR = self.DATA_DIR.resolve()
        self.DATA_DIR.mkdir(parents=True, exist_ok=True)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Create a global settings instance
settings = get_settings()
