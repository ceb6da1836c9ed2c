"""Models for command-line runs."""
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from dclab.models.parameters import Parameters

CRITICAL_MARGIN = 1e-4


class Command(str, Enum):
    """CLI subcommands."""
    MELNIKOV = "melnikov"
    SHUFFLE_CHECK = "shuffle-check"
    COMMUTATOR = "commutator"
    CENSUS = "census"
    CENSUS_SWEEP = "census-sweep"
    CLASSIFY_ARC = "classify-arc"
    SWEEP_COMPONENTS = "sweep-components"
    INVOLUTION = "involution"


class OutputFormat(str, Enum):
    """Artifact formats."""
    CSV = "csv"
    JSON = "json"


class HGrid(BaseModel):
    """Uniform energy grid lo:hi:n."""
    model_config = ConfigDict(frozen=True)

    lo: float = Field(description="First energy")
    hi: float = Field(description="Last energy")
    n: int = Field(ge=1, description="Number of points")

    @classmethod
    def parse(cls, text: str) -> "HGrid":
        """Parse ``lo:hi:n``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"expected lo:hi:n, got {text!r}")
        return cls(lo=float(parts[0]), hi=float(parts[1]), n=int(parts[2]))

    @model_validator(mode="after")
    def check_critical(self) -> "HGrid":
        """Keep the grid away from the critical values 0 and 1."""
        for h in self.values():
            if min(abs(h), abs(h - 1.0)) < CRITICAL_MARGIN:
                raise ValueError(f"grid point {h} is within {CRITICAL_MARGIN} of a critical value")
        return self

    def values(self) -> List[float]:
        """Get the grid points."""
        return [float(v) for v in np.linspace(self.lo, self.hi, self.n)]


class RunConfig(BaseModel):
    """Validated configuration of one CLI invocation."""
    model_config = ConfigDict(frozen=True)

    command: Command = Field(description="Subcommand")
    parameters: Parameters = Field(default_factory=Parameters, description="lambda_1..lambda_5")
    h: Optional[float] = Field(default=None, description="Single energy level")
    h_imag: float = Field(default=0.0, description="Imaginary part of h for complex-level runs")
    h_grid: Optional[HGrid] = Field(default=None, description="Energy grid")
    h_range_first: Optional[Tuple[float, float]] = Field(default=None, description="First annulus scan")
    h_range_second: Optional[Tuple[float, float]] = Field(default=None, description="Second annulus scan")
    center: int = Field(default=1, ge=1, le=2, description="1 for (0, 0), 2 for (0, 1)")
    order: int = Field(default=1, ge=1, le=2, description="Melnikov order")
    oracle: bool = Field(default=False, description="Also compute the numeric oracle")
    arc: Optional[str] = Field(default=None, description="Arc string such as \"l1=e; l3=-e\"")
    samples: int = Field(default=1000, ge=1, description="Sweep sample count")
    contour_tol: float = Field(default=1e-9, ge=1e-14, le=1e-3, description="Contour tolerance")
    iterated_tol: float = Field(default=1e-8, ge=1e-13, le=1e-3, description="Iterated tolerance")
    rel_tol: float = Field(default=1e-11, ge=1e-13, le=1e-6, description="ODE relative tolerance")
    seed: int = Field(default=20240601, description="Random seed")
    output_format: OutputFormat = Field(default=OutputFormat.JSON, description="Artifact format")
    out: Optional[Path] = Field(default=None, description="Artifact path")
    threads: Optional[int] = Field(default=None, ge=1, description="Worker override")
    quiet: bool = Field(default=False, description="Suppress the rich summary")

    @field_validator("h")
    @classmethod
    def check_h(cls, v: Optional[float]) -> Optional[float]:
        """Keep single energies away from the critical values."""
        if v is not None and min(abs(v), abs(v - 1.0)) < CRITICAL_MARGIN:
            raise ValueError(f"h = {v} is within {CRITICAL_MARGIN} of a critical value")
        return v
