"""Models for orbits, return maps and limit-cycle censuses."""
import math
from typing import Dict, List

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dclab.core.config import get_settings
from dclab.core.errors import EscapeError, InvariantViolation


class FlowState(BaseModel):
    """A point of the phase plane at a time."""
    model_config = ConfigDict(frozen=True)

    x: float = Field(description="Abscissa")
    y: float = Field(description="Ordinate")
    t: float = Field(default=0.0, description="Time")

    @model_validator(mode="after")
    def check_finite(self) -> "FlowState":
        """Check the state is finite and inside the escape ball."""
        if not all(math.isfinite(v) for v in (self.x, self.y, self.t)):
            raise InvariantViolation("flow state must be finite")
        if math.hypot(self.x, self.y) >= get_settings().ESCAPE_RADIUS:
            raise EscapeError(f"state ({self.x}, {self.y}) outside the escape ball")
        return self


class Trajectory(BaseModel):
    """Sampled orbit with the solver's step points."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    t: np.ndarray = Field(description="Times")
    x: np.ndarray = Field(description="Abscissae")
    y: np.ndarray = Field(description="Ordinates")

    @property
    def final(self) -> FlowState:
        """Last state."""
        return FlowState(x=float(self.x[-1]), y=float(self.y[-1]), t=float(self.t[-1]))


class CensusDiagnostics(BaseModel):
    """Side information of a census scan."""
    model_config = ConfigDict(frozen=True)

    tangency_first: bool = Field(default=False, description="Suspected tangency, first annulus")
    tangency_second: bool = Field(default=False, description="Suspected tangency, second annulus")
    slopes_first: List[float] = Field(default_factory=list, description="Displacement slopes")
    slopes_second: List[float] = Field(default_factory=list, description="Displacement slopes")
    non_hyperbolic: List[float] = Field(
        default_factory=list,
        description="Cycle levels whose slope is below the hyperbolicity threshold"
    )
    rejected_first: List[float] = Field(
        default_factory=list,
        description="Sign changes across a jump of the return map, first annulus"
    )
    rejected_second: List[float] = Field(
        default_factory=list,
        description="Sign changes across a jump of the return map, second annulus"
    )
    center_like_first: bool = Field(default=False, description="Displacement below floor everywhere")
    center_like_second: bool = Field(default=False, description="Displacement below floor everywhere")
    max_displacement: Dict[str, float] = Field(
        default_factory=dict,
        description="Largest scanned |displacement| per annulus"
    )


class Census(BaseModel):
    """Distribution (i, j) of limit cycles over the two annuli."""
    model_config = ConfigDict(frozen=True)

    cycle_levels_first: List[float] = Field(default_factory=list, description="Cycle energies near (0, 0)")
    cycle_levels_second: List[float] = Field(default_factory=list, description="Cycle energies near (0, 1)")
    diagnostics: CensusDiagnostics = Field(default_factory=CensusDiagnostics)

    @property
    def i(self) -> int:
        """Number of cycles around the first center."""
        return len(self.cycle_levels_first)

    @property
    def j(self) -> int:
        """Number of cycles around the second center."""
        return len(self.cycle_levels_second)

    def swapped(self) -> "Census":
        """Census with the two annuli exchanged."""
        d = self.diagnostics
        return Census(
            cycle_levels_first=self.cycle_levels_second,
            cycle_levels_second=self.cycle_levels_first,
            diagnostics=CensusDiagnostics(
                tangency_first=d.tangency_second,
                tangency_second=d.tangency_first,
                slopes_first=d.slopes_second,
                slopes_second=d.slopes_first,
                non_hyperbolic=d.non_hyperbolic,
                rejected_first=d.rejected_second,
                rejected_second=d.rejected_first,
                center_like_first=d.center_like_second,
                center_like_second=d.center_like_first,
                max_displacement={
                    "first": d.max_displacement.get("second", 0.0),
                    "second": d.max_displacement.get("first", 0.0),
                },
            ),
        )
