"""Models for Melnikov computations."""
from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dclab.core.errors import InvariantViolation


class ComponentTag(str, Enum):
    """Components of the exceptional divisor and center-variety flags."""
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    INSIDE_1 = "inside_center_variety_1"
    INSIDE_2 = "inside_center_variety_2"


class IntegralEstimate(BaseModel):
    """Result of an adaptive quadrature."""
    model_config = ConfigDict(frozen=True)

    value: complex = Field(description="Integral value")
    error: float = Field(description="Absolute error estimate")
    nodes: int = Field(description="Nodes used by the final pass")


class MonodromyClass(BaseModel):
    """Homology class k_delta * delta + k_comm * (alpha, beta) of the orbit."""
    model_config = ConfigDict(frozen=True)

    k_delta: int = Field(default=0, description="Coefficient of the vanishing cycle")
    k_comm: int = Field(default=0, description="Coefficient of the commutator (alpha, beta)")

    def __add__(self, other: "MonodromyClass") -> "MonodromyClass":
        """Componentwise group law."""
        return MonodromyClass(
            k_delta=self.k_delta + other.k_delta,
            k_comm=self.k_comm + other.k_comm,
        )


class BifurcationPair(BaseModel):
    """Projective coefficient triples of the two bifurcation functions."""
    model_config = ConfigDict(frozen=True)

    c1: Tuple[float, float, float] = Field(description="Triple of the first center")
    c2: Tuple[float, float, float] = Field(description="Triple of the second center")
    component_tag: ComponentTag = Field(description="Exceptional-divisor component")

    @model_validator(mode="after")
    def check_nonzero(self) -> "BifurcationPair":
        """Check the triples are projective points."""
        if not any(self.c1) or not any(self.c2):
            raise InvariantViolation("projective triples must be nonzero")
        if self.component_tag not in (ComponentTag.E1, ComponentTag.E2, ComponentTag.E3):
            raise InvariantViolation("bifurcation pairs live on E1, E2 or E3")
        return self


class ZeroCount(BaseModel):
    """Zeros of a real function found by sign changes."""
    model_config = ConfigDict(frozen=True)

    zeros: List[float] = Field(default_factory=list, description="Polished zero locations")
    suspected_tangency: bool = Field(
        default=False,
        description="Sign-change count changed under grid doubling"
    )

    @property
    def count(self) -> int:
        """Number of zeros."""
        return len(self.zeros)
