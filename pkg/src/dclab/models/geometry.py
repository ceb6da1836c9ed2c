"""Models for the geometry of the complex level curves."""
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, computed_field


class LoopKind(str, Enum):
    """Canonical loops on a level curve."""
    ALPHA = "alpha"
    BETA = "beta"
    GAMMA = "gamma"
    DELTA = "delta"
    DELTA_TILDE = "delta_tilde"


class Punctures(BaseModel):
    """Punctures of the level curve in the z chart."""
    model_config = ConfigDict(frozen=True)

    h: complex = Field(description="Energy level")
    a: complex = Field(description="Puncture -i h")
    b: complex = Field(description="Puncture -i (h - 1)")
    c: complex = Field(default=0j, description="Puncture at the origin")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def R2(self) -> complex:
        """Squared radius h (h - 1) of the real oval, equal to -a b."""
        return -self.a * self.b

    def as_tuple(self) -> tuple[complex, complex, complex]:
        """Get (c, a, b), the order used for winding-number vectors."""
        return (self.c, self.a, self.b)
