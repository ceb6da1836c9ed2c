"""Models for parameter arcs and their limit points on the blow-up."""
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dclab.core.errors import InvariantViolation, ZeroArcError
from dclab.models.melnikov import ComponentTag

Triple = Tuple[Fraction, Fraction, Fraction]


class ArcGerm(BaseModel):
    """A polynomial arc eps -> lambda(eps) with exact rational coefficients.

    ``components[k][n]`` is the coefficient of eps^n in lambda_{k+1}.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    components: Tuple[Tuple[Fraction, ...], ...] = Field(
        description="Ascending coefficients of the five component polynomials"
    )

    @model_validator(mode="after")
    def check_germ(self) -> "ArcGerm":
        """Check lambda(0) = 0 and that the arc is not identically zero."""
        if len(self.components) != 5:
            raise InvariantViolation("an arc has exactly five components")
        for k, coeffs in enumerate(self.components):
            if coeffs and coeffs[0] != 0:
                raise InvariantViolation(f"component l{k + 1} has a nonzero constant term")
        if not any(c != 0 for coeffs in self.components for c in coeffs):
            raise ZeroArcError("the arc is identically zero")
        return self

    def evaluate(self, eps: float) -> List[float]:
        """Evaluate the five components at a float eps."""
        return [
            sum(float(c) * eps**n for n, c in enumerate(coeffs))
            for coeffs in self.components
        ]


class ProjectivePair(BaseModel):
    """Limit point of an arc in P^2 x P^2 with its component tag.

    A factor is ``None`` when the arc lies identically inside the matching center variety.
    Triples are normalized so that their first nonzero coordinate is 1.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    p1: Optional[Triple] = Field(None, description="Limit of the first-center generators")
    p2: Optional[Triple] = Field(None, description="Limit of the second-center generators")
    component: ComponentTag = Field(description="Component selected by the order analysis")
    satisfied: Tuple[ComponentTag, ...] = Field(
        default=(),
        description="Every component whose defining equations the point satisfies"
    )

    @model_validator(mode="after")
    def check_normalized(self) -> "ProjectivePair":
        """Check normalization and the inside-flag consistency."""
        for name, triple in (("p1", self.p1), ("p2", self.p2)):
            if triple is None:
                continue
            lead = next((c for c in triple if c != 0), None)
            if lead != 1:
                raise InvariantViolation(f"{name} is not normalized: {triple}")
        if self.p1 is None and self.component is not ComponentTag.INSIDE_1:
            raise InvariantViolation("missing p1 requires the inside_center_variety_1 flag")
        if (
            self.p2 is None
            and self.p1 is not None
            and self.component is not ComponentTag.INSIDE_2
        ):
            raise InvariantViolation("missing p2 requires the inside_center_variety_2 flag")
        return self

    def as_floats(self) -> dict[str, Optional[List[float]]]:
        """Get both triples as float lists."""
        return {
            "p1": [float(c) for c in self.p1] if self.p1 is not None else None,
            "p2": [float(c) for c in self.p2] if self.p2 is not None else None,
        }
