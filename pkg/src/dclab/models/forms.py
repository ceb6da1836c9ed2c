"""Models for partial-fraction rational functions and relative one-forms."""
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from dclab.core.config import get_settings
from dclab.core.errors import InvariantViolation

# Relative threshold under which a coefficient counts as a rounding zero.
PRUNE_RTOL = 1e-13


class PoleTerm(BaseModel):
    """A single principal-part term coefficient / (z - location)^order."""
    model_config = ConfigDict(frozen=True)

    location: complex = Field(description="Pole location")
    order: int = Field(ge=1, description="Pole order")
    coefficient: complex = Field(description="Coefficient of (z - location)^(-order)")


class PartialFractionForm(BaseModel):
    """A complex rational function of z in partial-fraction representation.

    The value is ``sum_k polynomial_part[k] z^k + sum_terms c / (z - p)^m``.
    Terms sharing a pole location share it exactly; distinct locations are more than
    the ``POLE_TOL`` setting apart.
    """
    model_config = ConfigDict(frozen=True)

    polynomial_part: Tuple[complex, ...] = Field(
        default=(),
        description="Polynomial coefficients in ascending powers of z"
    )
    pole_terms: Tuple[PoleTerm, ...] = Field(
        default=(),
        description="Principal-part terms"
    )

    @model_validator(mode="before")
    @classmethod
    def prune_zero_coefficients(cls, data: object) -> object:
        """Drop zero coefficients and trailing zero polynomial coefficients."""
        if not isinstance(data, dict):
            return data
        poly = [complex(c) for c in data.get("polynomial_part", ())]
        terms = [
            t if isinstance(t, PoleTerm) else PoleTerm(**t)
            for t in data.get("pole_terms", ())
        ]
        scale = max([1.0] + [abs(c) for c in poly] + [abs(t.coefficient) for t in terms])
        cutoff = PRUNE_RTOL * scale
        poly = [c if abs(c) > cutoff else 0j for c in poly]
        while poly and poly[-1] == 0j:
            poly.pop()
        terms = [t for t in terms if abs(t.coefficient) > cutoff]
        return {"polynomial_part": tuple(poly), "pole_terms": tuple(terms)}

    @model_validator(mode="after")
    def check_pole_identity(self) -> "PartialFractionForm":
        """Check that poles are either identical or well separated."""
        pole_tol = get_settings().POLE_TOL
        seen: Dict[Tuple[complex, int], bool] = {}
        for i, t in enumerate(self.pole_terms):
            key = (t.location, t.order)
            if key in seen:
                raise InvariantViolation(f"duplicate term of order {t.order} at {t.location}")
            seen[key] = True
            for other in self.pole_terms[i + 1:]:
                gap = abs(other.location - t.location)
                if 0.0 < gap < pole_tol:
                    raise InvariantViolation(
                        f"poles {t.location} and {other.location} closer than {pole_tol}"
                    )
        return self

    def poles(self) -> List[complex]:
        """Get the distinct pole locations."""
        out: List[complex] = []
        for t in self.pole_terms:
            if t.location not in out:
                out.append(t.location)
        return out

    def max_order(self, location: complex) -> int:
        """Get the pole order at a location (0 if regular)."""
        pole_tol = get_settings().POLE_TOL
        orders = [t.order for t in self.pole_terms if abs(t.location - location) < pole_tol]
        return max(orders, default=0)

    def evaluate(self, z: np.ndarray | complex) -> np.ndarray:
        """Evaluate at one or many points."""
        z = np.asarray(z, dtype=complex)
        value = np.polynomial.polynomial.polyval(z, np.array(self.polynomial_part or (0j,)))
        value = np.asarray(value, dtype=complex)
        for t in self.pole_terms:
            value = value + t.coefficient / (z - t.location) ** t.order
        return value

    def derivative(self) -> "PartialFractionForm":
        """Get the exact z-derivative."""
        poly = [k * c for k, c in enumerate(self.polynomial_part)][1:]
        terms = [
            PoleTerm(
                location=t.location,
                order=t.order + 1,
                coefficient=-t.order * t.coefficient,
            )
            for t in self.pole_terms
        ]
        return PartialFractionForm(polynomial_part=tuple(poly), pole_terms=tuple(terms))

    def scale(self, factor: complex) -> "PartialFractionForm":
        """Multiply by a constant."""
        return PartialFractionForm(
            polynomial_part=tuple(factor * c for c in self.polynomial_part),
            pole_terms=tuple(
                PoleTerm(location=t.location, order=t.order, coefficient=factor * t.coefficient)
                for t in self.pole_terms
            ),
        )

    def __add__(self, other: "PartialFractionForm") -> "PartialFractionForm":
        """Add two forms, merging terms that share a pole and an order."""
        n = max(len(self.polynomial_part), len(other.polynomial_part))
        poly = [0j] * n
        for k, c in enumerate(self.polynomial_part):
            poly[k] += c
        for k, c in enumerate(other.polynomial_part):
            poly[k] += c

        pole_tol = get_settings().POLE_TOL
        merged: List[PoleTerm] = list(self.pole_terms)
        for t in other.pole_terms:
            for idx, m in enumerate(merged):
                if m.order == t.order and abs(m.location - t.location) < pole_tol:
                    merged[idx] = PoleTerm(
                        location=m.location,
                        order=m.order,
                        coefficient=m.coefficient + t.coefficient,
                    )
                    break
            else:
                # Snap onto an existing location so the identity invariant holds
                location = next(
                    (m.location for m in merged if abs(m.location - t.location) < pole_tol),
                    t.location,
                )
                merged.append(PoleTerm(location=location, order=t.order, coefficient=t.coefficient))
        return PartialFractionForm(polynomial_part=tuple(poly), pole_terms=tuple(merged))

    def __sub__(self, other: "PartialFractionForm") -> "PartialFractionForm":
        """Subtract two forms."""
        return self + other.scale(-1.0)


class RelativeOneForm(BaseModel):
    """A one-form F dz + Phi dh in the (z, h) chart at a fixed level h."""
    model_config = ConfigDict(frozen=True)

    h: complex = Field(description="Energy level the coefficients are frozen at")
    F: PartialFractionForm = Field(description="dz-component")
    Phi: PartialFractionForm = Field(description="dh-component")
    dF_dh: Optional[PartialFractionForm] = Field(
        None,
        description="h-derivative of F at frozen z"
    )
    label: str = Field(default="", description="Human readable name")

    def scale(self, factor: complex) -> "RelativeOneForm":
        """Multiply by a constant."""
        return RelativeOneForm(
            h=self.h,
            F=self.F.scale(factor),
            Phi=self.Phi.scale(factor),
            dF_dh=self.dF_dh.scale(factor) if self.dF_dh is not None else None,
            label=f"{factor}*{self.label}" if self.label else "",
        )

    def __add__(self, other: "RelativeOneForm") -> "RelativeOneForm":
        """Add two forms frozen at the same level."""
        if abs(self.h - other.h) > get_settings().POLE_TOL:
            raise InvariantViolation("cannot add forms frozen at different levels")
        dF_dh = None
        if self.dF_dh is not None and other.dF_dh is not None:
            dF_dh = self.dF_dh + other.dF_dh
        label = " + ".join(part for part in (self.label, other.label) if part)
        return RelativeOneForm(
            h=self.h, F=self.F + other.F, Phi=self.Phi + other.Phi, dF_dh=dF_dh, label=label
        )
