"""Perturbation parameters of the normal form."""
from enum import Enum
from typing import List, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, computed_field


class Center(str, Enum):
    """The two centers of the unperturbed double center."""
    FIRST = "first"
    SECOND = "second"


class Parameters(BaseModel):
    """The five real perturbation parameters lambda_1..lambda_5.

    The complex coefficients of the normal form
    z' = (l1 + i) z - z^2 + B |z|^2 + C conj(z)^2 are derived on access and never stored.
    """
    model_config = ConfigDict(frozen=True)

    l1: float = Field(default=0.0, description="Linear (trace) parameter")
    l2: float = Field(default=0.0, description="Real part of B")
    l3: float = Field(default=0.0, description="Imaginary part of B")
    l4: float = Field(default=0.0, description="Real part of C")
    l5: float = Field(default=0.0, description="Imaginary part of C")

    @computed_field  # type: ignore[prop-decorator]
    @property
    def A(self) -> float:
        """Coefficient of z^2, identically -1."""
        return -1.0

    @computed_field  # type: ignore[prop-decorator]
    @property
    def B(self) -> complex:
        """Coefficient of |z|^2."""
        return complex(self.l2, self.l3)

    @computed_field  # type: ignore[prop-decorator]
    @property
    def C(self) -> complex:
        """Coefficient of conj(z)^2."""
        return complex(self.l4, self.l5)

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "Parameters":
        """Create from five numbers (l1, ..., l5)."""
        if len(values) != 5:
            raise ValueError(f"expected 5 parameters, got {len(values)}")
        l1, l2, l3, l4, l5 = (float(v) for v in values)
        return cls(l1=l1, l2=l2, l3=l3, l4=l4, l5=l5)

    def as_list(self) -> List[float]:
        """Get the parameters as a list."""
        return [self.l1, self.l2, self.l3, self.l4, self.l5]

    def as_array(self) -> np.ndarray:
        """Get the parameters as a numpy vector."""
        return np.array(self.as_list(), dtype=float)

    def norm_inf(self) -> float:
        """Get the max-norm of the parameter vector."""
        return float(np.max(np.abs(self.as_array())))

    def scaled(self, factor: float) -> "Parameters":
        """Multiply every parameter by a real factor."""
        return Parameters.from_sequence(factor * self.as_array())
