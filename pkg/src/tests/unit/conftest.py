"""Test configuration and fixtures."""
from typing import Dict, Tuple

import numpy as np
import pytest

from dclab.core.bautin import involution_parameters
from dclab.models import Parameters

# lambda_2 = lambda_5 for the two-cycle realization; lambda_1, lambda_3 scale with its square
TWO_CYCLE_EPS = 0.004


@pytest.fixture
def rng() -> np.random.Generator:
    """Fixture for a seeded random generator."""
    return np.random.default_rng(20240601)


@pytest.fixture
def zero_parameters() -> Parameters:
    """Fixture for the unperturbed double center."""
    return Parameters()


@pytest.fixture
def generic_parameters() -> Parameters:
    """Fixture for a generic small parameter point."""
    return Parameters(l1=0.013, l2=-0.021, l3=0.008, l4=0.017, l5=-0.011)


@pytest.fixture
def first_levels() -> Tuple[float, ...]:
    """Fixture for energies inside the annulus around (0, 0)."""
    return (-0.25, -0.5, -1.0, -2.0)


@pytest.fixture
def second_levels() -> Tuple[float, ...]:
    """Fixture for energies inside the annulus around (0, 1)."""
    return (1.25, 1.5, 2.0, 3.0)


def two_cycle_parameters() -> Parameters:
    """Two cycles around (0, 0) at h = -0.2 and h = -0.6, none around (0, 1)."""
    eps = TWO_CYCLE_EPS
    scale = (eps / 0.01) ** 2
    return Parameters(l1=0.048516e-4 * scale, l2=eps, l3=-0.407174e-4 * scale, l4=0.0, l5=eps)


@pytest.fixture
def census_fixtures() -> Dict[Tuple[int, int], Parameters]:
    """Fixture for parameter points realizing each admissible census."""
    two = two_cycle_parameters()
    return {
        (0, 0): Parameters(),
        (1, 0): Parameters(l1=0.01, l3=-0.035),
        (0, 1): Parameters(l3=0.02, l5=0.02),
        (1, 1): Parameters(l1=0.01, l3=-0.035, l5=-0.025),
        (2, 0): two,
        (0, 2): involution_parameters(two),
    }


@pytest.fixture
def e2_arc_text() -> str:
    """Fixture for an arc through E2 with second limit point [0:3:2]."""
    return "l1=e; l2=e^2; l3=-e; l4=-2*e; l5=3*e^2"
