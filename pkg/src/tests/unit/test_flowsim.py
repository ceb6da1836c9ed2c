"""Tests for orbit integration, return maps and censuses."""
import math
from typing import Dict, Optional, Tuple

import numpy as np
import pytest

from dclab.core import flowsim
from dclab.core.bautin import CenterVariety, center_membership, lv_first_integral
from dclab.core.config import get_settings
from dclab.core.errors import DomainError, EscapeError, OpenOrbitError
from dclab.core.flowsim import (
    census_sweep,
    energy_drift,
    first_return,
    integrate_orbit,
    limit_cycle_census,
    poincare_displacement,
    return_time,
    section_point,
    vector_field,
)
from dclab.core.melnikov import m2_closed, predicted_displacement
from dclab.models import Center, FlowState, Parameters


def test_vector_field_unperturbed() -> None:
    """Test X_0 at a point of the first annulus."""
    assert vector_field(Parameters(), 0.0, -1.0) == (2.0, 0.0)
    dx, dy = vector_field(Parameters(l1=0.5), 1.0, 0.0)
    assert (dx, dy) == (-1.0 + 0.5, 1.0)


def test_section_point_energy() -> None:
    """Test that section points lie on their level."""
    for center, h in ((Center.FIRST, -0.4), (Center.SECOND, 2.5)):
        p = section_point(center, h)
        assert p.x == 0.0
        assert (p.y * p.y) / (2 * p.y - 1) == pytest.approx(h)
    with pytest.raises(DomainError):
        section_point(Center.FIRST, 0.5)
    with pytest.raises(DomainError):
        section_point(Center.SECOND, 0.5)


def test_second_section_keeps_margin() -> None:
    """Test that second section points stay off the singular line y = 1/2."""
    margin = get_settings().SECTION_MARGIN
    assert section_point(Center.SECOND, 3.0).y - 0.5 >= margin
    assert get_settings().H_RANGE_SECOND[1] <= 3.0
    for h in (3.5, 5.0):
        with pytest.raises(DomainError):
            section_point(Center.SECOND, h)


def test_unperturbed_flow_is_isochronous() -> None:
    """Test return time 2 pi and zero displacement for lambda = 0."""
    lam = Parameters()
    for center, h in ((Center.FIRST, -0.5), (Center.SECOND, 3.0)):
        assert return_time(lam, center, h) == pytest.approx(2 * math.pi, rel=1e-9)
        assert abs(poincare_displacement(lam, center, h)) < 1e-9


def test_unperturbed_orbit_closes() -> None:
    """Test that an orbit of X_0 comes back after 2 pi."""
    start = FlowState(x=0.0, y=-1.0)
    traj = integrate_orbit(Parameters(), start, 2 * math.pi)
    assert traj.final.x == pytest.approx(0.0, abs=1e-8)
    assert traj.final.y == pytest.approx(-1.0, abs=1e-8)
    assert energy_drift(Parameters(), start, 2 * math.pi) < 1e-8


def test_flow_state_rejects_escaped_points() -> None:
    """Test that a state outside the escape ball raises."""
    with pytest.raises(EscapeError):
        FlowState(x=0.0, y=2e3)


def test_orbit_escape(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that an orbit leaving the escape ball raises."""
    monkeypatch.setattr(get_settings(), "ESCAPE_RADIUS", 1.5)
    # the level through (0, 0.4) is a circle reaching y = -2
    with pytest.raises(EscapeError):
        integrate_orbit(Parameters(), FlowState(x=0.0, y=0.4), 2 * math.pi)


def test_open_orbit(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that no return before the time limit raises."""
    monkeypatch.setattr(get_settings(), "RETURN_TIME_LIMIT", 1.0)
    with pytest.raises(OpenOrbitError):
        first_return(Parameters(), Center.FIRST, -0.5)


def test_parameter_ball() -> None:
    """Test that parameters outside the ball are rejected."""
    with pytest.raises(DomainError):
        first_return(Parameters(l2=0.2), Center.FIRST, -0.5)


def test_rel_tol_bounds() -> None:
    """Test the accepted range of relative tolerances."""
    with pytest.raises(ValueError):
        integrate_orbit(Parameters(), FlowState(x=0.0, y=-1.0), 1.0, rel_tol=1e-3)


@pytest.mark.parametrize(
    "lam, center, h",
    [
        (Parameters(l1=1e-3), Center.FIRST, -0.5),
        (Parameters(l3=-1e-3), Center.FIRST, -0.3),
        (Parameters(l5=1e-3), Center.SECOND, 2.0),
        (Parameters(l1=1e-3, l3=2e-3), Center.SECOND, 1.6),
    ],
)
def test_displacement_first_order(lam: Parameters, center: Center, h: float) -> None:
    """Test the extrapolated linear part of the displacement against the first-order prediction."""
    d = poincare_displacement(lam, center, h)
    d_half = poincare_displacement(lam.scaled(0.5), center, h)
    # 4 d(lambda / 2) - d(lambda) cancels the quadratic part
    linear = 4 * d_half - d
    assert linear == pytest.approx(predicted_displacement(lam, center, h), rel=1e-2)
    assert d == pytest.approx(predicted_displacement(lam, center, h), rel=6e-2)


@pytest.mark.slow
def test_displacement_second_order_link() -> None:
    """Test that the extrapolated displacement along (0, e, 0, 0, e) is proportional to M2."""
    epsilons = (4e-3, 2e-3, 1e-3)
    ratios = []
    for h in (-0.4, -0.6, -0.8):
        r = [
            poincare_displacement(Parameters(l2=eps, l5=eps), Center.FIRST, h, rel_tol=1e-13) / eps**2
            for eps in epsilons
        ]
        order = math.log2(abs(r[0] - r[1]) / abs(r[1] - r[2]))
        assert 0.5 < order < 3.0
        limit = (2**order * r[2] - r[1]) / (2**order - 1)
        ratios.append(limit / m2_closed(Center.FIRST, h))
    spread = (max(ratios) - min(ratios)) / abs(np.mean(ratios))
    assert spread < 1e-2
    assert np.mean(ratios) == pytest.approx(-4.0, rel=1e-2)


def test_census_unperturbed() -> None:
    """Test that the unperturbed census is empty and center-like."""
    census = limit_cycle_census(Parameters(), grid=16)
    assert (census.i, census.j) == (0, 0)
    assert census.diagnostics.center_like_first
    assert census.diagnostics.center_like_second


def test_census_single_cycle() -> None:
    """Test one hyperbolic cycle around (0, 0) near h = -0.4."""
    census = limit_cycle_census(Parameters(l1=0.01, l3=-0.035), grid=32)
    assert (census.i, census.j) == (1, 0)
    assert census.cycle_levels_first[0] == pytest.approx(-0.4, abs=5e-2)
    assert census.diagnostics.non_hyperbolic == []


@pytest.mark.slow
def test_census_fixtures(census_fixtures: Dict[Tuple[int, int], Parameters]) -> None:
    """Test every admissible census on its committed realization."""
    for (i, j), lam in census_fixtures.items():
        assert lam.norm_inf() <= 0.05
        census = limit_cycle_census(lam)
        assert (census.i, census.j) == (i, j), f"expected {(i, j)} for {lam.as_list()}"


@pytest.mark.slow
def test_census_swapped_by_involution(census_fixtures: Dict[Tuple[int, int], Parameters]) -> None:
    """Test that the involution swaps the two cycle counts."""
    census = limit_cycle_census(census_fixtures[(0, 2)])
    assert census.swapped().i == 2 and census.swapped().j == 0


@pytest.mark.slow
def test_center_sets_have_no_cycles(rng: np.random.Generator) -> None:
    """Test that each center component carries no cycles around its own center."""
    for _ in range(20):
        a, b = rng.uniform(-0.04, 0.04, 2)
        l1 = rng.uniform(-0.04, 0.04)
        points = [
            Parameters(l2=a, l4=b),
            Parameters(l4=a, l5=b),
            Parameters(l1=l1, l2=a, l3=-l1 * (1 + a)),
        ]
        for lam in points:
            found = center_membership(lam)
            census = limit_cycle_census(lam)
            if CenterVariety.RV1 in found or CenterVariety.LV1 in found:
                assert census.i == 0
            if CenterVariety.RV2 in found or CenterVariety.LV2 in found:
                assert census.j == 0


@pytest.mark.parametrize("center, h", [(Center.FIRST, -0.5), (Center.SECOND, 1.5), (Center.SECOND, 2.5)])
def test_darboux_integral_conserved(center: Center, h: float) -> None:
    """Test that the Lotka-Volterra first integral is constant over one return."""
    l1, l2 = 0.02, 0.1
    lam = Parameters(l1=l1, l2=l2, l3=-l1 * (1 + l2))
    period = return_time(lam, center, h)
    traj = integrate_orbit(lam, section_point(center, h), period)
    theta = None
    values = []
    for x, y in zip(traj.x, traj.y):
        value, theta = lv_first_integral(lam, float(x), float(y), theta)
        values.append(value)
    drift = (max(values) - min(values)) / abs(values[0])
    assert drift < 1e-6


def test_lotka_volterra_second_annulus_closes() -> None:
    """Test that orbits around (0, 1) close on the Lotka-Volterra center set."""
    l1, l2 = 0.02, 0.1
    lam = Parameters(l1=l1, l2=l2, l3=-l1 * (1 + l2))
    assert CenterVariety.LV2 in center_membership(lam)
    for h in (1.2, 1.6, 2.0, 2.8):
        assert abs(poincare_displacement(lam, Center.SECOND, h)) < 1e-8
    assert abs(poincare_displacement(lam, Center.FIRST, -0.5)) > 1e-4


def test_census_rejects_jumps(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that a sign change across a jump of the return map is not counted."""

    def displacement(lam: Parameters, center: Center, h: float, rel_tol: Optional[float] = None) -> float:
        if center is Center.FIRST:
            return 1e-3 * (h + 0.3)
        return 1.0 if h < 2.2 else -1.0

    monkeypatch.setattr(flowsim, "poincare_displacement", displacement)
    census = limit_cycle_census(Parameters(), grid=16)
    assert (census.i, census.j) == (1, 0)
    assert census.cycle_levels_first[0] == pytest.approx(-0.3, abs=1e-8)
    assert census.diagnostics.rejected_second == [pytest.approx(2.2, abs=1e-8)]
    assert census.swapped().diagnostics.rejected_first == census.diagnostics.rejected_second


@pytest.mark.slow
def test_census_sweep_admissible() -> None:
    """Test that the census sweep near each component finds only admissible pairs."""
    histogram = census_sweep(4, 11, n_jobs=2)
    for bucket in histogram.values():
        for key in bucket:
            if key == "failed":
                continue
            i, j = (int(v) for v in key.split(","))
            assert i + j <= 2
            assert (i, j) not in {(2, 1), (1, 2)}
