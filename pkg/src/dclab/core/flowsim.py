"""Direct numerical dynamics of the perturbed double center.

Orbits are integrated with scipy's DOP853. Return maps live on the vertical
sections through the two centers and are parameterized by the unperturbed energy.
"""
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import logfire
import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from dclab.core.config import get_settings
from dclab.core.bautin import realize_component
from dclab.core.curvegeom import hamiltonian
from dclab.core.errors import ConvergenceError, DomainError, EscapeError, OpenOrbitError
from dclab.core.workers import run_ordered
from dclab.models.flow import Census, CensusDiagnostics, FlowState, Trajectory
from dclab.models.melnikov import ComponentTag
from dclab.models.parameters import Center, Parameters

PARAMETER_BALL = 0.1
CYCLE_XTOL = 1e-10
HYPERBOLIC_SLOPE = 1e-12
# a sign change across a jump of the return map brackets no cycle
JUMP_SLOPE = 1e3
JUMP_RESIDUAL = 1e-6
REL_TOL_RANGE = (1e-13, 1e-6)
COMPONENT_STREAMS = ("E1", "E2", "E3")

Event = Callable[[float, np.ndarray], float]


def vector_field(lam: Parameters, x: float, y: float) -> Tuple[float, float]:
    """Evaluate X_lambda at a point; numpy arrays are accepted as well."""
    l1, l2, l3, l4, l5 = lam.as_list()
    r2 = x * x + y * y
    d2 = x * x - y * y
    dx = -y - x * x + y * y + l1 * x + l2 * r2 + l4 * d2 + 2 * l5 * x * y
    dy = x - 2 * x * y + l1 * y + l3 * r2 + l5 * d2 - 2 * l4 * x * y
    return dx, dy


def _check_rel_tol(rel_tol: float) -> None:
    lo, hi = REL_TOL_RANGE
    if not lo <= rel_tol <= hi:
        raise ValueError(f"rel_tol must lie in [{lo}, {hi}], got {rel_tol}")


def _escape_event(t: float, state: np.ndarray) -> float:
    return get_settings().ESCAPE_RADIUS - math.hypot(state[0], state[1])


_escape_event.terminal = True  # type: ignore[attr-defined]


def _solve(
    lam: Parameters,
    state: Sequence[float],
    t0: float,
    t1: float,
    rel_tol: float,
    events: Sequence[Event] = (),
    dense: bool = False,
) -> Any:
    """Run DOP853 with the escape event first in the event list."""

    def rhs(t: float, s: np.ndarray) -> List[float]:
        dx, dy = vector_field(lam, s[0], s[1])
        return [dx, dy]

    sol = solve_ivp(
        rhs,
        (t0, t1),
        list(state),
        method="DOP853",
        rtol=rel_tol,
        atol=rel_tol * 1e-2,
        events=[_escape_event, *events],
        dense_output=dense,
    )
    if sol.status == -1:
        logfire.error("orbit_integration_failed", error=sol.message, error_type="ConvergenceError")
        raise ConvergenceError(f"orbit integration failed: {sol.message}")
    if sol.t_events[0].size:
        logfire.warning("orbit_escaped", t=float(sol.t_events[0][0]))
        raise EscapeError(f"orbit left the escape ball at t = {sol.t_events[0][0]}")
    return sol


def integrate_orbit(
    lam: Parameters,
    start: FlowState,
    t_span: float,
    rel_tol: Optional[float] = None,
) -> Trajectory:
    """Integrate an orbit over a time span.

    Raises:
        EscapeError: the orbit left the escape ball
        ConvergenceError: the integrator failed
    """
    rel_tol = get_settings().ODE_RTOL if rel_tol is None else rel_tol
    _check_rel_tol(rel_tol)
    sol = _solve(lam, (start.x, start.y), start.t, start.t + t_span, rel_tol)
    return Trajectory(t=sol.t, x=sol.y[0], y=sol.y[1])


def section_point(center: Center, h: float) -> FlowState:
    """Get the point of the vertical section through a center at energy h.

    Raises:
        DomainError: h outside the center's period annulus, or a second section point
            closer than SECTION_MARGIN to the singular line y = 1/2
    """
    center = Center(center)
    if center is Center.FIRST and not h < 0:
        raise DomainError(f"the first section needs h < 0, got {h}")
    if center is Center.SECOND and not h > 1:
        raise DomainError(f"the second section needs h > 1, got {h}")
    y = h - math.sqrt(h * (h - 1))
    margin = get_settings().SECTION_MARGIN
    if center is Center.SECOND and y - 0.5 < margin:
        raise DomainError(f"the second section point y = {y:.4f} at h = {h} is within {margin} of y = 1/2")
    return FlowState(x=0.0, y=y, t=0.0)


def _crossing(direction: int) -> Event:
    def event(t: float, state: np.ndarray) -> float:
        return float(state[0])

    event.terminal = True  # type: ignore[attr-defined]
    event.direction = direction  # type: ignore[attr-defined]
    return event


def first_return(
    lam: Parameters,
    center: Center,
    h: float,
    rel_tol: Optional[float] = None,
) -> FlowState:
    """Follow the orbit from the section point at level h back to the section.

    The first center turns counterclockwise and the second clockwise, so the
    opposite crossing is located first and the same-direction one second.

    Raises:
        EscapeError: the orbit left the escape ball
        OpenOrbitError: no return before the time limit
    """
    settings = get_settings()
    rel_tol = settings.ODE_RTOL if rel_tol is None else rel_tol
    _check_rel_tol(rel_tol)
    center = Center(center)
    if lam.norm_inf() > PARAMETER_BALL:
        raise DomainError(f"parameters must lie in the ball of radius {PARAMETER_BALL}")
    start = section_point(center, h)
    outward = 1 if center is Center.FIRST else -1
    state: Tuple[float, float] = (start.x, start.y)
    t = 0.0
    for direction in (-outward, outward):
        sol = _solve(lam, state, t, settings.RETURN_TIME_LIMIT, rel_tol, [_crossing(direction)])
        hits = sol.t_events[1]
        if not hits.size:
            logfire.warning("orbit_open", center=center.value, h=h)
            raise OpenOrbitError(f"no return to the section from h = {h} before t = {settings.RETURN_TIME_LIMIT}")
        t = float(hits[0])
        y_hit = sol.y_events[1][0]
        state = (0.0, float(y_hit[1]))
    return FlowState(x=0.0, y=state[1], t=t)


def poincare_displacement(
    lam: Parameters,
    center: Center,
    h: float,
    rel_tol: Optional[float] = None,
) -> float:
    """Get H(return point) - h for the orbit through the section point at level h."""
    back = first_return(lam, center, h, rel_tol)
    return hamiltonian(0.0, back.y) - h


def return_time(lam: Parameters, center: Center, h: float, rel_tol: Optional[float] = None) -> float:
    """Get the time of first return to the section, 2 pi for the unperturbed flow."""
    return first_return(lam, center, h, rel_tol).t


def energy_drift(
    lam: Parameters,
    start: FlowState,
    t_span: float,
    rel_tol: Optional[float] = None,
) -> float:
    """Get the largest relative deviation of H along an orbit."""
    traj = integrate_orbit(lam, start, t_span, rel_tol)
    h0 = hamiltonian(start.x, start.y)
    values = (traj.x**2 + traj.y**2) / (2 * traj.y - 1)
    return float(np.max(np.abs(values - h0)) / max(abs(h0), 1e-300))


def _signs(values: np.ndarray, floor: float) -> np.ndarray:
    return np.where(np.abs(values) <= floor, 0, np.sign(values)).astype(int)


def _bracket_count(signs: np.ndarray) -> int:
    nonzero = signs[signs != 0]
    return int(np.sum(nonzero[1:] != nonzero[:-1]))


def _scan(
    lam: Parameters,
    center: Center,
    h_range: Tuple[float, float],
    rel_tol: float,
    grid: int,
) -> Tuple[List[float], List[float], List[float], bool, bool, float]:
    """Scan one annulus for sign changes of the displacement.

    Returns:
        cycle levels, their slopes, rejected jump levels, tangency flag,
        center-like flag and the largest scanned |displacement|
    """
    settings = get_settings()
    floor = settings.DISPLACEMENT_FLOOR
    lo, hi = h_range

    def d(h: float) -> float:
        return poincare_displacement(lam, center, h, rel_tol)

    hs = np.linspace(lo, hi, grid)
    values = np.array([d(h) for h in hs])
    mids = 0.5 * (hs[1:] + hs[:-1])
    mid_values = np.array([d(h) for h in mids])

    merged_h = np.empty(2 * grid - 1)
    merged_v = np.empty(2 * grid - 1)
    merged_h[0::2], merged_h[1::2] = hs, mids
    merged_v[0::2], merged_v[1::2] = values, mid_values

    coarse_signs = _signs(values, floor)
    fine_signs = _signs(merged_v, floor)
    tangency = _bracket_count(coarse_signs) != _bracket_count(fine_signs)
    center_like = bool(np.all(fine_signs == 0))

    levels: List[float] = []
    slopes: List[float] = []
    rejected: List[float] = []
    nz = np.flatnonzero(fine_signs)
    for i, j in zip(nz[:-1], nz[1:]):
        if fine_signs[i] == fine_signs[j]:
            continue
        root = float(brentq(d, merged_h[i], merged_h[j], xtol=CYCLE_XTOL))
        step = 1e-4 * (hi - lo)
        slope = (d(min(root + step, hi)) - d(max(root - step, lo))) / (
            min(root + step, hi) - max(root - step, lo)
        )
        if abs(slope) > JUMP_SLOPE or abs(d(root)) > JUMP_RESIDUAL:
            logfire.warning("census_jump_rejected", center=Center(center).value, h=root, slope=float(slope))
            rejected.append(root)
            continue
        levels.append(root)
        slopes.append(float(slope))
    return levels, slopes, rejected, tangency, center_like, float(np.max(np.abs(merged_v)))


def limit_cycle_census(
    lam: Parameters,
    h_range_first: Optional[Tuple[float, float]] = None,
    h_range_second: Optional[Tuple[float, float]] = None,
    rel_tol: Optional[float] = None,
    grid: Optional[int] = None,
) -> Census:
    """Count limit cycles (i, j) around the two foci over desk-scale energy ranges.

    Every sign change of the displacement is bisected to one cycle level; cycles
    with a slope below the hyperbolicity threshold and grids whose count changes
    under midpoint refinement are reported in the diagnostics. Sign changes across a
    jump of the return map are not counted and are listed as rejected.
    """
    settings = get_settings()
    rel_tol = settings.ODE_RTOL if rel_tol is None else rel_tol
    grid = settings.CENSUS_GRID if grid is None else grid
    first = h_range_first or settings.H_RANGE_FIRST
    second = h_range_second or settings.H_RANGE_SECOND
    try:
        lv1, s1, r1, t1, c1, m1 = _scan(lam, Center.FIRST, first, rel_tol, grid)
        lv2, s2, r2, t2, c2, m2 = _scan(lam, Center.SECOND, second, rel_tol, grid)
    except ConvergenceError as e:
        logfire.error("census_failed", error=str(e), error_type=type(e).__name__, parameters=lam.as_list())
        raise
    if t1 or t2:
        logfire.warning("census_tangency", first=t1, second=t2, parameters=lam.as_list())
    weak = [h for h, s in zip(lv1 + lv2, s1 + s2) if abs(s) <= HYPERBOLIC_SLOPE]
    census = Census(
        cycle_levels_first=lv1,
        cycle_levels_second=lv2,
        diagnostics=CensusDiagnostics(
            tangency_first=t1,
            tangency_second=t2,
            slopes_first=s1,
            slopes_second=s2,
            non_hyperbolic=weak,
            rejected_first=r1,
            rejected_second=r2,
            center_like_first=c1,
            center_like_second=c2,
            max_displacement={"first": m1, "second": m2},
        ),
    )
    logfire.info("census_completed", i=census.i, j=census.j, parameters=lam.as_list())
    return census


def _census_item(item: Tuple[str, int, int]) -> Optional[Tuple[int, int]]:
    """Census of one realized parameter point, None when the orbits do not close."""
    component, seed, k = item
    rng = np.random.default_rng([seed, COMPONENT_STREAMS.index(component), k])
    lam = realize_component(ComponentTag(component), rng)
    try:
        census = limit_cycle_census(lam)
    except ConvergenceError:
        return None
    return census.i, census.j


def census_sweep(
    samples: int,
    seed: int,
    components: Sequence[ComponentTag] = (ComponentTag.E1, ComponentTag.E2, ComponentTag.E3),
    n_jobs: Optional[int] = None,
) -> Dict[str, Dict[str, int]]:
    """Histogram the numerical (i, j) census over random points near each exceptional component.

    Returns:
        For each component, counts keyed ``"i,j"`` plus ``"failed"`` for open or escaping orbits
    """
    items = [(ComponentTag(c).value, seed, k) for c in components for k in range(samples)]
    results = run_ordered(_census_item, items, n_jobs)
    histogram: Dict[str, Dict[str, int]] = {ComponentTag(c).value: {} for c in components}
    for (component, _, _), outcome in zip(items, results):
        key = "failed" if outcome is None else f"{outcome[0]},{outcome[1]}"
        bucket = histogram[component]
        bucket[key] = bucket.get(key, 0) + 1
    logfire.info("census_sweep_completed", samples=samples, seed=seed, histogram=histogram)
    return histogram
