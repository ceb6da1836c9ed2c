"""First and second order Melnikov functions and their numerical oracles.

Closed forms are evaluated directly. Oracles go through residues (ratcalc) or
iterated integrals (pathint). Two sign constants tie the raw loop integrals to the
closed forms; they are stored here together with a version tag written into every
artifact.
"""
import cmath
import math
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, Union

import logfire
import numpy as np
import sympy as sp
from scipy.optimize import brentq

from dclab.core.bautin import sample_component
from dclab.core.config import get_settings
from dclab.core.curvegeom import canonical_loop, combine_forms, form_weights, omega_form
from dclab.core.errors import DomainError, EndpointZeroError
from dclab.core.pathint import DzForm, commutator_loop, contour_integral, iterated_integral2
from dclab.core.ratcalc import residue_sum_integral
from dclab.models.forms import PartialFractionForm, RelativeOneForm
from dclab.models.geometry import LoopKind
from dclab.models.melnikov import BifurcationPair, ComponentTag, MonodromyClass, ZeroCount
from dclab.models.parameters import Center, Parameters

# m1_residues = M1_NORMALIZATION * (integral of omega over delta, counterclockwise)
M1_NORMALIZATION = -1
# m2_iterated = M2_NORMALIZATION * sum of the Chen integrals int omega_j omega_i', omega_i' inner
M2_NORMALIZATION = -1
NORMALIZATION_VERSION = "m1=-1;m2=-1;chen=second-inner;v2"

# Jump of the continued second Melnikov function after one counterclockwise turn
# around the center's outer critical value (h = 1 for the first, h = 0 for the second)
MONODROMY_JUMP: Dict[Center, complex] = {
    Center.FIRST: 4j * math.pi**2,
    Center.SECOND: -4j * math.pi**2,
}

ENDPOINT_ATOL = 1e-12
ZERO_XTOL = 1e-12
ZERO_MERGE = 1e-9
SERIES_RADIUS = 0.1
SWEEP_FIRST = (-50.0, -1e-4)
SWEEP_SECOND = (1 + 1e-4, 50.0)
SHUFFLE_LOOPS = (LoopKind.ALPHA, LoopKind.BETA, LoopKind.GAMMA, LoopKind.DELTA)

LoopAround = Literal["h0", "h1"]


def check_range(center: Center, h: float) -> None:
    """Check that h lies in the period annulus of a center.

    Raises:
        DomainError: h outside the annulus
    """
    center = Center(center)
    if center is Center.FIRST and not h < 0:
        raise DomainError(f"the first period annulus needs h < 0, got {h}")
    if center is Center.SECOND and not h > 1:
        raise DomainError(f"the second period annulus needs h > 1, got {h}")


def m1_closed(center: Center, lam: Parameters, h: float) -> float:
    """Evaluate the first Melnikov function in closed form."""
    check_range(center, h)
    l1, _, l3, _, l5 = lam.as_list()
    if Center(center) is Center.FIRST:
        return -2 * math.pi * h * (h * (l1 + l3) - l1)
    return 2 * math.pi * (h - 1) * ((h - 1) * (l1 + l3) + l1 + l3 - 2 * l5)


def m1_residues(center: Center, lam: Parameters, h: float) -> float:
    """Evaluate the first Melnikov function by residues over alpha + gamma or beta + gamma."""
    check_range(center, h)
    omega = combine_forms(lam.as_list(), h)
    outer = LoopKind.ALPHA if Center(center) is Center.FIRST else LoopKind.BETA
    total = residue_sum_integral(omega.F, canonical_loop(outer, h))
    total += residue_sum_integral(omega.F, canonical_loop(LoopKind.GAMMA, h))
    return float((M1_NORMALIZATION * total).real)


def gelfand_leray(
    form: RelativeOneForm,
    rebuild: Optional[Callable[[complex], RelativeOneForm]] = None,
    fd_step: float = 1e-5,
) -> DzForm:
    """Get the Gelfand-Leray derivative (dF/dh - dPhi/dz) dz of a relative form.

    Without an analytic dF/dh a central difference in h is used, which needs
    ``rebuild`` to produce the form at nearby levels.
    """
    dphi = form.Phi.derivative()
    if form.dF_dh is not None:
        return form.dF_dh - dphi
    if rebuild is None:
        raise ValueError("finite-difference fallback needs a rebuild function")
    step = fd_step * max(1.0, abs(form.h))
    upper = rebuild(form.h + step).F
    lower = rebuild(form.h - step).F

    def derivative(z: np.ndarray) -> np.ndarray:
        return (upper.evaluate(z) - lower.evaluate(z)) / (2 * step) - dphi.evaluate(z)

    return derivative


def _log_part(h: float) -> float:
    """h + h^2/2 + ln(1 - h), summed as a series near 0 to keep its cubic vanishing."""
    if abs(h) < SERIES_RADIUS:
        return -sum(h**n / n for n in range(3, 40))
    return h + h * h / 2 + math.log1p(-h)


def m2_closed(center: Center, h: float) -> float:
    """Evaluate the lambda-normalized second Melnikov function in closed form.

    The second center's function is the reflected first one plus a linear term,
    M2~(h) = -M2(1 - h) + pi (h - 1).
    """
    check_range(center, h)
    if Center(center) is Center.FIRST:
        return 2 * math.pi * _log_part(h)
    return -2 * math.pi * _log_part(1 - h) + math.pi * (h - 1)


def m2_closed_array(center: Center, h: np.ndarray) -> np.ndarray:
    """Vectorized m2_closed for zero counting."""
    h = np.asarray(h, dtype=float)
    s = h if Center(center) is Center.FIRST else 1 - h
    near = np.abs(s) < SERIES_RADIUS
    far_value = s + s * s / 2 + np.log1p(-np.where(near, 0.0, s))
    series = -sum(s**n / n for n in range(3, 40))
    value = np.where(near, series, far_value)
    if Center(center) is Center.FIRST:
        return 2 * math.pi * value
    return -2 * math.pi * value + math.pi * (h - 1)


def section_partial_sums(h: float, tolerance: Optional[float] = None) -> Dict[str, float]:
    """Get the two displayed contributions of the first-center second Melnikov function.

    Returns:
        ``omega5_gl2`` = -int omega_5 omega_2' and ``omega2_gl5`` = -int omega_2 omega_5'
        over delta, each computed as iterated_integral2(omega_j, omega_i')
    """
    check_range(Center.FIRST, h)
    loop = canonical_loop(LoopKind.DELTA, h)
    w2 = omega_form(2, h)
    w5 = omega_form(5, h)
    gl2 = gelfand_leray(w2)
    gl5 = gelfand_leray(w5)
    first = iterated_integral2(w5.F, gl2, loop, tolerance).value
    second = iterated_integral2(w2.F, gl5, loop, tolerance).value
    return {"omega5_gl2": float((-first).real), "omega2_gl5": float((-second).real)}


def _m2_pair(u: RelativeOneForm, w: RelativeOneForm, kind: LoopKind, h: float, tol: Optional[float]) -> complex:
    """M2_NORMALIZATION * [int u w' + int w u'] over a loop."""
    loop = canonical_loop(kind, h)
    total = iterated_integral2(u.F, gelfand_leray(w), loop, tol).value
    total += iterated_integral2(w.F, gelfand_leray(u), loop, tol).value
    return M2_NORMALIZATION * total


def m2_iterated(center: Center, h: float, tolerance: Optional[float] = None) -> float:
    """Evaluate the normalized second Melnikov function by iterated integrals.

    The first center pairs omega_2 with omega_5 over delta. The second pairs
    omega_3 - omega_1 with omega_4 over delta_tilde.
    """
    check_range(center, h)
    try:
        if Center(center) is Center.FIRST:
            value = _m2_pair(omega_form(2, h), omega_form(5, h), LoopKind.DELTA, h, tolerance)
        else:
            u = omega_form(3, h) + omega_form(1, h).scale(-1.0)
            value = _m2_pair(u, omega_form(4, h), LoopKind.DELTA_TILDE, h, tolerance)
    except Exception as e:
        logfire.error("m2_iterated_failed", error=str(e), error_type=type(e).__name__, h=h)
        raise
    logfire.info("m2_iterated_evaluated", center=Center(center).value, h=h, value=value.real)
    return float(value.real)


def period(lam: Parameters, kind: LoopKind, h: complex, form_set: Center = Center.FIRST) -> complex:
    """Integral of the perturbation form over a canonical loop, by residues."""
    omega = combine_forms(form_weights(form_set, lam), h)
    return residue_sum_integral(omega.F, canonical_loop(kind, h))


def period_derivative(
    lam: Parameters,
    kind: LoopKind,
    h: complex,
    form_set: Center = Center.FIRST,
) -> complex:
    """d/dh of a period, as the integral of the Gelfand-Leray derivative."""
    omega = combine_forms(form_weights(form_set, lam), h)
    gl = gelfand_leray(omega)
    assert isinstance(gl, PartialFractionForm)
    return residue_sum_integral(gl, canonical_loop(kind, h))


def commutator_integral(
    lam: Parameters,
    h: complex,
    mode: Literal["determinant", "direct"] = "determinant",
    form_set: Center = Center.FIRST,
    tolerance: Optional[float] = None,
) -> complex:
    """Iterated integral int omega omega' over the commutator (alpha, beta).

    The determinant mode uses int_alpha omega' int_beta omega - int_alpha omega int_beta omega'
    with residue periods, the direct mode integrates over the composed loop.
    With l1 = l3 = 0 the first form set gives -4 pi^2 i l2 l5, and the second form set
    gives -4 pi^2 i l3 l4 when l1 = l5 = 0.
    """
    if mode == "determinant":
        pa = period(lam, LoopKind.ALPHA, h, form_set)
        pb = period(lam, LoopKind.BETA, h, form_set)
        dpa = period_derivative(lam, LoopKind.ALPHA, h, form_set)
        dpb = period_derivative(lam, LoopKind.BETA, h, form_set)
        return complex(dpa * pb - pa * dpb)
    if mode == "direct":
        omega = combine_forms(form_weights(form_set, lam), h)
        gl = gelfand_leray(omega)
        return iterated_integral2(omega.F, gl, commutator_loop(h), tolerance).value
    raise ValueError(f"unknown mode {mode!r}")


def monodromy_action(around: LoopAround, cls: MonodromyClass, center: Center) -> MonodromyClass:
    """Act on a homology class by one turn around a critical value.

    The turn around the center's outer critical value adds k_delta copies of the
    commutator; the other turn and the commutator itself are fixed.
    """
    outer: Dict[Center, str] = {Center.FIRST: "h1", Center.SECOND: "h0"}
    if around not in ("h0", "h1"):
        raise ValueError(f"around must be 'h0' or 'h1', got {around!r}")
    if around == outer[Center(center)]:
        return MonodromyClass(k_delta=cls.k_delta, k_comm=cls.k_comm + cls.k_delta)
    return cls


def monodromy_matrix(around: LoopAround, center: Center) -> np.ndarray:
    """Matrix of monodromy_action in the basis (delta, commutator)."""
    cols = [
        monodromy_action(around, MonodromyClass(k_delta=1), center),
        monodromy_action(around, MonodromyClass(k_comm=1), center),
    ]
    return np.array([[c.k_delta for c in cols], [c.k_comm for c in cols]], dtype=int)


def evaluate_class(cls: MonodromyClass, h: float, center: Center = Center.FIRST) -> complex:
    """Value of the normalized second Melnikov function on a homology class."""
    return cls.k_delta * m2_closed(center, h) + cls.k_comm * MONODROMY_JUMP[Center(center)]


def m2_continued(h: complex, k: int, center: Center = Center.FIRST) -> complex:
    """Continue the normalized M2 along k counterclockwise turns around the outer critical value."""
    if Center(center) is Center.FIRST:
        s = complex(h)
        return 2 * math.pi * (s + s * s / 2 + cmath.log(1 - s) + 2j * math.pi * k)
    s = 1 - complex(h)
    return -2 * math.pi * (s + s * s / 2 + cmath.log(1 - s) + 2j * math.pi * k) - math.pi * s


def bifurcation_pair_eval(
    pair: BifurcationPair,
    h: Union[float, np.ndarray],
    center: Center,
) -> Union[float, np.ndarray]:
    """Evaluate a center's bifurcation function of a projective pair."""
    arr = np.asarray(h, dtype=float)
    if Center(center) is Center.FIRST:
        if np.any(arr >= 0):
            raise DomainError("the first bifurcation function needs h < 0")
        c1, c2, c3 = pair.c1
        value = arr * (c1 * (arr - 1) + c2 * arr + c3 * m2_closed_array(Center.FIRST, arr))
    else:
        if np.any(arr <= 1):
            raise DomainError("the second bifurcation function needs h > 1")
        c1, c2, c3 = pair.c2
        value = (arr - 1) * (c1 * (arr - 1) - 2 * c2 + c3 * m2_closed_array(Center.SECOND, arr))
    return float(value) if np.ndim(h) == 0 else value


def _sign_changes(values: np.ndarray) -> int:
    signs = np.sign(values)
    return int(np.sum(signs[1:] * signs[:-1] < 0) + np.sum(signs[1:-1] == 0))


def locate_zeros(
    f: Callable[[np.ndarray], np.ndarray],
    interval: Tuple[float, float],
    grid: Optional[int] = None,
    vectorized: bool = False,
    endpoint_atol: float = ENDPOINT_ATOL,
) -> ZeroCount:
    """Locate the zeros of a real function by sign changes and bisection.

    Args:
        f: Continuous real function
        interval: (lo, hi)
        grid: Number of grid cells, ZERO_GRID by default; a doubled grid re-checks the count
        vectorized: Whether f accepts numpy arrays
        endpoint_atol: Endpoint values at or below this magnitude are zeros

    Raises:
        EndpointZeroError: f vanishes at an endpoint
    """
    lo, hi = interval
    grid = get_settings().ZERO_GRID if grid is None else grid

    def values_on(points: np.ndarray) -> np.ndarray:
        if vectorized:
            return np.asarray(f(points), dtype=float)
        return np.array([float(f(p)) for p in points])  # type: ignore[arg-type]

    coarse_x = np.linspace(lo, hi, grid + 1)
    coarse = values_on(coarse_x)
    for end, value in ((lo, coarse[0]), (hi, coarse[-1])):
        if abs(value) <= endpoint_atol:
            raise EndpointZeroError(f"f({end}) = {value} vanishes at an endpoint")

    fine_x = np.linspace(lo, hi, 2 * grid + 1)
    fine = values_on(fine_x)
    tangency = _sign_changes(coarse) != _sign_changes(fine)
    if tangency:
        logfire.warning(
            "zero_count_tangency",
            interval=[lo, hi],
            coarse=_sign_changes(coarse),
            fine=_sign_changes(fine),
        )

    def scalar(x: float) -> float:
        return float(values_on(np.array([x]))[0])

    zeros: list[float] = []
    for i in range(len(fine_x) - 1):
        a, b = fine[i], fine[i + 1]
        if a == 0.0:
            root = float(fine_x[i])
        elif a * b < 0:
            root = float(brentq(scalar, fine_x[i], fine_x[i + 1], xtol=ZERO_XTOL))
        else:
            continue
        if not zeros or root - zeros[-1] > ZERO_MERGE:
            zeros.append(root)
    return ZeroCount(zeros=zeros, suspected_tangency=tangency)


def count_zeros(
    f: Callable[[np.ndarray], np.ndarray],
    interval: Tuple[float, float],
    grid: Optional[int] = None,
    vectorized: bool = False,
    endpoint_atol: float = ENDPOINT_ATOL,
) -> int:
    """Count the zeros of a real function on an open interval."""
    return locate_zeros(f, interval, grid, vectorized, endpoint_atol).count


def predicted_displacement(lam: Parameters, center: Center, h: float) -> float:
    """Second-order prediction of the Poincare displacement H(return) - h."""
    center = Center(center)
    if center is Center.FIRST:
        return 2 * m1_closed(center, lam, h) - 4 * lam.l2 * lam.l5 * m2_closed(center, h)
    return -2 * m1_closed(center, lam, h) + 4 * lam.l3 * lam.l4 * m2_closed(center, h)


def closed_form_expressions() -> Dict[str, sp.Expr]:
    """Get the closed forms as sympy expressions in h and l1..l5."""
    h = sp.Symbol("h")
    l1, _, l3, _, l5 = sp.symbols("l1:6")
    return {
        "M1": -2 * sp.pi * h * (h * (l1 + l3) - l1),
        "M1_tilde": 2 * sp.pi * (h - 1) * ((h - 1) * (l1 + l3) + l1 + l3 - 2 * l5),
        "M2": 2 * sp.pi * (h + h**2 / 2 + sp.log(1 - h)),
        "M2_tilde": 2 * sp.pi * (sp.Rational(3, 2) * (h - 1) - (h - 1) ** 2 / 2 - sp.log(h)),
    }


def leading_term(name: str, at: int, order: int = 6) -> sp.Expr:
    """Get the lowest-order Taylor term of a closed form in t = h - at."""
    h, t = sp.symbols("h t")
    expr = closed_form_expressions()[name].subs(h, at + t)
    series = sp.expand(sp.series(expr, t, 0, order).removeO())
    return min(sp.Add.make_args(series), key=lambda term: sp.degree(term, t))


def pair_zero_counts(pair: BifurcationPair, grid: Optional[int] = None) -> Tuple[int, int]:
    """Count zeros (i, j) of both bifurcation functions of a pair over the sweep ranges."""
    i = count_zeros(
        lambda h: bifurcation_pair_eval(pair, h, Center.FIRST),
        SWEEP_FIRST, grid, vectorized=True, endpoint_atol=0.0,
    )
    j = count_zeros(
        lambda h: bifurcation_pair_eval(pair, h, Center.SECOND),
        SWEEP_SECOND, grid, vectorized=True, endpoint_atol=0.0,
    )
    return i, j


def sweep_components(
    samples: int,
    seed: int,
    components: Sequence[ComponentTag] = (ComponentTag.E1, ComponentTag.E2, ComponentTag.E3),
    grid: Optional[int] = None,
) -> Dict[str, Dict[str, int]]:
    """Histogram the zero counts (i, j) of random pairs on each exceptional component."""
    histogram: Dict[str, Dict[str, int]] = {}
    for stream, component in enumerate(components):
        component = ComponentTag(component)
        bucket: Dict[str, int] = {}
        for k in range(samples):
            pair = sample_component(component, np.random.default_rng([seed, stream, k]))
            try:
                i, j = pair_zero_counts(pair, grid)
            except EndpointZeroError:
                bucket["endpoint"] = bucket.get("endpoint", 0) + 1
                continue
            key = f"{i},{j}"
            bucket[key] = bucket.get(key, 0) + 1
        histogram[component.value] = bucket
    logfire.info("component_sweep_completed", samples=samples, seed=seed, histogram=histogram)
    return histogram


def tracked_forms(h: float) -> Dict[str, DzForm]:
    """Get the dz-parts of omega_1..omega_5 and the Gelfand-Leray forms of omega_2, omega_5."""
    forms: Dict[str, DzForm] = {f"omega{k}": omega_form(k, h).F for k in range(1, 6)}
    forms["gl2"] = gelfand_leray(omega_form(2, h))
    forms["gl5"] = gelfand_leray(omega_form(5, h))
    return forms


def shuffle_check(
    h: float,
    loops: Sequence[LoopKind] = SHUFFLE_LOOPS,
    tolerance: Optional[float] = None,
) -> List[Dict[str, Union[str, float]]]:
    """Get |int ab + int ba - (int a)(int b)| for every ordered pair of tracked forms and loop."""
    forms = tracked_forms(h)
    rows: List[Dict[str, Union[str, float]]] = []
    for kind in loops:
        loop = canonical_loop(kind, h)
        singles = {name: contour_integral(form, loop, tolerance).value for name, form in forms.items()}
        for a, fa in forms.items():
            for b, fb in forms.items():
                ab = iterated_integral2(fa, fb, loop, tolerance).value
                ba = iterated_integral2(fb, fa, loop, tolerance).value
                rows.append({
                    "loop": kind.value,
                    "a": a,
                    "b": b,
                    "residual": abs(ab + ba - singles[a] * singles[b]),
                })
    logfire.info("shuffle_check_completed", h=h, worst=max(float(r["residual"]) for r in rows))
    return rows
