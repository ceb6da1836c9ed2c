"""Geometry of the unperturbed double center and its complex level curves.

The level curve H = h is uniformized by z = x + i(y - h), with punctures at
0, a = -ih and b = -i(h - 1). The five perturbation one-forms are pulled back to
this chart once symbolically and then evaluated numerically at any level.
"""
import cmath
import math
from functools import lru_cache
from typing import Any, Callable, Dict, List, Sequence, Tuple

import logfire
import numpy as np
import sympy as sp

from dclab.core.errors import DomainError, InvariantViolation, SingularInput
from dclab.core.ratcalc import partial_fractions, winding_number
from dclab.models.forms import PartialFractionForm, RelativeOneForm
from dclab.models.geometry import LoopKind, Punctures
from dclab.models.parameters import Center, Parameters
from dclab.models.paths import CircleArc, PathLoop

SINGULAR_TOL = 1e-14
LOOP_RADIUS_FACTOR = 0.25
FORM_INDICES = (1, 2, 3, 4, 5)

_z, _h = sp.symbols("z h")


def hamiltonian(x: float, y: float) -> float:
    """Evaluate the first integral H = (x^2 + y^2) / (2y - 1).

    Raises:
        SingularInput: y = 1/2
    """
    d = 2.0 * y - 1.0
    if abs(d) < SINGULAR_TOL:
        raise SingularInput("H is singular on the line y = 1/2")
    return (x * x + y * y) / d


def chart_to_zh(x: float, y: float) -> Tuple[complex, float]:
    """Map a real point to its chart coordinates (z, h)."""
    h = hamiltonian(x, y)
    return complex(x, y - h), h


def chart_from_zh(z: complex, h: complex) -> Tuple[complex, complex]:
    """Map chart coordinates back to (x, y), complex points of the level curve included.

    Raises:
        SingularInput: z is the puncture at the origin
    """
    if abs(z) < SINGULAR_TOL:
        raise SingularInput("z = 0 is a puncture of the level curve")
    r2 = h * (h - 1)
    x = 0.5 * (z * z + r2) / z
    y = -0.5j * (z * z + 2j * h * z - r2) / z
    return complex(x), complex(y)


def punctures(h: complex) -> Punctures:
    """Get the punctures of the level curve H = h.

    Raises:
        SingularInput: h is a critical value
    """
    if abs(h) < SINGULAR_TOL or abs(h - 1) < SINGULAR_TOL:
        raise SingularInput(f"h = {h} is a critical value")
    return Punctures(h=complex(h), a=-1j * h, b=-1j * (h - 1))


def basepoint(h: complex) -> complex:
    """Get the common basepoint sqrt(h (h - 1)), on the real oval for real h."""
    return complex(cmath.sqrt(h * (h - 1)))


def winding_vector(loop: PathLoop, h: complex) -> Tuple[int, int, int]:
    """Get winding numbers of a loop about the punctures (0, a, b)."""
    pts = punctures(h).as_tuple()
    return (winding_number(loop, pts[0]), winding_number(loop, pts[1]), winding_number(loop, pts[2]))


_EXPECTED_WINDING: Dict[LoopKind, Tuple[int, int, int]] = {
    LoopKind.ALPHA: (0, 1, 0),
    LoopKind.BETA: (0, 0, 1),
    LoopKind.GAMMA: (1, 0, 0),
    LoopKind.DELTA: (1, 1, 0),
    LoopKind.DELTA_TILDE: (1, 0, 1),
}


def _small_circle(center: complex, radius: float, toward: complex, label: str) -> PathLoop:
    """Counterclockwise circle around a puncture starting at the point facing ``toward``."""
    theta = cmath.phase(toward - center) if toward != center else 0.0
    arc = CircleArc(center=center, radius=radius, theta_start=theta, theta_end=theta + 2 * math.pi)
    return PathLoop(segments=(arc,), basepoint=arc.start, label=label)


def canonical_loop(
    kind: LoopKind,
    h: complex,
    radius_factor: float = LOOP_RADIUS_FACTOR,
) -> PathLoop:
    """Build a canonical loop on the level curve H = h.

    Args:
        kind: Which loop
        h: Energy level; delta needs real h < 0 and delta_tilde real h > 1
        radius_factor: Radius of the small circles relative to the minimal puncture gap

    Raises:
        DomainError: h outside the loop's validity range
    """
    kind = LoopKind(kind)
    pts = punctures(h)
    base = basepoint(h)

    if kind in (LoopKind.DELTA, LoopKind.DELTA_TILDE):
        if abs(complex(h).imag) > 0:
            raise DomainError(f"{kind.value} needs a real energy, got {h}")
        hr = complex(h).real
        if kind is LoopKind.DELTA and not hr < 0:
            raise DomainError(f"delta is defined for h < 0, got {hr}")
        if kind is LoopKind.DELTA_TILDE and not hr > 1:
            raise DomainError(f"delta_tilde is defined for h > 1, got {hr}")
        arc = CircleArc(center=0j, radius=abs(base), theta_start=0.0, theta_end=2 * math.pi)
        loop = PathLoop(segments=(arc,), basepoint=arc.start, label=kind.value)
    else:
        radius = radius_factor * min(abs(pts.a), abs(pts.b), abs(pts.b - pts.a))
        center = {LoopKind.ALPHA: pts.a, LoopKind.BETA: pts.b, LoopKind.GAMMA: pts.c}[kind]
        loop = _small_circle(center, radius, base, kind.value)

    found = winding_vector(loop, h)
    if found != _EXPECTED_WINDING[kind]:
        raise InvariantViolation(f"{kind.value} at h = {h} has winding numbers {found}")
    return loop


# (x, y) coefficients (A, B) of omega = A dx + B dy, before division by (2y - 1)^2
_FORM_NUMERATORS: Dict[int, Callable[[Any, Any], Tuple[Any, Any]]] = {
    1: lambda x, y: (-y, x),
    2: lambda x, y: (0, x * x + y * y),
    3: lambda x, y: (-(x * x + y * y), 0),
    4: lambda x, y: (2 * x * y, x * x - y * y),
    5: lambda x, y: (-(x * x - y * y), 2 * x * y),
}


def _check_index(index: int) -> None:
    if index not in FORM_INDICES:
        raise ValueError(f"form index must be one of {FORM_INDICES}, got {index}")


def form_coefficients(index: int, x: complex, y: complex) -> Tuple[complex, complex]:
    """Evaluate (A, B) of omega_index = A dx + B dy at a point.

    Raises:
        SingularInput: y = 1/2
    """
    _check_index(index)
    d2 = (2 * y - 1) ** 2
    if abs(d2) < SINGULAR_TOL:
        raise SingularInput("the forms are singular on the line y = 1/2")
    a, b = _FORM_NUMERATORS[index](x, y)
    return complex(a) / d2, complex(b) / d2


LambdifiedPoly = Callable[[complex], List[complex]]


@lru_cache(maxsize=None)
def _symbolic_pullback(index: int) -> Tuple[LambdifiedPoly, LambdifiedPoly, LambdifiedPoly]:
    """Numerators of F, Phi and dF/dh as functions of h.

    F and Phi share the denominator z^2 P^2 and dF/dh has z^2 P^3, where
    P = (z - a)(z - b).
    """
    r2 = _h * (_h - 1)
    p = _z**2 + sp.I * (2 * _h - 1) * _z - r2
    x = (_z**2 + r2) / (2 * _z)
    y = -sp.I / 2 * (_z**2 + 2 * sp.I * _h * _z - r2) / _z
    inv_d2 = -(_z**2) / p**2
    a_num, b_num = _FORM_NUMERATORS[index](x, y)
    a_xy = sp.sympify(a_num) * inv_d2
    b_xy = sp.sympify(b_num) * inv_d2

    F = a_xy * sp.diff(x, _z) + b_xy * sp.diff(y, _z)
    Phi = a_xy * sp.diff(x, _h) + b_xy * sp.diff(y, _h)
    dF = sp.diff(F, _h)

    def numerator(expr: sp.Expr, power: int) -> LambdifiedPoly:
        poly = sp.Poly(sp.expand(sp.cancel(sp.together(expr * _z**2 * p**power))), _z)
        coeffs = list(reversed(poly.all_coeffs()))
        fn = sp.lambdify(_h, coeffs, "numpy")
        return lambda h: [complex(c) for c in fn(h)]

    logfire.info("form_pullback_built", index=index)
    return numerator(F, 2), numerator(Phi, 2), numerator(dF, 3)


def omega_form(index: int, h: complex) -> RelativeOneForm:
    """Pull omega_index back to the (z, h) chart at the level h.

    Raises:
        ValueError: invalid index
        SingularInput: h is a critical value
    """
    _check_index(index)
    pts = punctures(h)
    f_num, phi_num, df_num = _symbolic_pullback(index)
    hc = complex(h)
    double = [(pts.c, 2), (pts.a, 2), (pts.b, 2)]
    triple = [(pts.c, 2), (pts.a, 3), (pts.b, 3)]
    return RelativeOneForm(
        h=hc,
        F=partial_fractions(f_num(hc), double),
        Phi=partial_fractions(phi_num(hc), double),
        dF_dh=partial_fractions(df_num(hc), triple),
        label=f"omega{index}",
    )


def pullback_oracle(index: int, h: float, z: complex) -> Tuple[complex, complex]:
    """Evaluate (F, Phi) of omega_index by the numerical chain rule through the chart.

    Raises:
        SingularInput: z is a puncture
    """
    _check_index(index)
    pts = punctures(h)
    if min(abs(z - p) for p in pts.as_tuple()) < SINGULAR_TOL:
        raise SingularInput(f"z = {z} is a puncture")
    x, y = chart_from_zh(z, h)
    a_xy, b_xy = form_coefficients(index, x, y)
    r2 = h * (h - 1)
    x_z = 0.5 * (1 - r2 / z**2)
    x_h = (2 * h - 1) / (2 * z)
    y_z = -0.5j * (1 + r2 / z**2)
    y_h = 1 + 1j * (2 * h - 1) / (2 * z)
    return a_xy * x_z + b_xy * y_z, a_xy * x_h + b_xy * y_h


def form_weights(center: Center, lam: Parameters) -> Tuple[float, float, float, float, float]:
    """Get weights of omega_1..omega_5 in the perturbation form of a center's basis.

    The second center pairs lambda_3 with omega_3 - omega_1.
    """
    l1, l2, l3, l4, l5 = lam.as_list()
    if Center(center) is Center.FIRST:
        return (l1, l2, l3, l4, l5)
    return (l1 - l3, l2, l3, l4, l5)


def combine_forms(weights: Sequence[complex], h: complex) -> RelativeOneForm:
    """Get sum_k weights[k] * omega_{k+1} at the level h."""
    if len(weights) != 5:
        raise ValueError(f"expected 5 weights, got {len(weights)}")
    total: RelativeOneForm | None = None
    for index, w in zip(FORM_INDICES, weights):
        if w == 0:
            continue
        term = omega_form(index, h).scale(w)
        total = term if total is None else total + term
    if total is None:
        zero = PartialFractionForm()
        return RelativeOneForm(h=complex(h), F=zero, Phi=zero, dF_dh=zero, label="0")
    return total


def sample_level_points(h: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Random chart points on an annulus around the real oval, away from punctures."""
    radius = abs(basepoint(h))
    pts = np.array(punctures(h).as_tuple())
    out: List[complex] = []
    while len(out) < n:
        z = radius * rng.uniform(0.6, 1.4) * np.exp(1j * rng.uniform(0.0, 2 * math.pi))
        if np.min(np.abs(z - pts)) > 0.1 * radius:
            out.append(complex(z))
    return np.array(out)
