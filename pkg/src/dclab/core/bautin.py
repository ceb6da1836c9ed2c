"""Parameter-space algebra of the quadratic perturbations.

Covers the normal-form coefficient table, focal values, Bautin ideal generators,
center-set membership, the Darboux first integral of the Lotka-Volterra branch,
the parameter involution exchanging the two foci and the classification of
parameter arcs on the blow-up of the product ideal.
"""
import cmath
import math
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

import logfire
import numpy as np
import sympy as sp
from scipy.optimize import root
from sympy.parsing.sympy_parser import TokenError
from sympy.polys.polyerrors import BasePolynomialError

from dclab.core.errors import (
    ArcParseError,
    ClassificationMismatch,
    ConvergenceError,
    DomainError,
    InvariantLineError,
    InvariantViolation,
)
from dclab.models.arcs import ArcGerm, ProjectivePair, Triple
from dclab.models.melnikov import BifurcationPair, ComponentTag
from dclab.models.parameters import Center, Parameters

MEMBERSHIP_TOL = 1e-12
INVARIANT_LINE_TOL = 1e-6
FOCUS_ROOT_TOL = 1e-12
FOCUS_RESIDUAL_TOL = 1e-12

_eps = sp.Symbol("e")


class CenterVariety(str, Enum):
    """Irreducible components of the two center sets."""
    RV1 = "RV1"
    LV1 = "LV1"
    RV2 = "RV2"
    LV2 = "LV2"


def normal_form_substitution(lam: Parameters) -> Dict[str, float]:
    """Get the coefficients a_ij (of dy) and b_ij (of dx) of the perturbation."""
    l1, l2, l3, l4, l5 = lam.as_list()
    return {
        "a00": 0.0, "a10": l1, "a01": 0.0, "a20": l2 + l4, "a11": 2 * l5, "a02": l2 - l4,
        "b00": 0.0, "b10": 0.0, "b01": -l1, "b20": -l3 - l5, "b11": 2 * l4, "b02": -l3 + l5,
    }


def parameters_from_coefficients(coeffs: Dict[str, float], tol: float = MEMBERSHIP_TOL) -> Parameters:
    """Invert the coefficient table.

    Raises:
        InvariantViolation: the coefficients are not in the image of the table
    """
    get = lambda key: float(coeffs.get(key, 0.0))  # noqa: E731
    lam = Parameters(
        l1=get("a10"),
        l2=(get("a20") + get("a02")) / 2,
        l3=-(get("b20") + get("b02")) / 2,
        l4=(get("a20") - get("a02")) / 2,
        l5=get("a11") / 2,
    )
    expected = normal_form_substitution(lam)
    bad = {k: get(k) for k in expected if abs(get(k) - expected[k]) > tol * max(1.0, abs(expected[k]))}
    if bad:
        raise InvariantViolation(f"coefficients break the table relations: {bad}")
    return lam


def focal_values(lam: Parameters) -> Tuple[float, float, float]:
    """Evaluate v3, v5 and v7 at A = -1."""
    a = complex(lam.A)
    b = lam.B
    c = lam.C
    bc = b.conjugate()
    v3 = 2 * math.pi * (a * b).imag
    v5 = 2 / 3 * ((2 * a + bc) * (a - 2 * bc) * bc * c).imag
    v7 = 5 / 4 * (abs(b) ** 2 - abs(c) ** 2) * ((2 * a + bc) * bc**2 * c).imag
    return v3, v5, v7


def ideal_generators(center: Center, lam: Parameters) -> Tuple[float, float, float]:
    """Evaluate the generators of the Bautin ideal of a center."""
    l1, l2, l3, l4, l5 = lam.as_list()
    if Center(center) is Center.FIRST:
        return (l1, l3, l2 * l5)
    return (l1 + l3 + l1 * l2, l5, l3 * l4)


def center_membership(lam: Parameters, tol: float = MEMBERSHIP_TOL) -> Set[CenterVariety]:
    """Get the center-set components containing lambda."""
    l1, l2, l3, l4, l5 = lam.as_list()

    def zero(*values: float) -> bool:
        return all(abs(v) <= tol for v in values)

    found: Set[CenterVariety] = set()
    if zero(l1, l3, l5):
        found |= {CenterVariety.RV1, CenterVariety.RV2}
    if zero(l1, l2, l3):
        found.add(CenterVariety.LV1)
    if zero(l1 + l3 + l1 * l2, l4, l5):
        found.add(CenterVariety.LV2)
    return found


def lv_first_integral(
    lam: Parameters,
    x: float,
    y: float,
    theta: Optional[float] = None,
) -> Tuple[float, float]:
    """Evaluate the Darboux first integral of the Lotka-Volterra branch.

    The value is r^2 exp(-2 l1 theta) / |alpha z + conj(alpha z) + 1|^(1 - l2 + l1 l3)
    with alpha = (i - l1) / (1 + l1^2). The argument theta of z is continued from
    the previous call's value, which the caller passes back in.

    Returns:
        The integral value and the tracked argument

    Raises:
        DomainError: lambda is not on the second Lotka-Volterra component
        InvariantLineError: the point is on the invariant line
    """
    if CenterVariety.LV2 not in center_membership(lam):
        raise DomainError("the Darboux integral needs l4 = l5 = 0 and l1 + l3 + l1 l2 = 0")
    l1, l2, l3, _, _ = lam.as_list()
    z = complex(x, y)
    alpha = (1j - l1) / (1 + l1 * l1)
    line = 2 * (alpha * z).real + 1
    if abs(line) < INVARIANT_LINE_TOL:
        raise InvariantLineError(f"({x}, {y}) is on the invariant line")
    arg = cmath.phase(z)
    if theta is not None:
        arg += 2 * math.pi * round((theta - arg) / (2 * math.pi))
    value = abs(z) ** 2 * math.exp(-2 * l1 * arg) / abs(line) ** (1 - l2 + l1 * l3)
    return value, arg


def _polynomial_part(lam: Parameters, z: complex) -> complex:
    """Right-hand side of the complex normal form at z."""
    return (lam.l1 + 1j) * z - z * z + lam.B * abs(z) ** 2 + lam.C * z.conjugate() ** 2


def _focus_near_i(lam: Parameters) -> complex:
    """Locate the focus of X_lambda near z = i."""

    def residual(v: np.ndarray) -> List[float]:
        p = _polynomial_part(lam, complex(v[0], v[1]))
        return [p.real, p.imag]

    # hybr can flag an xtol stall at a converged root; accept on the residual
    sol = root(residual, [0.0, 1.0], method="hybr", tol=FOCUS_ROOT_TOL)
    miss = max(abs(r) for r in residual(sol.x))
    if not miss < FOCUS_RESIDUAL_TOL:
        logfire.error("focus_search_failed", error=sol.message, error_type="ConvergenceError", residual=miss)
        raise ConvergenceError(f"focus near i not found: residual {miss:.3e}, {sol.message}")
    return complex(sol.x[0], sol.x[1])


class InvolutionChart:
    """Affine change z = z* - s (u + kappa conj(u)) taking X_lambda to X_lambda' with time scale c."""

    def __init__(self, lam: Parameters):
        self.lam = lam
        self.focus = _focus_near_i(lam)
        zs = self.focus
        b, c = lam.B, lam.C
        lin = lam.l1 + 1j - 2 * zs + b * zs.conjugate()
        nu = b * zs + 2 * c * zs.conjugate()

        # small root of conj(nu) k^2 + (conj(L) - L) k - nu = 0
        p = lin.conjugate() - lin
        disc = cmath.sqrt(p * p + 4 * nu.conjugate() * nu)
        den = p + disc if abs(p + disc) >= abs(p - disc) else p - disc
        self.kappa = 2 * nu / den if den != 0 else 0j
        k = self.kappa
        norm = 1 - abs(k) ** 2
        self.norm = norm
        lin_v = (lin + nu * k.conjugate() - abs(k) ** 2 * lin.conjugate() - k * nu.conjugate()) / norm

        q20 = 1 - b * k.conjugate() - c * k.conjugate() ** 2
        q11 = 2 * k - b * (1 + abs(k) ** 2) - 2 * c * k.conjugate()
        q02 = k * k - b * k - c
        a_v = (q20 - k * q02.conjugate()) / norm
        b_v = (q11 - k * q11.conjugate()) / norm
        c_v = (q02 - k * q20.conjugate()) / norm

        self.time_scale = 1 / lin_v.imag
        self.scale = -1 / (self.time_scale * a_v)
        s = self.scale
        new_b = self.time_scale * b_v * s.conjugate()
        new_c = self.time_scale * c_v * s.conjugate() ** 2 / s
        self.image = Parameters(
            l1=self.time_scale * lin_v.real,
            l2=new_b.real,
            l3=new_b.imag,
            l4=new_c.real,
            l5=new_c.imag,
        )

    def to_z(self, u: complex) -> complex:
        """Original coordinate of a chart point."""
        v = self.scale * u
        return self.focus - (v + self.kappa * v.conjugate())

    def pushed_field(self, u: complex) -> complex:
        """du/dtau obtained by transporting X_lambda through the chart."""
        w_dot = -_polynomial_part(self.lam, self.to_z(u))
        v_dot = (w_dot - self.kappa * w_dot.conjugate()) / self.norm
        return self.time_scale * v_dot / self.scale


def involution_parameters(lam: Parameters) -> Parameters:
    """Get lambda' whose normal form is X_lambda seen from its focus near (0, 1)."""
    return InvolutionChart(lam).image


def involution_residual(lam: Parameters, points: Sequence[complex]) -> float:
    """Largest mismatch between the transported field and X_lambda' at chart points."""
    chart = InvolutionChart(lam)
    image = chart.image
    return max(abs(chart.pushed_field(u) - _polynomial_part(image, u)) for u in points)


def involution_linear(lam: Parameters) -> Parameters:
    """First-order part of the involution, exchanging M1 and M1~ up to h -> 1 - h."""
    l1, l2, l3, l4, l5 = lam.as_list()
    return Parameters(l1=l1 + l3 - 2 * l5, l2=2 * l4, l3=2 * l5, l4=l2 / 2, l5=l3 / 2)


def parse_arc(text: str) -> ArcGerm:
    """Parse ``l1=<poly>;...;l5=<poly>`` with polynomials in e over the rationals.

    Raises:
        ArcParseError: malformed text or a non-polynomial component
    """
    polys: Dict[int, sp.Poly] = {}
    for chunk in filter(None, (part.strip() for part in text.split(";"))):
        key, sep, body = chunk.partition("=")
        key = key.strip()
        if not sep or key not in {f"l{k}" for k in range(1, 6)}:
            raise ArcParseError(f"expected l1..l5 assignments, got {chunk!r}")
        try:
            expr = sp.parse_expr(body.replace("^", "**"), local_dict={"e": _eps})
            polys[int(key[1])] = sp.Poly(expr, _eps, domain=sp.QQ)
        except (sp.SympifyError, BasePolynomialError, TokenError, SyntaxError, TypeError) as e:
            raise ArcParseError(f"component {key} is not a rational polynomial in e: {body!r}") from e
    components: List[Tuple[Fraction, ...]] = []
    for k in range(1, 6):
        poly = polys.get(k)
        coeffs = list(reversed(poly.all_coeffs())) if poly is not None else []
        components.append(tuple(Fraction(int(c.p), int(c.q)) for c in coeffs))
    return ArcGerm(components=tuple(components))


def _arc_polys(arc: ArcGerm) -> List[sp.Poly]:
    return [
        sp.Poly(sum((sp.Rational(c.numerator, c.denominator) * _eps**n for n, c in enumerate(coeffs)), sp.Integer(0)), _eps, domain=sp.QQ)
        for coeffs in arc.components
    ]


def _order(poly: sp.Poly) -> float:
    """Valuation at e = 0, infinite for the zero polynomial."""
    if poly.is_zero:
        return math.inf
    return float(min(m[0] for m in poly.monoms()))


def _limit_point(triple: Sequence[sp.Poly]) -> Optional[Triple]:
    """Normalized leading coefficients at the minimal valuation, None if all vanish."""
    orders = [_order(p) for p in triple]
    d = min(orders)
    if math.isinf(d):
        return None
    lead = [p.coeff_monomial(_eps ** int(d)) for p in triple]
    pivot = next(c for c in lead if c != 0)
    return tuple(Fraction(int(r.p), int(r.q)) for r in (sp.Rational(c) / pivot for c in lead))  # type: ignore[return-value]


def components_satisfied(p1: Optional[Triple], p2: Optional[Triple]) -> Tuple[ComponentTag, ...]:
    """Get every exceptional component whose equations the pair satisfies."""
    if p1 is None or p2 is None:
        return ()
    found: List[ComponentTag] = []
    if p2[0] == 0 and p2[2] == 0:
        found.append(ComponentTag.E1)
    if p1[0] + p1[1] == 0 and p1[2] == 0:
        found.append(ComponentTag.E2)
    if p1[2] == 0 and p2[2] == 0:
        found.append(ComponentTag.E3)
    return tuple(found)


def classify_arc(arc: ArcGerm) -> ProjectivePair:
    """Classify a parameter arc by the limit of its generator pair in P^2 x P^2.

    Raises:
        ClassificationMismatch: the order case analysis and the component equations disagree
    """
    l1, l2, l3, l4, l5 = _arc_polys(arc)
    g1 = (l1, l3, l2 * l5)
    g2 = (l1 + l3 + l1 * l2, l5, l3 * l4)
    p1 = _limit_point(g1)
    p2 = _limit_point(g2)

    if p1 is None:
        return ProjectivePair(p1=None, p2=p2, component=ComponentTag.INSIDE_1)
    if p2 is None:
        return ProjectivePair(p1=p1, p2=None, component=ComponentTag.INSIDE_2)

    d1, d3, d5 = _order(l1), _order(l3), _order(l5)
    d_sum = _order(l1 + l3)
    if d5 < min(d1, d3):
        tag = ComponentTag.E1
    elif d_sum > min(d1, d3):
        tag = ComponentTag.E2
    else:
        tag = ComponentTag.E3

    satisfied = components_satisfied(p1, p2)
    if tag not in satisfied:
        logfire.error(
            "classify_arc_failed",
            error="component mismatch",
            error_type="ClassificationMismatch",
            tag=tag.value,
            satisfied=[s.value for s in satisfied],
        )
        raise ClassificationMismatch(f"order analysis gives {tag.value} but the point satisfies {satisfied}")
    return ProjectivePair(p1=p1, p2=p2, component=tag, satisfied=satisfied)


def _cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 1.0
    return float(1 - abs(np.dot(u, v)) / (nu * nv))


def arc_limit_check(arc: ArcGerm, pair: ProjectivePair, eps: float = 1e-4) -> float:
    """Cosine distance between the float generator directions at eps and the classified point."""
    lam = Parameters.from_sequence(arc.evaluate(eps))
    distances = []
    for center, point in ((Center.FIRST, pair.p1), (Center.SECOND, pair.p2)):
        if point is None:
            continue
        g = np.array(ideal_generators(center, lam), dtype=float)
        distances.append(_cosine_distance(g, np.array([float(c) for c in point])))
    return max(distances, default=0.0)


def random_arc(rng: np.random.Generator, max_degree: int = 3, zero_prob: float = 0.3) -> ArcGerm:
    """Draw a random polynomial arc with small integer coefficients."""
    while True:
        components = []
        for _ in range(5):
            coeffs = [Fraction(0)]
            for _ in range(max_degree):
                c = 0 if rng.random() < zero_prob else int(rng.integers(-3, 4))
                coeffs.append(Fraction(c))
            components.append(tuple(coeffs))
        if any(c != 0 for comp in components for c in comp):
            return ArcGerm(components=tuple(components))


def _as_rng(seed: Union[int, np.random.Generator]) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_component(component: ComponentTag, seed: Union[int, np.random.Generator]) -> BifurcationPair:
    """Draw a random projective pair on an exceptional component."""
    rng = _as_rng(seed)
    component = ComponentTag(component)
    a = rng.standard_normal(3)
    b = rng.standard_normal(3)
    if component is ComponentTag.E1:
        c1, c2 = (a[0], a[1], a[2]), (0.0, 1.0, 0.0)
    elif component is ComponentTag.E2:
        c1, c2 = (1.0, -1.0, 0.0), (b[0], b[1], b[2])
    elif component is ComponentTag.E3:
        c1, c2 = (a[0], a[1], 0.0), (b[0], b[1], 0.0)
    else:
        raise ValueError(f"{component.value} is not an exceptional component")
    return BifurcationPair(
        c1=tuple(float(v) for v in c1),  # type: ignore[arg-type]
        c2=tuple(float(v) for v in c2),  # type: ignore[arg-type]
        component_tag=component,
    )


def realize_component(
    component: ComponentTag,
    seed: Union[int, np.random.Generator],
    eps: float = 0.05,
) -> Parameters:
    """Draw a parameter point at scale eps on an arc through the given exceptional component."""
    rng = _as_rng(seed)
    u = rng.uniform(-1.0, 1.0, 6)
    component = ComponentTag(component)
    if component is ComponentTag.E1:
        lam = (u[0] * eps**2, u[1] * eps, u[2] * eps**2, u[3] * eps, u[4] * eps)
    elif component is ComponentTag.E2:
        lam = (u[0] * eps, u[1] * eps, -u[0] * eps + u[2] * eps**2, u[3] * eps, u[4] * eps**2)
    elif component is ComponentTag.E3:
        lam = (u[0] * eps**2, u[1] * eps, u[2] * eps**2, u[3] * eps, u[4] * eps**2)
    else:
        raise ValueError(f"{component.value} is not an exceptional component")
    return Parameters.from_sequence(lam)
