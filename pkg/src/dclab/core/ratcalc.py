"""Complex rational function calculus at a fixed energy level.

Partial fractions are computed with the Taylor limit formulas at each pole, so a
denominator is always given in factored form as ``[(root, multiplicity), ...]``.
"""
import math
from typing import List, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from dclab.core.config import get_settings
from dclab.core.errors import InvariantViolation, PoleOnPath
from dclab.models.forms import PartialFractionForm, PoleTerm
from dclab.models.paths import CircleArc, LineSegment, PathLoop

FactoredPolynomial = Sequence[Tuple[complex, int]]


def expand_factored(denominator: FactoredPolynomial) -> np.ndarray:
    """Get ascending coefficients of prod (z - root)^multiplicity."""
    roots: List[complex] = []
    for root, mult in denominator:
        roots.extend([complex(root)] * int(mult))
    if not roots:
        return np.array([1.0 + 0j])
    return np.asarray(P.polyfromroots(roots), dtype=complex)


def _taylor_at(coeffs: np.ndarray, p: complex, n: int) -> np.ndarray:
    """First n Taylor coefficients of a polynomial at p."""
    out = np.zeros(n, dtype=complex)
    current = np.asarray(coeffs, dtype=complex)
    for k in range(n):
        if current.size == 0:
            break
        out[k] = P.polyval(p, current) / math.factorial(k)
        current = P.polyder(current)
    return out


def _inverse_power_series(d: complex, m: int, n: int) -> np.ndarray:
    """First n Taylor coefficients in t of (d + t)^(-m)."""
    j = np.arange(n)
    # binom(-m, j) = (-1)^j binom(m + j - 1, j)
    binom = np.array([(-1) ** k * math.comb(m + k - 1, k) for k in j], dtype=float)
    return binom * d ** (-m - j.astype(float))


def partial_fractions(
    numerator: Sequence[complex],
    denominator: FactoredPolynomial,
) -> PartialFractionForm:
    """Decompose numerator / denominator into partial fractions.

    Args:
        numerator: Ascending complex coefficients
        denominator: Distinct roots with their multiplicities

    Returns:
        The decomposition; its polynomial part is the polynomial quotient

    Raises:
        InvariantViolation: two roots coincide within the pole tolerance
    """
    pole_tol = get_settings().POLE_TOL
    roots = [(complex(r), int(m)) for r, m in denominator]
    for i, (r, m) in enumerate(roots):
        if m < 1:
            raise InvariantViolation(f"multiplicity of {r} must be positive")
        for q, _ in roots[i + 1:]:
            if abs(q - r) < pole_tol:
                raise InvariantViolation(f"roots {r} and {q} coincide; merge their multiplicities")

    num = np.asarray(numerator if len(numerator) else [0j], dtype=complex)
    den = expand_factored(roots)
    quotient, _ = P.polydiv(num, den)

    terms: List[PoleTerm] = []
    for p, m in roots:
        # g(z) = N(z) / prod_{q != p} (z - q)^mq, expanded at p to order m - 1
        series = _taylor_at(num, p, m)
        for q, mq in roots:
            if q == p:
                continue
            series = np.convolve(series, _inverse_power_series(p - q, mq, m))[:m]
        for k in range(m):
            terms.append(PoleTerm(location=p, order=m - k, coefficient=complex(series[k])))
    return PartialFractionForm(
        polynomial_part=tuple(complex(c) for c in np.atleast_1d(quotient)),
        pole_terms=tuple(terms),
    )


def residue(f: PartialFractionForm, p: complex) -> complex:
    """Get the coefficient of (z - p)^-1, zero when p is not a pole."""
    for t in f.pole_terms:
        if t.order == 1 and abs(t.location - p) < get_settings().POLE_TOL:
            return t.coefficient
    return 0j


def residue_total(f: PartialFractionForm) -> complex:
    """Sum of residues at the finite poles."""
    return complex(sum((t.coefficient for t in f.pole_terms if t.order == 1), 0j))


def _arc_winding(arc: CircleArc, p: complex) -> float:
    """Angle swept by z - p along an arc."""
    rel = p - arc.center
    if arc.is_full_circle:
        return math.copysign(2 * math.pi, arc.sweep) if abs(rel) < arc.radius else 0.0
    dist = max(arc.distance_to(p), 1e-15)
    # Pieces small enough that p never sits between a piece and its chord
    step = math.sqrt(4.0 * dist / arc.radius)
    n = int(min(2**20, max(8, math.ceil(abs(arc.sweep) / min(step, 0.5)))))
    z = arc.point(np.linspace(0.0, 1.0, n + 1)) - p
    return float(np.sum(np.angle(z[1:] / z[:-1])))


def _segment_winding(seg: LineSegment, p: complex) -> float:
    """Angle swept by z - p along a straight segment."""
    return float(np.angle((seg.end - p) / (seg.start - p)))


def winding_number(loop: PathLoop, p: complex) -> int:
    """Get the winding number of a closed loop about a point off the loop.

    Raises:
        PoleOnPath: the point lies on the loop
    """
    if loop.distance_to(p) <= get_settings().PATH_CLEARANCE:
        raise PoleOnPath(f"point {p} lies on loop {loop.label!r}")
    total = 0.0
    for seg in loop.segments:
        if isinstance(seg, CircleArc):
            total += _arc_winding(seg, p)
        else:
            total += _segment_winding(seg, p)
    return int(round(total / (2 * math.pi)))


def residue_sum_integral(f: PartialFractionForm, loop: PathLoop) -> complex:
    """Integrate f dz over a loop by the residue theorem.

    Raises:
        PoleOnPath: a pole of f lies within the path clearance of the loop
    """
    clearance = get_settings().PATH_CLEARANCE
    total = 0j
    for p in f.poles():
        if loop.distance_to(p) <= clearance:
            raise PoleOnPath(f"pole {p} lies on loop {loop.label!r}")
        res = residue(f, p)
        if res != 0:
            total += winding_number(loop, p) * res
    return 2j * math.pi * total
