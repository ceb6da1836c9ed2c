"""Numerical contour and length-two iterated integrals along loops.

Iterated integrals put the second form inner and the first form outer:

    iterated_integral2(a, b, loop) = int_{0 <= t1 <= t2 <= 1} b(t1) a(t2) dt1 dt2

so the product int a b integrates b first. The
shuffle relation int ab + int ba = (int a)(int b) holds by construction.
"""
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import logfire
import numpy as np
from numpy.polynomial import legendre as L

from dclab.core.config import get_settings
from dclab.core.curvegeom import basepoint, canonical_loop, punctures
from dclab.core.errors import ConnectorError, ConvergenceError, PoleOnPath
from dclab.models.forms import PartialFractionForm
from dclab.models.geometry import LoopKind
from dclab.models.melnikov import IntegralEstimate
from dclab.models.paths import CircleArc, LineSegment, PathLoop, Segment

DzForm = Union[PartialFractionForm, Callable[[np.ndarray], np.ndarray]]

PANEL_NODES = 16
INITIAL_PANELS = 4
INITIAL_TRAPEZOID = 64
CONNECTOR_CLEARANCE = 1e-3


def _as_callable(form: DzForm, loop: PathLoop) -> Callable[[np.ndarray], np.ndarray]:
    """Get a vectorized evaluator, checking poles against the path."""
    if isinstance(form, PartialFractionForm):
        clearance = get_settings().PATH_CLEARANCE
        for p in form.poles():
            if loop.distance_to(p) <= clearance:
                raise PoleOnPath(f"pole {p} lies on loop {loop.label!r}")
        return form.evaluate
    return form


def _pullback(f: Callable[[np.ndarray], np.ndarray], seg: Segment, t: np.ndarray) -> np.ndarray:
    """Values of f(z(t)) z'(t) on a segment."""
    values = np.asarray(f(seg.point(t)), dtype=complex) * seg.velocity(t)
    if not np.all(np.isfinite(values)):
        raise PoleOnPath("integrand is not finite on the path")
    return values


@lru_cache(maxsize=8)
def _panel_rule(m: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes, weights and spectral cumulative integration matrix on [-1, 1]."""
    x, w = L.leggauss(m)
    vander = L.legvander(x, m - 1)
    basis_integrals = np.empty((m, m))
    for k in range(m):
        unit = np.zeros(m)
        unit[k] = 1.0
        basis_integrals[:, k] = L.legval(x, L.legint(unit, lbnd=-1.0))
    return x, w, basis_integrals @ np.linalg.inv(vander)


def _panel_nodes(panels: int, m: int) -> Tuple[List[np.ndarray], np.ndarray]:
    """Per-panel parameter nodes of a segment and the panel half widths."""
    x, _, _ = _panel_rule(m)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])
    nodes = [mid + half * x for mid in mids]
    return nodes, np.full(panels, half)


def _segment_gauss(f: Callable[[np.ndarray], np.ndarray], seg: Segment, panels: int) -> complex:
    """Composite Gauss-Legendre value on one segment."""
    x, w, _ = _panel_rule(PANEL_NODES)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 / panels
    t = (mids[:, None] + half * x[None, :]).ravel()
    values = _pullback(f, seg, t).reshape(panels, PANEL_NODES)
    return complex(half * np.sum(values * w[None, :]))


def _segment_trapezoid(f: Callable[[np.ndarray], np.ndarray], seg: Segment, n: int) -> complex:
    """Periodic trapezoid value on a full circle."""
    t = np.arange(n) / n
    return complex(np.mean(_pullback(f, seg, t)))


def contour_integral(
    form: DzForm,
    loop: PathLoop,
    tolerance: Optional[float] = None,
) -> IntegralEstimate:
    """Integrate f dz over a loop by node doubling.

    Full circles use the periodic trapezoid rule and every other piece composite
    Gauss-Legendre panels.

    Raises:
        PoleOnPath: the integrand is singular on the loop
        ConvergenceError: the node cap was reached first
    """
    settings = get_settings()
    tol = settings.CONTOUR_TOL if tolerance is None else tolerance
    f = _as_callable(form, loop)
    value = 0j
    error = 0.0
    nodes = 0
    share = tol / len(loop.segments)
    for seg in loop.segments:
        circle = isinstance(seg, CircleArc) and seg.is_full_circle
        n = INITIAL_TRAPEZOID if circle else INITIAL_PANELS

        def rule(k: int) -> complex:
            return _segment_trapezoid(f, seg, k) if circle else _segment_gauss(f, seg, k)

        previous = rule(n)
        while True:
            n *= 2
            current = rule(n)
            diff = abs(current - previous)
            used = n if circle else n * PANEL_NODES
            if diff < share:
                break
            if used >= settings.MAX_NODES:
                logfire.error(
                    "contour_integral_failed",
                    error="node cap reached",
                    error_type="ConvergenceError",
                    loop=loop.label,
                    residual=diff,
                )
                raise ConvergenceError(f"contour integral on {loop.label!r} did not converge")
            previous = current
        value += current
        error += diff
        nodes += used
    return IntegralEstimate(value=value, error=error, nodes=nodes)


def _iterated_pass(
    fa: Callable[[np.ndarray], np.ndarray],
    fb: Callable[[np.ndarray], np.ndarray],
    loop: PathLoop,
    panels: int,
) -> complex:
    """One Chen quadrature pass with a fixed number of panels per segment, fb inner."""
    _, w, cumulative = _panel_rule(PANEL_NODES)
    running = 0j
    total = 0j
    for seg in loop.segments:
        nodes, halves = _panel_nodes(panels, PANEL_NODES)
        for t, half in zip(nodes, halves):
            a = _pullback(fa, seg, t)
            b = _pullback(fb, seg, t)
            inner = running + half * (cumulative @ b)
            total += half * np.sum(w * a * inner)
            running += half * np.sum(w * b)
    return complex(total)


def iterated_integral2(
    form_a: DzForm,
    form_b: DzForm,
    loop: PathLoop,
    tolerance: Optional[float] = None,
) -> IntegralEstimate:
    """Integrate the length-two iterated integral of (form_a, form_b), form_b inner.

    Raises:
        PoleOnPath: an integrand is singular on the loop
        ConvergenceError: the node cap was reached first
    """
    settings = get_settings()
    tol = settings.ITERATED_TOL if tolerance is None else tolerance
    fa = _as_callable(form_a, loop)
    fb = _as_callable(form_b, loop)
    panels = INITIAL_PANELS
    previous = _iterated_pass(fa, fb, loop, panels)
    while True:
        panels *= 2
        current = _iterated_pass(fa, fb, loop, panels)
        diff = abs(current - previous)
        nodes = panels * PANEL_NODES * len(loop.segments)
        if diff < tol:
            return IntegralEstimate(value=current, error=diff, nodes=nodes)
        if nodes >= settings.MAX_NODES:
            logfire.error(
                "iterated_integral_failed",
                error="node cap reached",
                error_type="ConvergenceError",
                loop=loop.label,
                residual=diff,
            )
            raise ConvergenceError(f"iterated integral on {loop.label!r} did not converge")
        previous = current


def _connector(start: complex, end: complex, avoid: Sequence[complex]) -> LineSegment:
    """Straight connector that keeps its distance from the punctures."""
    seg = LineSegment(start=start, end=end)
    for p in avoid:
        if seg.distance_to(p) < CONNECTOR_CLEARANCE:
            raise ConnectorError(f"connector {start} -> {end} passes within {CONNECTOR_CLEARANCE} of {p}")
    return seg


def compose_loops(
    words: Sequence[Tuple[PathLoop, int]],
    base: Optional[complex] = None,
    avoid: Sequence[complex] = (),
) -> PathLoop:
    """Compose loops into one closed path, left to right.

    Args:
        words: Pairs (loop, exponent) with exponent +1 or -1
        base: Common basepoint, defaults to the first loop's basepoint
        avoid: Punctures that connectors must keep clear of

    Raises:
        ConnectorError: a connector passes too close to a puncture
    """
    if not words:
        raise ValueError("cannot compose an empty word")
    base = words[0][0].basepoint if base is None else complex(base)
    segments: List[Segment] = []
    labels: List[str] = []
    for loop, exponent in words:
        if exponent not in (1, -1):
            raise ValueError(f"exponent must be +1 or -1, got {exponent}")
        piece = loop if exponent == 1 else loop.reversed()
        detour = abs(piece.basepoint - base) > 1e-12 * max(1.0, abs(base))
        if detour:
            segments.append(_connector(base, piece.basepoint, avoid))
        segments.extend(piece.segments)
        if detour:
            segments.append(_connector(piece.basepoint, base, avoid))
        labels.append(loop.label if exponent == 1 else f"{loop.label}^-1")
    return PathLoop(segments=tuple(segments), basepoint=base, label=".".join(labels))


def commutator_loop(h: complex) -> PathLoop:
    """Build (alpha, beta) = alpha^-1 beta^-1 alpha beta based at sqrt(h (h - 1))."""
    alpha = canonical_loop(LoopKind.ALPHA, h)
    beta = canonical_loop(LoopKind.BETA, h)
    return compose_loops(
        [(alpha, -1), (beta, -1), (alpha, 1), (beta, 1)],
        base=basepoint(h),
        avoid=punctures(h).as_tuple(),
    )
