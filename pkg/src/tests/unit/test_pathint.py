"""Tests for contour and iterated integration."""
import math

import pytest

from dclab.core.config import get_settings
from dclab.core.curvegeom import basepoint, canonical_loop, omega_form, punctures, winding_vector
from dclab.core.errors import ConnectorError, ConvergenceError, PoleOnPath
from dclab.core.melnikov import gelfand_leray
from dclab.core.pathint import (
    commutator_loop,
    compose_loops,
    contour_integral,
    iterated_integral2,
)
from dclab.core.ratcalc import residue_sum_integral
from dclab.models import CircleArc, LoopKind, PartialFractionForm, PathLoop, PoleTerm


def test_contour_integral_matches_residues() -> None:
    """Test quadrature against the residue theorem on every loop."""
    h = -0.6
    form = omega_form(3, h).F
    for kind in (LoopKind.ALPHA, LoopKind.BETA, LoopKind.GAMMA, LoopKind.DELTA):
        loop = canonical_loop(kind, h)
        estimate = contour_integral(form, loop, 1e-11)
        assert estimate.value == pytest.approx(residue_sum_integral(form, loop), abs=1e-9)
        assert estimate.nodes > 0


def test_contour_integral_callable() -> None:
    """Test that plain callables integrate like forms."""
    loop = canonical_loop(LoopKind.GAMMA, -1.0)
    value = contour_integral(lambda z: 1 / z, loop).value
    assert value == pytest.approx(2j * math.pi, abs=1e-9)


def test_contour_integral_pole_on_path() -> None:
    """Test that a pole on the loop raises."""
    h = -1.0
    radius = abs(punctures(h).a)
    arc = CircleArc(center=0j, radius=radius, theta_start=0.0, theta_end=2 * math.pi)
    loop = PathLoop(segments=(arc,), basepoint=arc.start, label="through_a")
    with pytest.raises(PoleOnPath):
        contour_integral(omega_form(1, h).F, loop)


def test_contour_integral_node_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that an unreachable tolerance raises at the node cap."""
    monkeypatch.setattr(get_settings(), "MAX_NODES", 256)
    loop = compose_loops(
        [(canonical_loop(LoopKind.ALPHA, -1.0), 1)],
        base=basepoint(-1.0),
        avoid=punctures(-1.0).as_tuple(),
    )
    with pytest.raises(ConvergenceError):
        contour_integral(omega_form(5, -1.0).F, loop, 1e-30)


def test_iterated_integral_of_a_form_with_itself() -> None:
    """Test int(omega, omega) = (int omega)^2 / 2."""
    h = -1.5
    loop = canonical_loop(LoopKind.DELTA, h)
    form = omega_form(1, h).F
    single = contour_integral(form, loop, 1e-12).value
    double = iterated_integral2(form, form, loop, 1e-10).value
    assert double == pytest.approx(single**2 / 2, abs=1e-8)


def test_shuffle_identity_mixed_forms() -> None:
    """Test int ab + int ba = int a int b for a form and a Gelfand-Leray form."""
    h = -0.4
    loop = canonical_loop(LoopKind.ALPHA, h)
    a = omega_form(2, h).F
    b = gelfand_leray(omega_form(5, h))
    ab = iterated_integral2(a, b, loop, 1e-10).value
    ba = iterated_integral2(b, a, loop, 1e-10).value
    prod = contour_integral(a, loop, 1e-12).value * contour_integral(b, loop, 1e-12).value
    assert ab + ba == pytest.approx(prod, abs=1e-7)


def test_iterated_integral_order() -> None:
    """Test that the second form is the inner integral on the unit circle."""
    circle = CircleArc(center=0j, radius=1.0, theta_start=0.0, theta_end=2 * math.pi)
    loop = PathLoop(segments=(circle,), basepoint=1 + 0j, label="unit")
    dz = PartialFractionForm(polynomial_part=(1.0,))
    dlog = PartialFractionForm(pole_terms=(PoleTerm(location=0j, order=1, coefficient=1.0),))
    # inner log z = i theta, outer int i theta dz = 2 pi i
    assert iterated_integral2(dz, dlog, loop, 1e-10).value == pytest.approx(2j * math.pi, abs=1e-8)
    assert iterated_integral2(dlog, dz, loop, 1e-10).value == pytest.approx(-2j * math.pi, abs=1e-8)


def test_compose_loops_adds_periods() -> None:
    """Test that composed loops integrate to the sum of their parts."""
    h = -0.8
    alpha = canonical_loop(LoopKind.ALPHA, h)
    gamma = canonical_loop(LoopKind.GAMMA, h)
    composed = compose_loops([(alpha, 1), (gamma, 1)], base=basepoint(h), avoid=punctures(h).as_tuple())
    assert winding_vector(composed, h) == (1, 1, 0)
    form = omega_form(4, h).F
    total = contour_integral(form, composed, 1e-11).value
    parts = residue_sum_integral(form, alpha) + residue_sum_integral(form, gamma)
    assert total == pytest.approx(parts, abs=1e-8)


def test_compose_loops_inverse() -> None:
    """Test that a loop followed by its inverse integrates to zero."""
    h = 2.0
    beta = canonical_loop(LoopKind.BETA, h)
    composed = compose_loops([(beta, 1), (beta, -1)])
    assert contour_integral(omega_form(3, h).F, composed).value == pytest.approx(0, abs=1e-8)


def test_compose_loops_rejects_bad_words() -> None:
    """Test empty words and exponents other than +-1."""
    alpha = canonical_loop(LoopKind.ALPHA, -1.0)
    with pytest.raises(ValueError):
        compose_loops([])
    with pytest.raises(ValueError):
        compose_loops([(alpha, 2)])


def test_connector_through_puncture() -> None:
    """Test that a connector crossing a puncture raises."""
    h = -1.0
    alpha = canonical_loop(LoopKind.ALPHA, h)
    a = punctures(h).a
    across = a + (a - alpha.basepoint)
    with pytest.raises(ConnectorError):
        compose_loops([(alpha, 1)], base=across, avoid=[a])


@pytest.mark.parametrize("h", [-1.0, 2.5, 0.5 + 0.4j])
def test_commutator_loop_is_null_homologous(h: complex) -> None:
    """Test that the commutator has zero winding and zero periods."""
    loop = commutator_loop(h)
    assert winding_vector(loop, h) == (0, 0, 0)
    assert abs(loop.basepoint - basepoint(h)) < 1e-12
    value = contour_integral(omega_form(2, h).F, loop, 1e-10).value
    assert abs(value) < 1e-8
