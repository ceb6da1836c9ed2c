"""Tests for level-curve geometry and form pullbacks."""
import math

import numpy as np
import pytest

from dclab.core.curvegeom import (
    basepoint,
    canonical_loop,
    chart_from_zh,
    chart_to_zh,
    combine_forms,
    form_coefficients,
    form_weights,
    hamiltonian,
    omega_form,
    pullback_oracle,
    punctures,
    sample_level_points,
    winding_vector,
)
from dclab.core.errors import DomainError, SingularInput
from dclab.models import Center, LoopKind, Parameters


def test_hamiltonian_values() -> None:
    """Test H at the centers' neighbourhoods and its singular line."""
    assert hamiltonian(0.0, -1.0) == pytest.approx(-1 / 3)
    assert hamiltonian(0.0, 0.0) == 0.0
    assert hamiltonian(0.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(SingularInput):
        hamiltonian(0.3, 0.5)


def test_chart_round_trip() -> None:
    """Test that the chart inverts on a real point."""
    z, h = chart_to_zh(0.3, -0.4)
    x, y = chart_from_zh(z, h)
    assert x == pytest.approx(0.3, abs=1e-13)
    assert y == pytest.approx(-0.4, abs=1e-13)


def test_chart_from_zh_puncture() -> None:
    """Test that the origin of the chart is rejected."""
    with pytest.raises(SingularInput):
        chart_from_zh(0j, -1.0)


def test_punctures() -> None:
    """Test puncture locations and critical values."""
    pts = punctures(-1.0)
    assert pts.a == pytest.approx(1j)
    assert pts.b == pytest.approx(2j)
    assert pts.R2 == pytest.approx(2.0)
    for h in (0.0, 1.0):
        with pytest.raises(SingularInput):
            punctures(h)


def test_delta_loop() -> None:
    """Test the vanishing cycle at h = -1/3."""
    loop = canonical_loop(LoopKind.DELTA, -1 / 3)
    assert loop.segments[0].radius == pytest.approx(2 / 3)
    assert winding_vector(loop, -1 / 3) == (1, 1, 0)


@pytest.mark.parametrize(
    "kind, expected",
    [
        (LoopKind.ALPHA, (0, 1, 0)),
        (LoopKind.BETA, (0, 0, 1)),
        (LoopKind.GAMMA, (1, 0, 0)),
    ],
)
def test_small_loops_wind_once(kind: LoopKind, expected: tuple) -> None:
    """Test winding vectors of the small loops, complex levels included."""
    for h in (-1.0, 2.5, 0.5 + 0.5j):
        assert winding_vector(canonical_loop(kind, h), h) == expected


def test_delta_tilde_loop() -> None:
    """Test the second vanishing cycle."""
    assert winding_vector(canonical_loop(LoopKind.DELTA_TILDE, 2.0), 2.0) == (1, 0, 1)


def test_vanishing_cycles_outside_range() -> None:
    """Test that the vanishing cycles refuse levels outside their annulus."""
    with pytest.raises(DomainError):
        canonical_loop(LoopKind.DELTA, 0.5)
    with pytest.raises(DomainError):
        canonical_loop(LoopKind.DELTA_TILDE, -0.5)


def test_basepoint_on_real_oval() -> None:
    """Test that the basepoint at a real level maps to a real point of H = h."""
    h = -0.7
    x, y = chart_from_zh(basepoint(h), h)
    assert abs(x.imag) < 1e-13 and abs(y.imag) < 1e-13
    assert hamiltonian(x.real, y.real) == pytest.approx(h)


def test_form_coefficients() -> None:
    """Test omega_2 and omega_5 in (x, y) coordinates."""
    a, b = form_coefficients(2, 1.0, 0.0)
    assert a == 0 and b == pytest.approx(1.0)
    a, b = form_coefficients(5, 1.0, 2.0)
    assert a == pytest.approx(3 / 9) and b == pytest.approx(4 / 9)
    with pytest.raises(ValueError):
        form_coefficients(6, 0.0, 0.0)


@pytest.mark.parametrize("index", [1, 2, 3, 4, 5])
def test_pullback_matches_oracle(index: int, rng: np.random.Generator) -> None:
    """Test the symbolic pullback against the numerical chain rule."""
    for h in (-1.3, 2.2):
        form = omega_form(index, h)
        for z in sample_level_points(h, 5, rng):
            f_val, phi_val = pullback_oracle(index, h, z)
            assert form.F.evaluate(z) == pytest.approx(f_val, rel=1e-9, abs=1e-12)
            assert form.Phi.evaluate(z) == pytest.approx(phi_val, rel=1e-9, abs=1e-12)


def test_pullback_h_derivative(rng: np.random.Generator) -> None:
    """Test dF/dh against a central difference in h."""
    h, step = -0.8, 1e-5
    form = omega_form(5, h)
    upper, lower = omega_form(5, h + step), omega_form(5, h - step)
    assert form.dF_dh is not None
    for z in sample_level_points(h, 5, rng):
        fd = (upper.F.evaluate(z) - lower.F.evaluate(z)) / (2 * step)
        assert form.dF_dh.evaluate(z) == pytest.approx(fd, rel=1e-6)


def test_pullback_pole_orders() -> None:
    """Test that F has at most double poles at the punctures."""
    h = -1.0
    form = omega_form(1, h)
    for p in punctures(h).as_tuple():
        assert form.F.max_order(p) <= 2


def test_form_weights_second_center() -> None:
    """Test that the second basis pairs lambda_3 with omega_3 - omega_1."""
    lam = Parameters(l1=0.1, l2=0.2, l3=0.3, l4=0.4, l5=0.5)
    assert form_weights(Center.FIRST, lam) == (0.1, 0.2, 0.3, 0.4, 0.5)
    assert form_weights(Center.SECOND, lam) == pytest.approx((-0.2, 0.2, 0.3, 0.4, 0.5))


def test_combine_forms() -> None:
    """Test weighted sums of the forms."""
    h = -0.5
    zero = combine_forms([0, 0, 0, 0, 0], h)
    assert zero.F.pole_terms == ()
    combined = combine_forms([1, 0, 0, 0, 2], h)
    z = np.array([0.4 + 0.3j])
    expected = omega_form(1, h).F.evaluate(z) + 2 * omega_form(5, h).F.evaluate(z)
    assert np.allclose(combined.F.evaluate(z), expected)
    with pytest.raises(ValueError):
        combine_forms([1, 2], h)


def test_sample_level_points_keep_clear(rng: np.random.Generator) -> None:
    """Test that sampled points avoid the punctures."""
    h = -2.0
    radius = math.sqrt(h * (h - 1))
    pts = sample_level_points(h, 50, rng)
    for p in punctures(h).as_tuple():
        assert np.min(np.abs(pts - p)) > 0.1 * radius
