"""Tests for the settings layer."""
from pathlib import Path

import numpy as np
import pytest

from dclab.core import melnikov
from dclab.core.config import Settings
from dclab.core.errors import InvariantViolation
from dclab.models import PartialFractionForm, PoleTerm, forms


def test_data_dir_created(tmp_path: Path) -> None:
    """Test that the artifact directory exists once settings are built."""
    target = tmp_path / "artifacts" / "nested"
    cfg = Settings(DATA_DIR=target)
    assert cfg.DATA_DIR == target.resolve()
    assert target.is_dir()


def test_zero_grid_setting(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Test that zero counting falls back to the configured grid."""
    cfg = Settings(ZERO_GRID=8, DATA_DIR=tmp_path)
    monkeypatch.setattr(melnikov, "get_settings", lambda: cfg)
    sizes = []

    def f(x: np.ndarray) -> np.ndarray:
        sizes.append(len(x))
        return np.sin(x)

    assert melnikov.locate_zeros(f, (0.5, 10.0), vectorized=True).count == 3
    assert sizes[:2] == [9, 17]


def test_pole_tol_setting(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Test that pole identity follows the configured tolerance."""
    terms = (
        PoleTerm(location=0.5, order=1, coefficient=1.0),
        PoleTerm(location=0.5 + 1e-8, order=2, coefficient=1.0),
    )
    assert len(PartialFractionForm(pole_terms=terms).poles()) == 2
    cfg = Settings(POLE_TOL=1e-6, DATA_DIR=tmp_path)
    monkeypatch.setattr(forms, "get_settings", lambda: cfg)
    with pytest.raises(InvariantViolation):
        PartialFractionForm(pole_terms=terms)
