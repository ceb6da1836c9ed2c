"""Tests for the command-line front end."""
import json
from pathlib import Path

import pandas as pd
import pytest

from dclab import cli
from dclab.core.errors import ConvergenceError
from dclab.core.melnikov import NORMALIZATION_VERSION
from dclab.models import Command, Parameters, RunConfig


def test_classify_arc_writes_json(tmp_path: Path, e2_arc_text: str) -> None:
    """Test the classify-arc artifact and its metadata."""
    out = tmp_path / "arc.json"
    code = cli.main(["classify-arc", "--arc", e2_arc_text, "--seed", "7", "--out", str(out), "--quiet"])
    assert code == cli.EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["meta"]["command"] == "classify-arc"
    assert payload["meta"]["seed"] == 7
    assert payload["meta"]["normalization"] == NORMALIZATION_VERSION
    assert payload["data"]["component"] == "E2"
    assert payload["data"]["satisfied"] == ["E2"]
    assert payload["data"]["exact"]["p1"] == ["1", "-1", "0"]
    assert payload["data"]["exact"]["p2"] == ["0", "1", "2/3"]
    assert payload["data"]["limit_check"] < 1e-3


def test_melnikov_csv_has_units(tmp_path: Path) -> None:
    """Test the CSV header line and unit-annotated columns."""
    out = tmp_path / "m1.csv"
    code = cli.main([
        "melnikov",
        "--lambda", "0.01,0.02,-0.01,0.03,0.005",
        "--h-grid=-0.9:-0.1:5",
        "--oracle",
        "--format", "csv",
        "--out", str(out),
        "--quiet",
    ])
    assert code == cli.EXIT_OK
    first = out.read_text().splitlines()[0]
    assert first.startswith("# dclab melnikov")
    assert f"normalization={NORMALIZATION_VERSION}" in first
    frame = pd.read_csv(out, comment="#")
    assert list(frame.columns) == ["h [energy]", "closed [energy]", "oracle [energy]", "delta [energy]"]
    assert len(frame) == 5
    assert (frame["delta [energy]"] < 1e-8).all()


def test_involution_run(tmp_path: Path) -> None:
    """Test a run built directly from a configuration."""
    cfg = RunConfig(
        command=Command.INVOLUTION,
        parameters=Parameters(l1=0.01, l2=0.02, l3=-0.01, l4=0.005, l5=0.01),
        out=tmp_path / "inv.json",
        quiet=True,
    )
    assert cli.run(cfg) == cli.EXIT_OK
    data = json.loads(cfg.out.read_text())["data"]  # type: ignore[union-attr]
    assert len(data["image"]) == 5
    assert data["residual"] < 1e-10


@pytest.mark.parametrize(
    "argv",
    [
        ["involution", "--lambda", "0.1,0.2"],
        ["commutator", "--h", "0.00001"],
        ["melnikov", "--h-grid=-0.5:0.5:3"],
        ["census", "--h1=-0.5"],
        ["shuffle-check", "--iterated-tol", "1.0"],
    ],
)
def test_invalid_configuration_exit_code(argv: list[str], tmp_path: Path) -> None:
    """Test that malformed flags give the configuration exit code."""
    assert cli.main(argv + ["--out", str(tmp_path / "x.json"), "--quiet"]) == cli.EXIT_CONFIG


def test_domain_error_exit_code(tmp_path: Path) -> None:
    """Test that a grid outside the selected annulus is a configuration error."""
    code = cli.main([
        "melnikov", "--center", "2", "--h-grid=-0.9:-0.1:3", "--out", str(tmp_path / "m.json"), "--quiet",
    ])
    assert code == cli.EXIT_CONFIG
    assert not (tmp_path / "m.json").exists()


def test_convergence_error_exit_code(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    """Test that numerical failures give their own exit code."""
    def failing(cfg: RunConfig) -> None:
        raise ConvergenceError("quadrature stalled")

    monkeypatch.setitem(cli.HANDLERS, Command.INVOLUTION, failing)
    cfg = RunConfig(command=Command.INVOLUTION, out=tmp_path / "inv.json", quiet=True)
    assert cli.run(cfg) == cli.EXIT_NUMERIC


def test_config_from_args_ranges() -> None:
    """Test parsing of census ranges and defaults."""
    ns = cli.build_parser().parse_args(["census", "--h1=-0.5:-0.1", "--h2=1.2:3", "--lambda", "0,0.1,0,0,0.1"])
    cfg = cli.config_from_args(ns)
    assert cfg.command is Command.CENSUS
    assert cfg.h_range_first == (-0.5, -0.1)
    assert cfg.h_range_second == (1.2, 3.0)
    assert cfg.parameters == Parameters(l2=0.1, l5=0.1)
    assert cfg.output_format.value == "json"
