"""Command-line front end of the double-center laboratory."""
import argparse
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import logfire
import numpy as np
import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from dclab.core.bautin import (
    arc_limit_check,
    classify_arc,
    involution_linear,
    involution_parameters,
    involution_residual,
    parse_arc,
)
from dclab.core.config import settings
from dclab.core.errors import ConvergenceError, DclabError
from dclab.core.flowsim import census_sweep, limit_cycle_census
from dclab.core.melnikov import (
    NORMALIZATION_VERSION,
    check_range,
    commutator_integral,
    m1_closed,
    m1_residues,
    m2_closed,
    m2_iterated,
    shuffle_check,
    sweep_components,
)
from dclab.models.parameters import Center, Parameters
from dclab.models.run_config import Command, HGrid, OutputFormat, RunConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
SHUFFLE_TOL = 1e-7
TABLE_ROWS = 40
LIMITATION = (
    "desk-scale energy ranges only; cycles from infinity and from the annulus "
    "boundaries are not counted"
)

# Column units written into CSV headers
UNITS: Dict[str, str] = {
    "h": "energy",
    "closed": "energy",
    "oracle": "energy",
    "delta": "energy",
    "residual": "abs",
    "re": "1",
    "im": "1",
    "count": "samples",
}

Rows = List[Dict[str, Any]]
Handler = Callable[[RunConfig], Tuple[Any, Rows]]

console = Console()
err_console = Console(stderr=True)


def _center(cfg: RunConfig) -> Center:
    return Center.FIRST if cfg.center == 1 else Center.SECOND


def _require(value: Optional[Any], flag: str, command: Command) -> Any:
    if value is None:
        raise ValueError(f"{command.value} needs {flag}")
    return value


def _melnikov(cfg: RunConfig) -> Tuple[Any, Rows]:
    grid: HGrid = _require(cfg.h_grid, "--h-grid", cfg.command)
    center = _center(cfg)
    rows: Rows = []
    for h in grid.values():
        check_range(center, h)
        if cfg.order == 1:
            row: Dict[str, Any] = {"h": h, "closed": m1_closed(center, cfg.parameters, h)}
            if cfg.oracle:
                row["oracle"] = m1_residues(center, cfg.parameters, h)
        else:
            row = {"h": h, "closed": m2_closed(center, h)}
            if cfg.oracle:
                row["oracle"] = m2_iterated(center, h, cfg.iterated_tol)
        if "oracle" in row:
            row["delta"] = abs(row["closed"] - row["oracle"])
        rows.append(row)
    deltas = [r["delta"] for r in rows if "delta" in r]
    return {"rows": rows, "max_delta": max(deltas) if deltas else None}, rows


def _shuffle(cfg: RunConfig) -> Tuple[Any, Rows]:
    if cfg.h is not None:
        levels = [cfg.h]
    else:
        rng = np.random.default_rng(cfg.seed)
        levels = [float(v) for v in rng.uniform(-2.0, -0.1, 5)]
    rows: Rows = []
    for h in levels:
        check_range(Center.FIRST, h)
        for row in shuffle_check(h, tolerance=cfg.iterated_tol):
            rows.append({"h": h, **row, "passed": float(row["residual"]) < SHUFFLE_TOL})
    return {"rows": rows, "passed": all(r["passed"] for r in rows)}, rows


def _commutator(cfg: RunConfig) -> Tuple[Any, Rows]:
    h = complex(_require(cfg.h, "--h", cfg.command), cfg.h_imag)
    center = _center(cfg)
    lam = cfg.parameters
    weight = lam.l2 * lam.l5 if center is Center.FIRST else lam.l3 * lam.l4
    values = {
        "determinant": commutator_integral(lam, h, "determinant", center, cfg.iterated_tol),
        "direct": commutator_integral(lam, h, "direct", center, cfg.iterated_tol),
        "expected": -4j * math.pi**2 * weight,
    }
    rows = [{"mode": mode, "re": v.real, "im": v.imag} for mode, v in values.items()]
    return {"h": [h.real, h.imag], "rows": rows}, rows


def _census(cfg: RunConfig) -> Tuple[Any, Rows]:
    census = limit_cycle_census(
        cfg.parameters,
        h_range_first=cfg.h_range_first,
        h_range_second=cfg.h_range_second,
        rel_tol=cfg.rel_tol,
    )
    data = {
        "i": census.i,
        "j": census.j,
        "cycle_levels": {
            "first": census.cycle_levels_first,
            "second": census.cycle_levels_second,
        },
        "diagnostics": census.diagnostics.model_dump(),
    }
    return data, [{"i": census.i, "j": census.j}]


def _histogram_rows(histogram: Dict[str, Dict[str, int]]) -> Rows:
    return [
        {"component": component, "ij": key, "count": count}
        for component, bucket in histogram.items()
        for key, count in sorted(bucket.items())
    ]


def _census_sweep(cfg: RunConfig) -> Tuple[Any, Rows]:
    histogram = census_sweep(cfg.samples, cfg.seed, n_jobs=cfg.threads)
    return histogram, _histogram_rows(histogram)


def _sweep_components(cfg: RunConfig) -> Tuple[Any, Rows]:
    histogram = sweep_components(cfg.samples, cfg.seed)
    return histogram, _histogram_rows(histogram)


def _classify_arc(cfg: RunConfig) -> Tuple[Any, Rows]:
    arc = parse_arc(_require(cfg.arc, "--arc", cfg.command))
    pair = classify_arc(arc)
    floats = pair.as_floats()
    exact = {
        name: None if triple is None else [str(c) for c in triple]
        for name, triple in (("p1", pair.p1), ("p2", pair.p2))
    }
    data = {
        **floats,
        "component": pair.component.value,
        "satisfied": [tag.value for tag in pair.satisfied],
        "exact": exact,
        "limit_check": arc_limit_check(arc, pair),
    }
    row = {"component": data["component"], "p1": floats["p1"], "p2": floats["p2"]}
    return data, [row]


def _involution(cfg: RunConfig) -> Tuple[Any, Rows]:
    lam = cfg.parameters
    image = involution_parameters(lam)
    linear = involution_linear(lam)
    rng = np.random.default_rng(cfg.seed)
    points = [complex(v) for v in 0.3 * (rng.standard_normal(8) + 1j * rng.standard_normal(8))]
    residual = involution_residual(lam, points)
    rows = [
        {"name": f"l{k}", "image": a, "linear": b}
        for k, (a, b) in enumerate(zip(image.as_list(), linear.as_list()), start=1)
    ]
    return {"image": image.as_list(), "linear": linear.as_list(), "residual": residual}, rows


HANDLERS: Dict[Command, Handler] = {
    Command.MELNIKOV: _melnikov,
    Command.SHUFFLE_CHECK: _shuffle,
    Command.COMMUTATOR: _commutator,
    Command.CENSUS: _census,
    Command.CENSUS_SWEEP: _census_sweep,
    Command.CLASSIFY_ARC: _classify_arc,
    Command.SWEEP_COMPONENTS: _sweep_components,
    Command.INVOLUTION: _involution,
}


def _meta(cfg: RunConfig) -> Dict[str, Any]:
    return {
        "command": cfg.command.value,
        "seed": cfg.seed,
        "parameters": cfg.parameters.as_list(),
        "tolerances": {
            "contour": cfg.contour_tol,
            "iterated": cfg.iterated_tol,
            "rel": cfg.rel_tol,
        },
        "normalization": NORMALIZATION_VERSION,
        "h_ranges": {
            "first": list(cfg.h_range_first or settings.H_RANGE_FIRST),
            "second": list(cfg.h_range_second or settings.H_RANGE_SECOND),
        },
        "limitation": LIMITATION,
    }


def _json_default(value: Any) -> Any:
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def write_artifact(cfg: RunConfig, data: Any, rows: Rows) -> Path:
    """Write the run's artifact and return its path."""
    fmt = cfg.output_format
    out = cfg.out or settings.DATA_DIR / f"{cfg.command.value}.{fmt.value}"
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt is OutputFormat.JSON:
        payload = {"meta": _meta(cfg), "data": data}
        out.write_text(json.dumps(payload, indent=2, default=_json_default))
    else:
        frame = pd.DataFrame(rows)
        frame.columns = [f"{c} [{UNITS[c]}]" if c in UNITS else c for c in frame.columns]
        with out.open("w") as handle:
            handle.write(f"# dclab {cfg.command.value} normalization={NORMALIZATION_VERSION} seed={cfg.seed}\n")
            frame.to_csv(handle, index=False)
    logfire.info("artifact_written", command=cfg.command.value, path=str(out), rows=len(rows))
    return out


def _show(cfg: RunConfig, rows: Rows, out: Path) -> None:
    table = Table(title=f"dclab {cfg.command.value}")
    columns = list(rows[0]) if rows else []
    for column in columns:
        table.add_column(column)
    for row in rows[:TABLE_ROWS]:
        table.add_row(*(_cell(row.get(c)) for c in columns))
    console.print(table)
    if len(rows) > TABLE_ROWS:
        console.print(f"... {len(rows) - TABLE_ROWS} more rows")
    console.print(f"artifact: {out}")


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def run(cfg: RunConfig) -> int:
    """Run one validated configuration and write its artifact.

    Returns:
        0 on success, 2 for configuration errors, 3 for numerical non-convergence
    """
    try:
        data, rows = HANDLERS[cfg.command](cfg)
        out = write_artifact(cfg, data, rows)
    except ConvergenceError as e:
        logfire.error("run_failed", error=str(e), error_type=type(e).__name__, command=cfg.command.value)
        err_console.print(f"[red]numerical failure ({type(e).__name__}):[/red] {e}")
        return EXIT_NUMERIC
    except (DclabError, ValueError) as e:
        logfire.error("run_failed", error=str(e), error_type=type(e).__name__, command=cfg.command.value)
        err_console.print(f"[red]configuration error ({type(e).__name__}):[/red] {e}")
        return EXIT_CONFIG
    if not cfg.quiet:
        _show(cfg, rows, out)
    return EXIT_OK


def _pair(text: str) -> Tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"expected lo:hi, got {text!r}")
    return float(parts[0]), float(parts[1])


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", default="0,0,0,0,0", help="l1,l2,l3,l4,l5")
    common.add_argument("--seed", type=int, default=settings.SEED)
    common.add_argument("--contour-tol", type=float, default=settings.CONTOUR_TOL)
    common.add_argument("--iterated-tol", type=float, default=settings.ITERATED_TOL)
    common.add_argument("--rel-tol", type=float, default=settings.ODE_RTOL)
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default="json")
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--threads", type=int, default=None, help="Overrides DCLAB_THREADS")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="dclab", description="Bifurcation laboratory for the double center")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(Command.MELNIKOV.value, parents=[common], help="Melnikov functions on an energy grid")
    p.add_argument("--center", type=int, choices=[1, 2], default=1)
    p.add_argument("--order", type=int, choices=[1, 2], default=1)
    p.add_argument("--h-grid", required=True, help="lo:hi:n")
    p.add_argument("--oracle", action="store_true")

    p = sub.add_parser(Command.SHUFFLE_CHECK.value, parents=[common], help="Shuffle identities")
    p.add_argument("--h", type=float, default=None)

    p = sub.add_parser(Command.COMMUTATOR.value, parents=[common], help="Commutator iterated integral")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--h-imag", type=float, default=0.0)
    p.add_argument("--center", type=int, choices=[1, 2], default=1)

    p = sub.add_parser(Command.CENSUS.value, parents=[common], help="Numerical limit-cycle census")
    p.add_argument("--h1", default=None, help="lo:hi around (0, 0)")
    p.add_argument("--h2", default=None, help="lo:hi around (0, 1)")

    p = sub.add_parser(Command.CENSUS_SWEEP.value, parents=[common], help="Census near each component")
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser(Command.CLASSIFY_ARC.value, parents=[common], help="Classify a parameter arc")
    p.add_argument("--arc", required=True)

    p = sub.add_parser(Command.SWEEP_COMPONENTS.value, parents=[common], help="Zero counts per component")
    p.add_argument("--samples", type=int, default=1000)

    sub.add_parser(Command.INVOLUTION.value, parents=[common], help="Involution exchanging the foci")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    """Validate parsed arguments into a run configuration.

    Raises:
        ValueError: malformed flag values, pydantic's ValidationError included
    """
    values = [float(v) for v in ns.lam.split(",")]
    fields: Dict[str, Any] = {
        "command": ns.command,
        "parameters": Parameters.from_sequence(values),
        "seed": ns.seed,
        "contour_tol": ns.contour_tol,
        "iterated_tol": ns.iterated_tol,
        "rel_tol": ns.rel_tol,
        "output_format": ns.output_format,
        "out": ns.out,
        "threads": ns.threads,
        "quiet": ns.quiet,
    }
    optional = {
        "center": getattr(ns, "center", None),
        "order": getattr(ns, "order", None),
        "oracle": getattr(ns, "oracle", None),
        "h": getattr(ns, "h", None),
        "h_imag": getattr(ns, "h_imag", None),
        "arc": getattr(ns, "arc", None),
        "samples": getattr(ns, "samples", None),
    }
    fields.update({k: v for k, v in optional.items() if v is not None})
    if getattr(ns, "h_grid", None):
        fields["h_grid"] = HGrid.parse(ns.h_grid)
    if getattr(ns, "h1", None):
        fields["h_range_first"] = _pair(ns.h1)
    if getattr(ns, "h2", None):
        fields["h_range_second"] = _pair(ns.h2)
    return RunConfig(**fields)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``dclab`` console script."""
    load_dotenv()
    logfire.configure(
        service_name="dclab",
        environment=settings.ENVIRONMENT,
        send_to_logfire="if-token-present",
        console=False,
    )
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except (ValidationError, DclabError, ValueError) as e:
        logfire.error("config_invalid", error=str(e), error_type=type(e).__name__)
        err_console.print(f"[red]invalid configuration:[/red] {e}")
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
