"""CLI Interface for the AV Feasibility Simulator

Scenario-driven commands: a single feasibility report, (p/h, M_L) sweeps
written as grid files, the minimum feed-in-tariff premium table, the
optimal GMPV tilt and the built-in oracle validation.
"""
from __future__ import annotations

import json
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence

import click
import pandas as pd
from tabulate import tabulate

from av_feasibility import __version__
from av_feasibility.exceptions import SimulationError, ValidationError
from av_feasibility.models.array import Orientation
from av_feasibility.models.economics import optional_float
from av_feasibility.models.scenario import Scenario
from av_feasibility.models.sweep import Metric, SweepSpec
from av_feasibility.services.energy_model import annual_yield, find_optimal_tilt
from av_feasibility.services.optics_cache import OpticsCache
from av_feasibility.services.oracles import run_validation
from av_feasibility.services.pipeline import ScenarioModel
from av_feasibility.services.scenario import BUNDLED_SCENARIOS, load_scenario
from av_feasibility.services.sweep_engine import (
    feasibility_boundary,
    min_fit_table,
    reference_fit_table,
    run_sweep,
    write_grid,
)
from av_feasibility.utils import Settings, configure_logging, load_settings

logger = logging.getLogger(__name__)

FORMATS = ["table", "machine"]
ORIENTATIONS = [o.value for o in Orientation]
METRICS = [m.value for m in Metric]


@dataclass
class AppContext:
    settings: Settings
    cache: OpticsCache


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Map package errors to exit codes: 1 for bad input, 2 for runtime failures."""
    try:
        yield
    except ValidationError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    except (SimulationError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(2)
    except (ValueError, ArithmeticError) as e:
        # numeric failures escaping the services count as simulation errors
        click.echo(f"Error: {SimulationError(str(e))}", err=True)
        sys.exit(2)


def _load(
    reference: str, orientation: Optional[str] = None, delta_fit: Optional[float] = None
) -> Scenario:
    scenario = load_scenario(reference)
    if orientation:
        scenario = scenario.with_orientation(Orientation(orientation))
    if delta_fit is not None:
        scenario = scenario.with_delta_fit(delta_fit)
    return scenario


def _json(data: Any) -> str:
    def clean(value: Any) -> Any:
        if isinstance(value, dict):
            return {str(k): clean(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [clean(v) for v in value]
        if isinstance(value, float):
            return optional_float(value)
        return value

    return json.dumps(clean(data), indent=2, sort_keys=True)


def _emit(text: str, out: Optional[Path], filename: str) -> None:
    click.echo(text)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text + "\n", encoding="utf-8")


def scenario_option(func: Any) -> Any:
    func = click.option(
        "--delta-fit",
        type=float,
        default=None,
        help="Override the AV feed-in-tariff premium, USD/kWh",
    )(func)
    func = click.option(
        "--orientation",
        type=click.Choice(ORIENTATIONS),
        default=None,
        help="Override the AV orientation (tilt, clearance and kappa follow)",
    )(func)
    func = click.option(
        "--scenario",
        "scenario_ref",
        required=True,
        help=f"Scenario TOML file, or a bundled name ({', '.join(BUNDLED_SCENARIOS)})",
    )(func)
    return func


def format_option(func: Any) -> Any:
    return click.option(
        "--format",
        "fmt",
        type=click.Choice(FORMATS),
        default="table",
        help="Human-readable table or machine-readable output",
    )(func)


@click.group()
@click.version_option(version=__version__)
@click.option("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
@click.option(
    "--cache-db",
    default=None,
    help="SQLite file or SQLAlchemy URL of the persistent optics cache",
)
@click.pass_context
def cli(ctx: click.Context, log_level: Optional[str], cache_db: Optional[str]) -> None:
    """AV Feasibility - agrivoltaic vs ground-mounted PV economics."""
    try:
        settings = load_settings()
        configure_logging(log_level or settings.log_level)
    except ValueError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    with exit_on_error():
        cache = OpticsCache.from_location(cache_db or settings.cache_db)
    ctx.obj = AppContext(settings=settings, cache=cache)


@cli.command("feasibility")
@scenario_option
@click.option("--ph", type=float, default=None, help="AV p/h (default: scenario)")
@click.option("--ml", type=float, default=None, help="M_L (default: scenario)")
@format_option
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.pass_obj
def feasibility_cmd(
    app: AppContext,
    scenario_ref: str,
    orientation: Optional[str],
    delta_fit: Optional[float],
    ph: Optional[float],
    ml: Optional[float],
    fmt: str,
    out: Optional[Path],
) -> None:
    """Evaluate every criterion at one design point."""
    with exit_on_error():
        scenario = _load(scenario_ref, orientation, delta_fit)
        model = ScenarioModel(scenario, app.cache)
        ph = scenario.av.pitch_over_height if ph is None else ph
        ml = scenario.economics.m_l_pv if ml is None else ml
        result = model.evaluate(ph, ml)
        inputs = {
            "scenario": scenario.name,
            "orientation": scenario.orientation.value,
            "pitch_over_height": ph,
            "m_l_pv": ml,
            "kappa": scenario.economics.kappa,
            "delta_fit": scenario.delta_fit,
            "gmpv_tilt": model.gmpv_geometry.tilt,
            "yy_av": model.column(ph).yy,
            "yy_pv": model.gmpv_entry.yy,
        }
        if fmt == "machine":
            text = _json({"inputs": inputs, "result": result.as_dict()})
            filename = "feasibility.json"
        else:
            rows = [(k, v) for k, v in inputs.items()]
            rows += [(k, v) for k, v in result.as_dict().items() if k not in inputs]
            text = tabulate(rows, headers=["quantity", "value"], floatfmt=".6g")
            filename = "feasibility.txt"
        _emit(text, out, filename)


@cli.command("sweep")
@scenario_option
@click.option(
    "--metric",
    "metrics",
    multiple=True,
    type=click.Choice(METRICS),
    help="Metric to tabulate (repeatable; default: scenario [sweep].metrics)",
)
@click.option("--threads", type=int, default=None, help="Worker threads over p/h columns")
@format_option
@click.option(
    "--out",
    type=click.Path(file_okay=False, path_type=Path),
    default=Path("."),
    show_default=True,
    help="Directory for the grid files",
)
@click.pass_obj
def sweep_cmd(
    app: AppContext,
    scenario_ref: str,
    orientation: Optional[str],
    delta_fit: Optional[float],
    metrics: Sequence[str],
    threads: Optional[int],
    fmt: str,
    out: Path,
) -> None:
    """Write one (p/h, M_L) grid file per metric."""
    with exit_on_error():
        scenario = _load(scenario_ref, orientation, delta_fit)
        selected = [Metric(m) for m in metrics] or list(scenario.sweep.metrics)
        threads = threads or app.settings.threads
        model = ScenarioModel(scenario, app.cache)
        out.mkdir(parents=True, exist_ok=True)

        written = []
        boundary = None
        for metric in selected:
            spec = SweepSpec(
                scenario=scenario,
                metric=metric,
                ph_axis=scenario.sweep.ph_axis,
                ml_axis=scenario.sweep.ml_axis,
            )
            grid = run_sweep(spec, threads=threads, model=model)
            path = out / f"sweep_{scenario.orientation.value}_{metric.value}.csv"
            write_grid(grid, path)
            written.append(str(path))
            if metric in (Metric.RHO, Metric.RHO_EFFECTIVE) and boundary is None:
                boundary = feasibility_boundary(grid, model=model)

        if fmt == "machine":
            click.echo(_json({"files": written, "boundary": boundary}))
            return
        for path in written:
            click.echo(f"wrote {path}")
        if boundary is not None:
            rows = [(ph, "-" if m is None else f"{m:.4f}") for ph, m in boundary.items()]
            click.echo(
                tabulate(rows, headers=["p/h", f"min M_L (rho >= {scenario.economics.kappa})"])
            )


@cli.command("fit-threshold")
@click.option(
    "--scenario",
    "scenario_refs",
    multiple=True,
    default=("hv", "lv"),
    show_default=True,
    help="Scenario file or bundled name (repeatable; printed side by side)",
)
@click.option(
    "--orientation",
    "orientations",
    multiple=True,
    type=click.Choice(ORIENTATIONS),
    help="AV orientation (repeatable; default: both)",
)
@click.option("--ph", "ph_list", multiple=True, type=float, help="p/h values (default 2, 3, 4)")
@click.option(
    "--ml", "ml_list", multiple=True, type=float, help="M_L values (default 10, 15, 20, 30)"
)
@format_option
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=None)
@click.pass_obj
def fit_threshold_cmd(
    app: AppContext,
    scenario_refs: Sequence[str],
    orientations: Sequence[str],
    ph_list: Sequence[float],
    ml_list: Sequence[float],
    fmt: str,
    out: Optional[Path],
) -> None:
    """Minimum feed-in-tariff premium (% of fit_pv) for AV parity with GMPV."""
    ph_values = list(ph_list) or [2.0, 3.0, 4.0]
    ml_values = list(ml_list) or [10.0, 15.0, 20.0, 30.0]
    layouts = list(orientations) or ORIENTATIONS
    with exit_on_error():
        index = pd.MultiIndex.from_product([ml_values, ph_values], names=["M_L", "p/h"])
        table = pd.DataFrame(index=index)
        reference = reference_fit_table()
        for ref in scenario_refs:
            base = load_scenario(ref)
            for layout in layouts:
                scenario = base.with_orientation(Orientation(layout))
                model = ScenarioModel(scenario, app.cache)
                wide = min_fit_table(model, ph_values, ml_values)
                column = f"{scenario.name} {layout}"
                table[column] = [wide.loc[m, p] for m, p in index]
                ref_column = f"{layout}_{str(ref).lower()}"
                if ref_column in reference.columns:
                    table[f"{column} (ref)"] = [
                        reference[ref_column].get((m, p), float("nan")) for m, p in index
                    ]

        if fmt == "machine":
            text = table.to_csv(float_format=repr, lineterminator="\n").rstrip("\n")
        else:
            text = tabulate(table.reset_index(), headers="keys", showindex=False, floatfmt=".2f")
        _emit(text, out, "fit_threshold.csv" if fmt == "machine" else "fit_threshold.txt")


@cli.command("optimal-tilt")
@click.option("--scenario", "scenario_ref", required=True, help="Scenario file or bundled name")
@click.option("--ph", type=float, default=None, help="GMPV p/h (default: scenario)")
@format_option
@click.pass_obj
def optimal_tilt_cmd(
    app: AppContext, scenario_ref: str, ph: Optional[float], fmt: str
) -> None:
    """Fixed tilt maximising the annual yield of the GMPV baseline."""
    with exit_on_error():
        scenario = load_scenario(scenario_ref)
        model = ScenarioModel(scenario, app.cache)
        gmpv = scenario.gmpv
        ph = gmpv.pitch_over_height if ph is None else ph
        tilt = find_optimal_tilt(
            scenario.site,
            model.weather,
            ph,
            scenario.module,
            gmpv.clearance_over_height,
            gmpv.albedo,
        )
        geom = gmpv.geometry(max(tilt, 1e-6)).with_pitch(ph)
        yy = annual_yield(
            geom,
            model.weather,
            scenario.module,
            scenario.optics.n_points,
            scenario.optics.masking_rows,
        ).yy
        data = {"pitch_over_height": ph, "tilt": tilt, "yy": yy}
        if fmt == "machine":
            click.echo(_json(data))
        else:
            click.echo(
                tabulate(
                    [(ph, tilt, yy)],
                    headers=["p/h", "optimal tilt (deg)", "yield (kWh/m2/yr)"],
                    floatfmt=(".2f", ".1f", ".2f"),
                )
            )


@cli.command("validate")
@click.option("--seed", type=int, default=None, help="Monte-Carlo seed (default: settings)")
@click.option("--rays", type=int, default=1_000_000, show_default=True)
@format_option
@click.option("--perturb-kappa", type=float, default=0.0, hidden=True)
@click.pass_obj
def validate_cmd(
    app: AppContext, seed: Optional[int], rays: int, fmt: str, perturb_kappa: float
) -> None:
    """Run the oracle suites; exit status 1 on any failure."""
    seed = app.settings.seed if seed is None else seed
    with exit_on_error():
        if rays < 1000:
            raise ValidationError(f"must be >= 1000, got {rays}", "rays")
        outcomes = run_validation(seed, kappa_perturbation=perturb_kappa, rays=rays)

    if fmt == "machine":
        click.echo(
            _json(
                {
                    "seed": seed,
                    "suites": [
                        {
                            "name": o.name,
                            "total": o.total,
                            "failures": o.failures,
                            "passed": o.passed,
                        }
                        for o in outcomes
                    ],
                }
            )
        )
    else:
        rows = [
            (o.name, o.total - o.failures, o.total, "PASS" if o.passed else "FAIL")
            for o in outcomes
        ]
        click.echo(tabulate(rows, headers=["suite", "passed", "total", "status"]))
        for o in outcomes:
            for detail in o.details[:5]:
                click.echo(f"  {o.name}: {detail}")

    if not all(o.passed for o in outcomes):
        sys.exit(1)


if __name__ == "__main__":
    cli()
