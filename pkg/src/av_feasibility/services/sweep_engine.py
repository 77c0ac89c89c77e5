"""Sweep Engine

Evaluates a metric over a (p/h, M_L) grid. The optical year behind every
p/h column is simulated once; the economics of each M_L cell are closed
form. Columns run concurrently in a thread pool and land in axis order.
"""
from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from av_feasibility.exceptions import (
    AVFeasibilityError,
    SimulationError,
    SweepCellError,
    ValidationError,
)
from av_feasibility.models.array import Orientation
from av_feasibility.models.scenario import Scenario
from av_feasibility.models.sweep import Metric, SweepGrid, SweepSpec
from av_feasibility.services import econ_model
from av_feasibility.services.optics_cache import OpticsCache
from av_feasibility.services.pipeline import ScenarioModel, metric_value

logger = logging.getLogger(__name__)

BOUNDARY_XTOL = 1e-4
GRID_CORNER = "p/h \\ M_L"
BOUNDARY_METRICS = (Metric.RHO, Metric.RHO_EFFECTIVE)
REFERENCE_FIT_FILE = "reference_fit_table.csv"


def _column(
    model: ScenarioModel, ph: float, ml_axis: Sequence[float], metric: Metric
) -> np.ndarray:
    try:
        pair = model.pair(ph)
    except (AVFeasibilityError, ArithmeticError, ValueError) as e:
        raise SweepCellError(ph, None, e) from e

    scenario = model.scenario
    values = np.empty(len(ml_axis))
    for j, m_l in enumerate(ml_axis):
        try:
            result = econ_model.feasibility(
                pair, scenario.economics.with_m_l(m_l), scenario.delta_fit
            )
            value = metric_value(result, metric)
        except (AVFeasibilityError, ArithmeticError, ValueError) as e:
            raise SweepCellError(ph, m_l, e) from e
        if not math.isfinite(value):
            raise SweepCellError(ph, m_l, SimulationError(f"{metric.value} is not finite"))
        values[j] = value
    return values


def run_sweep(
    spec: SweepSpec,
    threads: int = 1,
    model: Optional[ScenarioModel] = None,
    cache: Optional[OpticsCache] = None,
) -> SweepGrid:
    """Tabulate ``spec.metric`` over the grid.

    Args:
        spec: Grid and metric
        threads: Worker threads over p/h columns; the result does not
            depend on it
        model: Pipeline to reuse (shares its optics cache)
        cache: Optics cache for a new pipeline

    Returns:
        SweepGrid with rows in p/h order and columns in M_L order

    Raises:
        SweepCellError: a cell failed; carries (p/h, M_L)
    """
    if threads < 1:
        raise ValidationError(f"must be >= 1, got {threads}", "threads")
    scenario = spec.scenario
    model = model or ScenarioModel(scenario, cache)
    logger.info(
        "sweep %s started: %d x %d cells, metric %s, %d thread(s)",
        scenario.name,
        len(spec.ph_axis),
        len(spec.ml_axis),
        spec.metric.value,
        threads,
    )
    # weather and the GMPV baseline are shared by every column
    model.gmpv_entry

    if threads == 1:
        columns = [_column(model, ph, spec.ml_axis, spec.metric) for ph in spec.ph_axis]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(
                pool.map(
                    lambda ph: _column(model, ph, spec.ml_axis, spec.metric),
                    spec.ph_axis,
                )
            )

    logger.info("sweep %s finished", scenario.name)
    return SweepGrid(
        ph_axis=spec.ph_axis,
        ml_axis=spec.ml_axis,
        metric=spec.metric,
        values=np.vstack(columns),
        scenario_hash=scenario.source_hash,
        kappa=scenario.economics.kappa,
        orientation=scenario.orientation,
        metadata={
            "scenario": scenario.name,
            "delta_fit": repr(scenario.delta_fit),
            "gmpv_tilt": repr(model.gmpv_geometry.tilt),
        },
    )


def feasibility_boundary(
    grid: SweepGrid,
    kappa: Optional[float] = None,
    model: Optional[ScenarioModel] = None,
) -> dict[float, Optional[float]]:
    """Smallest M_L with rho >= kappa, per p/h column.

    The crossing is bracketed on the grid and refined by root finding on
    the exact model when one is given, by linear interpolation otherwise.
    A column that is already feasible at the first M_L reports that value;
    a column that never reaches kappa reports None.
    """
    if grid.metric not in BOUNDARY_METRICS:
        raise ValidationError(
            f"boundary needs a rho grid, got {grid.metric.value}", "metric"
        )
    if kappa is None:
        kappa = grid.kappa
    if not math.isfinite(kappa):
        raise ValidationError("kappa is not known for this grid", "kappa")

    ml = np.asarray(grid.ml_axis)
    boundary: dict[float, Optional[float]] = {}
    for i, ph in enumerate(grid.ph_axis):
        column = grid.values[i]
        above = np.flatnonzero(column >= kappa)
        if above.size == 0:
            boundary[ph] = None
            continue
        j = int(above[0])
        if j == 0:
            boundary[ph] = float(ml[0])
            continue
        lo, hi = float(ml[j - 1]), float(ml[j])
        if model is not None:
            boundary[ph] = float(
                brentq(
                    lambda m: model.metric(ph, m, grid.metric) - kappa,
                    lo,
                    hi,
                    xtol=BOUNDARY_XTOL,
                )
            )
        else:
            v0, v1 = float(column[j - 1]), float(column[j])
            boundary[ph] = lo + (kappa - v0) * (hi - lo) / (v1 - v0)
    return boundary


def min_fit_table(
    scenario: Union[Scenario, ScenarioModel],
    ph_list: Sequence[float],
    ml_list: Sequence[float],
) -> pd.DataFrame:
    """Minimum tariff premium for AV parity, % of the base tariff.

    Rows are M_L values, columns p/h values.
    """
    model = scenario if isinstance(scenario, ScenarioModel) else ScenarioModel(scenario)
    table = pd.DataFrame(
        index=pd.Index([float(m) for m in ml_list], name="M_L"),
        columns=pd.Index([float(p) for p in ph_list], name="p/h"),
        dtype=float,
    )
    for ph in table.columns:
        for m_l in table.index:
            try:
                result = model.evaluate(ph, m_l)
            except (AVFeasibilityError, ArithmeticError, ValueError) as e:
                raise SweepCellError(ph, m_l, e) from e
            table.loc[m_l, ph] = result.delta_fit_th_pct
    return table


def reference_fit_table() -> pd.DataFrame:
    """Reference minimum premiums for the bundled Khanewal farms, %.

    One row per (M_L, p/h); columns ``<orientation>_<hv|lv>``.
    """
    source = resources.files("av_feasibility.data").joinpath(REFERENCE_FIT_FILE)
    with source.open("r", encoding="utf-8") as fh:
        table = pd.read_csv(fh, dtype=float)
    return table.set_index(["m_l", "pitch_over_height"])


def _float_repr(value: float) -> str:
    # numpy >= 2 scalars repr as "np.float64(...)"
    return repr(float(value))


def write_grid(grid: SweepGrid, path: Union[str, Path]) -> None:
    """Write a grid as ``#`` metadata lines followed by a CSV table.

    The first CSV row holds the M_L axis, the first column the p/h axis.
    Floats are written with ``repr`` so that ``read_grid`` is exact.
    """
    lines = [
        f"# metric={grid.metric.value}",
        f"# scenario_hash={grid.scenario_hash}",
        f"# kappa={float(grid.kappa)!r}",
        f"# orientation={grid.orientation.value if grid.orientation else ''}",
    ]
    lines += [f"# {key}={value}" for key, value in sorted(grid.metadata.items())]
    frame = pd.DataFrame(
        grid.values,
        index=pd.Index([float(p) for p in grid.ph_axis], name=GRID_CORNER),
        columns=[repr(float(m)) for m in grid.ml_axis],
    )
    body = frame.to_csv(float_format=_float_repr, na_rep="nan", lineterminator="\n")
    Path(path).write_text("\n".join(lines) + "\n" + body, encoding="utf-8")


def read_grid(path: Union[str, Path]) -> SweepGrid:
    """Read a grid written by ``write_grid``."""
    text = Path(path).read_text(encoding="utf-8")
    header: dict[str, str] = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key.strip()] = value.strip()
        elif line.strip():
            body_lines.append(line)
    if "metric" not in header:
        raise ValidationError("missing '# metric=' header", "grid")

    frame = pd.read_csv(
        io.StringIO("\n".join(body_lines)), index_col=0, float_precision="round_trip"
    )
    orientation = header.pop("orientation", "")
    metric = Metric(header.pop("metric"))
    scenario_hash = header.pop("scenario_hash", "")
    kappa = float(header.pop("kappa", "nan"))
    return SweepGrid(
        ph_axis=tuple(float(v) for v in frame.index),
        ml_axis=tuple(float(c) for c in frame.columns),
        metric=metric,
        values=frame.to_numpy(dtype=float),
        scenario_hash=scenario_hash,
        kappa=kappa,
        orientation=Orientation(orientation) if orientation else None,
        metadata=header,
    )
