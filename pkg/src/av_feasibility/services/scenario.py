"""Scenario Files

Parses TOML scenario files into validated ``Scenario`` objects. Every
rejection names the offending key as a dotted path (``av.pitch_over_height``,
``crops[1].start_month``).

Example:
    name = "HV Khanewal"

    [site]
    latitude = 30.2864
    longitude = 71.9320
    utc_offset = 5

    [weather]
    clearsky = true

    [av]
    orientation = "EW_vertical"
    pitch_over_height = 4

    [[crops]]
    name = "wheat"
    start_month = 10
    end_month = 3
    open_profit = 228.43
"""
from __future__ import annotations

import hashlib
import logging
import sys
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar, Union

from av_feasibility.exceptions import ScenarioError, ValidationError
from av_feasibility.models.array import ArrayGeometry, Orientation
from av_feasibility.models.crop import DEFAULT_PAR_SATURATION, CropRotation, CropSeason
from av_feasibility.models.economics import EconParams
from av_feasibility.models.energy import ModuleParams
from av_feasibility.models.scenario import (
    OPTIMAL,
    GmpvSpec,
    OpticsSettings,
    Scenario,
    SweepSettings,
    WeatherSource,
)
from av_feasibility.models.solar import ClearSkyParams, Site
from av_feasibility.models.sweep import DEFAULT_ML_AXIS, DEFAULT_PH_AXIS, Metric, axis

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

T = TypeVar("T")

BUNDLED_SCENARIOS = {
    "hv": "hv_khanewal.toml",
    "lv": "lv_khanewal.toml",
}

SECTIONS = {
    "name",
    "site",
    "weather",
    "module",
    "gmpv",
    "av",
    "economics",
    "crops",
    "sweep",
    "optics",
}
SITE_KEYS = {"latitude", "longitude", "utc_offset"}
CLEARSKY_KEYS = {"e0", "base", "exponent", "diffuse_fraction", "min_elevation"}
WEATHER_KEYS = {"file", "clearsky", "year"} | CLEARSKY_KEYS
MODULE_KEYS = {"efficiency", "bifaciality", "performance_ratio", "tilted_bifaciality"}
GEOMETRY_KEYS = {"tilt", "pitch_over_height", "clearance_over_height", "albedo", "azimuth"}
AV_KEYS = GEOMETRY_KEYS | {"orientation"}
ECON_KEYS = {
    "c_m_pv",
    "m_l_pv",
    "kappa",
    "depreciation",
    "discount",
    "lifetime_years",
    "fit_pv",
    "delta_fit",
}
CROP_KEYS = {"name", "start_month", "end_month", "open_profit", "par_saturation"}
SWEEP_KEYS = {"ph_start", "ph_stop", "ph_step", "ml_start", "ml_stop", "ml_step", "metrics"}
OPTICS_KEYS = {"n_points", "masking_rows"}


def _table(doc: dict, key: str, allowed: set[str], required: bool = False) -> dict:
    value = doc.get(key)
    if value is None:
        if required:
            raise ScenarioError(key, "missing section")
        return {}
    if not isinstance(value, dict):
        raise ScenarioError(key, "must be a table")
    _reject_unknown(value, allowed, key)
    return value


def _reject_unknown(table: dict, allowed: set[str], prefix: str) -> None:
    for name in sorted(table):
        if name not in allowed:
            raise ScenarioError(f"{prefix}.{name}" if prefix else name, "unknown key")


def _number(table: dict, key: str, prefix: str, default: Any = None) -> Any:
    value = table.get(key, default)
    if value is None:
        raise ScenarioError(f"{prefix}.{key}", "missing key")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{prefix}.{key}", f"must be a number, got {value!r}")
    return float(value)


def _integer(table: dict, key: str, prefix: str, default: Optional[int] = None) -> int:
    value = table.get(key, default)
    if value is None:
        raise ScenarioError(f"{prefix}.{key}", "missing key")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{prefix}.{key}", f"must be an integer, got {value!r}")
    return value


def _build(prefix: str, factory: Callable[[], T]) -> T:
    """Run a model constructor, relabelling its errors with the section."""
    try:
        return factory()
    except ScenarioError:
        raise
    except ValidationError as e:
        key = f"{prefix}.{e.field}" if e.field else prefix
        raise ScenarioError(key, e.reason) from e


def _site(doc: dict) -> Site:
    table = _table(doc, "site", SITE_KEYS)
    defaults = Site()
    return _build(
        "site",
        lambda: Site(
            latitude=_number(table, "latitude", "site", defaults.latitude),
            longitude=_number(table, "longitude", "site", defaults.longitude),
            utc_offset=_number(table, "utc_offset", "site", defaults.utc_offset),
        ),
    )


def _weather(doc: dict, base_dir: Optional[Path]) -> WeatherSource:
    table = _table(doc, "weather", WEATHER_KEYS, required=True)
    has_file = "file" in table
    clearsky = table.get("clearsky", False)
    if not isinstance(clearsky, bool):
        raise ScenarioError("weather.clearsky", f"must be true or false, got {clearsky!r}")
    if has_file and clearsky:
        raise ScenarioError("weather", "'file' and 'clearsky' are mutually exclusive")
    if not has_file and not clearsky:
        raise ScenarioError("weather", "one of 'file' or 'clearsky = true' is required")
    year = _integer(table, "year", "weather", 2019)

    if has_file:
        extra = sorted(CLEARSKY_KEYS & set(table))
        if extra:
            raise ScenarioError(f"weather.{extra[0]}", "only valid with 'clearsky = true'")
        raw = table["file"]
        if not isinstance(raw, str) or not raw:
            raise ScenarioError("weather.file", "must be a non-empty path string")
        path = Path(raw).expanduser()
        if not path.is_absolute() and base_dir is not None:
            path = base_dir / path
        return _build("weather", lambda: WeatherSource(file=path, year=year))

    defaults = ClearSkyParams()
    values = {
        key: _number(table, key, "weather", getattr(defaults, key)) for key in CLEARSKY_KEYS
    }
    params = _build("weather", lambda: ClearSkyParams(**values))
    return _build("weather", lambda: WeatherSource(clearsky=params, year=year))


def _module(doc: dict) -> ModuleParams:
    table = _table(doc, "module", MODULE_KEYS)
    defaults = ModuleParams()
    values = {
        key: _number(table, key, "module", getattr(defaults, key)) for key in MODULE_KEYS
    }
    return _build("module", lambda: ModuleParams(**values))


def _optional_number(table: dict, key: str, prefix: str) -> Optional[float]:
    return _number(table, key, prefix) if key in table else None


def _gmpv(doc: dict) -> GmpvSpec:
    table = _table(doc, "gmpv", GEOMETRY_KEYS)
    defaults = GmpvSpec()
    tilt = table.get("tilt", OPTIMAL)
    if tilt != OPTIMAL:
        tilt = _number(table, "tilt", "gmpv")
    return _build(
        "gmpv",
        lambda: GmpvSpec(
            tilt=tilt,
            pitch_over_height=_number(
                table, "pitch_over_height", "gmpv", defaults.pitch_over_height
            ),
            clearance_over_height=_number(
                table, "clearance_over_height", "gmpv", defaults.clearance_over_height
            ),
            albedo=_number(table, "albedo", "gmpv", defaults.albedo),
            azimuth=_optional_number(table, "azimuth", "gmpv"),
        ),
    )


def _av(doc: dict) -> ArrayGeometry:
    table = _table(doc, "av", AV_KEYS, required=True)
    if "orientation" not in table:
        raise ScenarioError("av.orientation", "missing key")
    try:
        orientation = Orientation(table["orientation"])
    except ValueError:
        choices = ", ".join(o.value for o in Orientation)
        raise ScenarioError(
            "av.orientation", f"must be one of {choices}, got {table['orientation']!r}"
        ) from None
    default_tilt = 90.0 if orientation is Orientation.EW_VERTICAL else 30.0
    return _build(
        "av",
        lambda: ArrayGeometry(
            orientation=orientation,
            tilt=_number(table, "tilt", "av", default_tilt),
            pitch_over_height=_number(table, "pitch_over_height", "av", 2.0),
            clearance_over_height=_number(
                table, "clearance_over_height", "av", orientation.default_clearance
            ),
            albedo=_number(table, "albedo", "av", 0.25),
            azimuth=_optional_number(table, "azimuth", "av"),
        ),
    )


def _economics(doc: dict, orientation: Orientation) -> tuple[EconParams, float]:
    table = _table(doc, "economics", ECON_KEYS)
    defaults = EconParams()
    delta_fit = _number(table, "delta_fit", "economics", 0.0)
    if delta_fit < 0:
        raise ScenarioError("economics.delta_fit", f"must be >= 0, got {delta_fit}")
    econ = _build(
        "economics",
        lambda: EconParams(
            c_m_pv=_number(table, "c_m_pv", "economics", defaults.c_m_pv),
            m_l_pv=_number(table, "m_l_pv", "economics", defaults.m_l_pv),
            kappa=_number(table, "kappa", "economics", orientation.default_kappa),
            d=_number(table, "depreciation", "economics", defaults.d),
            r=_number(table, "discount", "economics", defaults.r),
            lifetime_years=_integer(
                table, "lifetime_years", "economics", defaults.lifetime_years
            ),
            fit_pv=_number(table, "fit_pv", "economics", defaults.fit_pv),
        ),
    )
    return econ, delta_fit


def _crop(table: Any, index: int) -> CropSeason:
    prefix = f"crops[{index}]"
    if not isinstance(table, dict):
        raise ScenarioError(prefix, "must be a table")
    _reject_unknown(table, CROP_KEYS, prefix)
    name = table.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"{prefix}.name", "missing or empty crop name")
    saturation = table.get("par_saturation", DEFAULT_PAR_SATURATION.get(name.lower()))
    if saturation is None:
        raise ScenarioError(
            f"{prefix}.par_saturation", f"required for crop {name!r} (no default known)"
        )
    return _build(
        prefix,
        lambda: CropSeason(
            name=name,
            start_month=_integer(table, "start_month", prefix),
            end_month=_integer(table, "end_month", prefix),
            open_profit=_number(table, "open_profit", prefix),
            par_saturation=_number({"par_saturation": saturation}, "par_saturation", prefix),
        ),
    )


def _rotation(doc: dict) -> CropRotation:
    crops = doc.get("crops")
    if crops is None:
        raise ScenarioError("crops", "at least one [[crops]] entry is required")
    if not isinstance(crops, list) or not crops:
        raise ScenarioError("crops", "must be a non-empty array of tables")
    seasons = [_crop(table, i) for i, table in enumerate(crops)]
    return _build("crops", lambda: CropRotation(tuple(seasons)))


def _sweep(doc: dict) -> SweepSettings:
    table = _table(doc, "sweep", SWEEP_KEYS)
    ph_axis = DEFAULT_PH_AXIS
    ml_axis = DEFAULT_ML_AXIS
    if {"ph_start", "ph_stop", "ph_step"} & set(table):
        ph_axis = _build(
            "sweep",
            lambda: axis(
                _number(table, "ph_start", "sweep", 2.0),
                _number(table, "ph_stop", "sweep", 6.0),
                _number(table, "ph_step", "sweep", 0.25),
            ),
        )
        if ph_axis[0] < 1.0:
            raise ScenarioError("sweep.ph_start", f"must be >= 1, got {ph_axis[0]}")
    if {"ml_start", "ml_stop", "ml_step"} & set(table):
        ml_axis = _build(
            "sweep",
            lambda: axis(
                _number(table, "ml_start", "sweep", 5.0),
                _number(table, "ml_stop", "sweep", 50.0),
                _number(table, "ml_step", "sweep", 2.5),
            ),
        )
        if ml_axis[0] <= 0.0:
            raise ScenarioError("sweep.ml_start", f"must be > 0, got {ml_axis[0]}")

    raw_metrics = table.get("metrics", [Metric.RHO.value])
    if isinstance(raw_metrics, str):
        raw_metrics = [raw_metrics]
    if not isinstance(raw_metrics, list) or not raw_metrics:
        raise ScenarioError("sweep.metrics", "must be a non-empty list of metric names")
    metrics = []
    for raw in raw_metrics:
        try:
            metrics.append(Metric(raw))
        except ValueError:
            choices = ", ".join(m.value for m in Metric)
            raise ScenarioError(
                "sweep.metrics", f"unknown metric {raw!r}; choose from {choices}"
            ) from None
    return SweepSettings(ph_axis=ph_axis, ml_axis=ml_axis, metrics=tuple(metrics))


def _optics(doc: dict) -> OpticsSettings:
    table = _table(doc, "optics", OPTICS_KEYS)
    defaults = OpticsSettings()
    return _build(
        "optics",
        lambda: OpticsSettings(
            n_points=_integer(table, "n_points", "optics", defaults.n_points),
            masking_rows=_integer(table, "masking_rows", "optics", defaults.masking_rows),
        ),
    )


def parse_scenario_bytes(
    data: bytes, origin: str = "<scenario>", base_dir: Optional[Path] = None
) -> Scenario:
    """Parse scenario TOML content.

    Args:
        data: Raw file content
        origin: Name used for the scenario when it has none
        base_dir: Directory that relative weather paths are resolved against

    Returns:
        Validated Scenario

    Raises:
        ScenarioError: syntax errors and missing, unknown or invalid keys
    """
    try:
        doc = tomllib.loads(data.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ScenarioError(origin, f"not UTF-8 text: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(origin, f"invalid TOML: {e}") from e

    _reject_unknown(doc, SECTIONS, "")
    name = doc.get("name", origin)
    if not isinstance(name, str):
        raise ScenarioError("name", f"must be a string, got {name!r}")

    av = _av(doc)
    economics, delta_fit = _economics(doc, av.orientation)
    scenario = Scenario(
        name=name,
        site=_site(doc),
        weather=_weather(doc, base_dir),
        module=_module(doc),
        gmpv=_gmpv(doc),
        av=av,
        economics=economics,
        rotation=_rotation(doc),
        delta_fit=delta_fit,
        sweep=_sweep(doc),
        optics=_optics(doc),
        source_hash=hashlib.sha256(data).hexdigest(),
    )
    logger.debug("parsed scenario %r", scenario)
    return scenario


def parse_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a scenario file.

    Raises:
        OSError: the file cannot be read
        ScenarioError: invalid content
    """
    path = Path(path)
    data = path.read_bytes()
    return parse_scenario_bytes(data, origin=path.stem, base_dir=path.parent.resolve())


def bundled_scenario_names() -> list[str]:
    return sorted(BUNDLED_SCENARIOS)


def load_scenario(reference: Union[str, Path]) -> Scenario:
    """Parse a scenario file, or a bundled scenario by short name (``hv``, ``lv``)."""
    path = Path(reference)
    if not path.exists() and str(reference).lower() in BUNDLED_SCENARIOS:
        filename = BUNDLED_SCENARIOS[str(reference).lower()]
        data = resources.files("av_feasibility.data").joinpath(filename).read_bytes()
        return parse_scenario_bytes(data, origin=Path(filename).stem)
    return parse_scenario(path)
