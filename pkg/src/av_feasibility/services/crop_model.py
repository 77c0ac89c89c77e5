"""Crop Model

Relative crop yield from useful PAR: hourly PAR is clipped at the crop's
light saturation point and integrated per day, under the array and in the
open field. Seasonal yields scale the open-field profit of the rotation.
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence, Union

import numpy as np

from av_feasibility.exceptions import DegenerateInputError, ValidationError
from av_feasibility.models.array import ArrayGeometry
from av_feasibility.models.crop import CropRotation, CropSeason, SeasonalYield
from av_feasibility.models.solar import WeatherSeries
from av_feasibility.services.array_optics import (
    DEFAULT_MASKING_ROWS,
    DEFAULT_N_POINTS,
    simulate_year,
)

logger = logging.getLogger(__name__)

PAR_FRACTION = 0.45  # PAR share of broadband shortwave
PHOTONS_PER_JOULE = 4.57  # µmol per J of PAR
SECONDS_PER_HOUR = 3600.0

ArrayLike = Union[float, np.ndarray]


def par_from_irradiance(ghi_w_m2: ArrayLike) -> ArrayLike:
    """Photon flux density (µmol m⁻² s⁻¹) from horizontal irradiance (W/m²)."""
    return np.multiply(ghi_w_m2, PAR_FRACTION * PHOTONS_PER_JOULE)


def daily_useful_par(par_series: ArrayLike, saturation: float, axis: int = 0) -> ArrayLike:
    """Hourly PAR clipped at ``saturation`` and summed, in mol m⁻² day⁻¹."""
    if saturation <= 0:
        raise ValidationError(f"must be > 0, got {saturation}", "par_saturation")
    clipped = np.minimum(np.asarray(par_series, dtype=float), saturation)
    return np.sum(clipped, axis=axis) * SECONDS_PER_HOUR / 1e6


def _day_starts(weather: WeatherSeries) -> tuple[np.ndarray, np.ndarray]:
    """Index of the first hour of each day and that day's month."""
    days = weather.timestamps.normalize().asi8
    _, starts = np.unique(days, return_index=True)
    months = weather.timestamps[starts].month.to_numpy()
    return starts, months


def y_par_from_ground(
    ground_total: np.ndarray, weather: WeatherSeries, season: CropSeason
) -> SeasonalYield:
    """Seasonal Y_PAR from an hourly ground irradiance matrix.

    Args:
        ground_total: Horizontal irradiance, shape (hours, points), W/m²
        weather: Weather year the matrix was computed from
        season: Crop season

    Returns:
        Ratio of mean daily useful PAR under the array (over days and
        points) to the mean open-field value over the same days
    """
    starts, months = _day_starts(weather)
    in_season = np.isin(months, season.months)
    if not in_season.any():
        raise ValidationError(f"season {season.name!r} has no days in the weather year", "months")

    sat = season.par_saturation
    av_hourly = np.minimum(par_from_irradiance(ground_total), sat) * SECONDS_PER_HOUR / 1e6
    open_hourly = np.minimum(par_from_irradiance(weather.ghi), sat) * SECONDS_PER_HOUR / 1e6
    av_daily = np.add.reduceat(av_hourly, starts, axis=0)[in_season]
    open_daily = np.add.reduceat(open_hourly, starts)[in_season]

    open_mean = float(np.mean(open_daily))
    if open_mean <= 0.0:
        raise DegenerateInputError(
            f"open-field useful PAR is zero over season {season.name!r}"
        )
    y_par = min(float(np.mean(av_daily)) / open_mean, 1.0)
    return SeasonalYield(season=season.name, y_par=y_par)


def seasonal_y_par(
    geom: ArrayGeometry,
    weather: WeatherSeries,
    season: CropSeason,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> SeasonalYield:
    """Relative useful PAR of one crop season under ``geom``."""
    optics = simulate_year(geom, weather, n_points, masking_rows)
    return y_par_from_ground(optics.ground_total, weather, season)


def rotation_y_par(
    geom: ArrayGeometry,
    weather: WeatherSeries,
    rotation: CropRotation,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
    ground_total: Optional[np.ndarray] = None,
) -> list[SeasonalYield]:
    """Y_PAR of every season from a single ground simulation."""
    if ground_total is None:
        ground_total = simulate_year(geom, weather, n_points, masking_rows).ground_total
    yields = [y_par_from_ground(ground_total, weather, season) for season in rotation]
    logger.debug(
        "Y_PAR %r: %s", geom, ", ".join(f"{y.season}={y.y_par:.3f}" for y in yields)
    )
    return yields


def rotation_profit(
    rotation: CropRotation, yields: Sequence[Union[SeasonalYield, float]]
) -> float:
    """Yearly crop profit under the array, USD/ha/yr."""
    if len(yields) != len(rotation):
        raise ValidationError(
            f"expected {len(rotation)} seasonal yields, got {len(yields)}", "yields"
        )
    total = 0.0
    for season, y in zip(rotation, yields):
        value = y.y_par if isinstance(y, SeasonalYield) else float(y)
        total += value * season.open_profit
    return total
