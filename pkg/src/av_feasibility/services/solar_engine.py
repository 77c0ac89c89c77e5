"""Solar Engine

Sun position from the fractional-year declination and equation-of-time
formulas, hourly weather file ingestion, and a clear-sky stand-in year
when no measured file is available.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from av_feasibility.exceptions import ValidationError, WeatherFormatError
from av_feasibility.models.solar import (
    HOURS_PER_YEAR,
    ClearSkyParams,
    Site,
    SunPosition,
    WeatherSeries,
)

logger = logging.getLogger(__name__)

WEATHER_COLUMNS = ["timestamp", "dni_w_m2", "dhi_w_m2"]
TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M"
SUPPORTED_YEARS = (1900, 2100)

TimestampLike = Union[pd.Timestamp, datetime, str]


@dataclass(frozen=True, eq=False)
class SunPositionSeries:
    """Sun elevation and azimuth arrays (degrees) aligned with a time index."""

    elevation: np.ndarray
    azimuth: np.ndarray

    def __len__(self) -> int:
        return len(self.elevation)

    def __getitem__(self, i: int) -> SunPosition:
        return SunPosition(float(self.elevation[i]), float(self.azimuth[i]))


def _fractional_year(ts: pd.DatetimeIndex) -> tuple[np.ndarray, np.ndarray]:
    """Return (gamma in radians, local clock hours)."""
    hours = ts.hour.to_numpy() + ts.minute.to_numpy() / 60.0 + ts.second.to_numpy() / 3600.0
    days = np.where(ts.is_leap_year, 366.0, 365.0)
    gamma = 2.0 * np.pi / days * (ts.dayofyear.to_numpy() - 1 + (hours - 12.0) / 24.0)
    return gamma, hours


def equation_of_time(gamma: np.ndarray) -> np.ndarray:
    """Equation of time in minutes."""
    return 229.18 * (
        0.000075
        + 0.001868 * np.cos(gamma)
        - 0.032077 * np.sin(gamma)
        - 0.014615 * np.cos(2 * gamma)
        - 0.040849 * np.sin(2 * gamma)
    )


def declination(gamma: np.ndarray) -> np.ndarray:
    """Solar declination in radians."""
    return (
        0.006918
        - 0.399912 * np.cos(gamma)
        + 0.070257 * np.sin(gamma)
        - 0.006758 * np.cos(2 * gamma)
        + 0.000907 * np.sin(2 * gamma)
        - 0.002697 * np.cos(3 * gamma)
        + 0.00148 * np.sin(3 * gamma)
    )


def _check_years(ts: pd.DatetimeIndex) -> None:
    lo, hi = SUPPORTED_YEARS
    if len(ts) and (ts.year.min() < lo or ts.year.max() > hi):
        raise ValidationError(f"timestamps must lie in years {lo}-{hi}", "timestamp")


def sun_positions(site: Site, timestamps: pd.DatetimeIndex) -> SunPositionSeries:
    """Vectorised sun position for local-standard-time timestamps.

    Args:
        site: Observer location
        timestamps: Naive local standard times

    Returns:
        Elevation (degrees above horizon) and azimuth (degrees clockwise
        from North, in [0, 360)) for every timestamp
    """
    ts = pd.DatetimeIndex(timestamps)
    _check_years(ts)
    gamma, hours = _fractional_year(ts)
    decl = declination(gamma)
    time_offset = equation_of_time(gamma) + 4.0 * site.longitude - 60.0 * site.utc_offset
    true_solar_minutes = hours * 60.0 + time_offset
    hour_angle = np.radians(true_solar_minutes / 4.0 - 180.0)

    lat = np.radians(site.latitude)
    sin_el = np.sin(lat) * np.sin(decl) + np.cos(lat) * np.cos(decl) * np.cos(hour_angle)
    elevation = np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))
    azimuth = np.degrees(
        np.arctan2(
            -np.sin(hour_angle) * np.cos(decl),
            np.sin(decl) * np.cos(lat) - np.cos(decl) * np.sin(lat) * np.cos(hour_angle),
        )
    ) % 360.0
    return SunPositionSeries(elevation=elevation, azimuth=azimuth)


def sun_position(site: Site, timestamp: TimestampLike) -> SunPosition:
    """Sun position at one local standard time."""
    series = sun_positions(site, pd.DatetimeIndex([pd.Timestamp(timestamp)]))
    return series[0]


def solar_noon(site: Site, date: TimestampLike) -> pd.Timestamp:
    """Local standard time of solar noon on ``date``."""
    day = pd.Timestamp(date).normalize()
    gamma, _ = _fractional_year(pd.DatetimeIndex([day + pd.Timedelta(hours=12)]))
    minutes = 720.0 - 4.0 * site.longitude - float(equation_of_time(gamma)[0]) + 60.0 * site.utc_offset
    return day + pd.Timedelta(minutes=minutes)


def noon_elevation(site: Site, date: TimestampLike) -> float:
    """Expected solar-noon elevation 90° − |latitude − declination|."""
    day = pd.Timestamp(date).normalize()
    gamma, _ = _fractional_year(pd.DatetimeIndex([day + pd.Timedelta(hours=12)]))
    decl = float(np.degrees(declination(gamma)[0]))
    return 90.0 - abs(site.latitude - decl)


def hourly_index(year: int) -> pd.DatetimeIndex:
    """The 8760 hour-start timestamps of a non-leap year."""
    if pd.Timestamp(year=year, month=1, day=1).is_leap_year:
        raise ValidationError(f"representative year must not be a leap year, got {year}", "year")
    return pd.date_range(f"{year}-01-01", periods=HOURS_PER_YEAR, freq=pd.Timedelta(hours=1))


def clearsky_weather(
    site: Site, params: Optional[ClearSkyParams] = None, year: int = 2019
) -> WeatherSeries:
    """Synthetic clear-sky year from an air-mass attenuation model.

    DNI = E0 * base ** (AM ** exponent) with AM = 1 / sin(elevation), the
    elevation clamped at ``min_elevation``; DHI is a fixed fraction of the
    beam on the horizontal. Both are zero when the sun is down.
    """
    params = params or ClearSkyParams()
    timestamps = hourly_index(year)
    sun = sun_positions(site, timestamps)
    up = sun.elevation > 0.0
    clamped = np.radians(np.maximum(sun.elevation, params.min_elevation))
    air_mass = 1.0 / np.sin(clamped)
    dni = np.where(up, params.e0 * params.base ** (air_mass**params.exponent), 0.0)
    dhi = np.where(up, params.diffuse_fraction * dni * np.sin(np.radians(sun.elevation)), 0.0)
    logger.debug("clear-sky year %d for %s: %.0f kWh/m² DNI", year, site, dni.sum() / 1000)
    return WeatherSeries(timestamps, dni, dhi, site)


def _parse_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column]
    numeric = pd.to_numeric(raw, errors="coerce")
    bad = numeric.isna() | ~np.isfinite(numeric.to_numpy(dtype=float, na_value=np.nan))
    if bad.any():
        row = int(np.flatnonzero(bad.to_numpy())[0])
        raise WeatherFormatError(f"{column} is not a finite number: {raw.iloc[row]!r}", row + 2)
    # float() parsing keeps repr-exact values
    values = raw.to_numpy(dtype=str).astype(np.float64)
    negative = np.flatnonzero(values < 0)
    if negative.size:
        row = int(negative[0])
        raise WeatherFormatError(f"{column} must be non-negative, got {values[row]}", row + 2)
    return values


def load_weather(path: Union[str, Path], site: Optional[Site] = None) -> WeatherSeries:
    """Read and validate an hourly weather file.

    Args:
        path: CSV with header ``timestamp,dni_w_m2,dhi_w_m2``
        site: Site to attach (needed for sun positions)

    Returns:
        Validated WeatherSeries

    Raises:
        WeatherFormatError: malformed rows, negative irradiance, bad time
            steps or a sample count other than 8760
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as e:
        raise WeatherFormatError(f"malformed row: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise WeatherFormatError("file is empty", 1) from e

    if list(frame.columns) != WEATHER_COLUMNS:
        raise WeatherFormatError(
            f"header must be {','.join(WEATHER_COLUMNS)}, got {','.join(frame.columns)}", 1
        )

    timestamps = pd.to_datetime(frame["timestamp"], format=TIMESTAMP_FORMAT, errors="coerce")
    bad = timestamps.isna().to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise WeatherFormatError(
            f"timestamp must look like YYYY-MM-DDTHH:00, got {frame['timestamp'].iloc[row]!r}",
            row + 2,
        )
    off_hour = (timestamps.dt.minute != 0).to_numpy()
    if off_hour.any():
        row = int(np.flatnonzero(off_hour)[0])
        raise WeatherFormatError("timestamps must fall on the hour", row + 2)

    dni = _parse_column(frame, "dni_w_m2")
    dhi = _parse_column(frame, "dhi_w_m2")

    if len(frame) != HOURS_PER_YEAR:
        raise WeatherFormatError(f"expected {HOURS_PER_YEAR} data rows, got {len(frame)}")

    index = pd.DatetimeIndex(timestamps)
    steps = np.diff(index.asi8)
    wrong = np.flatnonzero(steps != pd.Timedelta(hours=1).value)
    if wrong.size:
        row = int(wrong[0]) + 1
        raise WeatherFormatError("timestamps must increase in one-hour steps", row + 2)

    logger.info("loaded weather file %s (%d samples)", path, len(frame))
    return WeatherSeries(index, dni, dhi, site)


def write_weather(series: WeatherSeries, path: Union[str, Path]) -> Path:
    """Write ``series`` in the weather file format; floats are repr-exact."""
    path = Path(path)
    frame = pd.DataFrame(
        {
            "timestamp": series.timestamps.strftime("%Y-%m-%dT%H:00"),
            "dni_w_m2": series.dni,
            "dhi_w_m2": series.dhi,
        }
    )
    frame.to_csv(path, index=False)
    return path
