"""
Site, sun position and weather value types.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Optional

import numpy as np
import pandas as pd

from av_feasibility.exceptions import ValidationError

if TYPE_CHECKING:
    from av_feasibility.services.solar_engine import SunPositionSeries

HOURS_PER_YEAR = 8760


@dataclass(frozen=True)
class Site:
    """Geographic location of the array.

    Attributes:
        latitude: Degrees, positive north
        longitude: Degrees, positive east
        utc_offset: Hours of local standard time ahead of UTC
    """

    latitude: float = 30.2864
    longitude: float = 71.9320
    utc_offset: float = 5.0

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise ValidationError(f"must be in [-90, 90], got {self.latitude}", "latitude")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValidationError(
                f"must be in [-180, 180], got {self.longitude}", "longitude"
            )
        if not -14.0 <= self.utc_offset <= 14.0:
            raise ValidationError(
                f"must be in [-14, 14], got {self.utc_offset}", "utc_offset"
            )


KHANEWAL = Site()


@dataclass(frozen=True)
class SunPosition:
    """Apparent sun direction; azimuth clockwise from North."""

    elevation: float
    azimuth: float

    @property
    def above_horizon(self) -> bool:
        return self.elevation > 0.0


@dataclass(frozen=True)
class ClearSkyParams:
    """Constants of the air-mass attenuation clear-sky model."""

    e0: float = 1361.0
    base: float = 0.7
    exponent: float = 0.678
    diffuse_fraction: float = 0.1
    min_elevation: float = 2.0

    def __post_init__(self) -> None:
        if self.e0 <= 0:
            raise ValidationError("must be positive", "e0")
        if not 0.0 < self.base <= 1.0:
            raise ValidationError("must be in (0, 1]", "base")
        if self.exponent <= 0:
            raise ValidationError("must be positive", "exponent")
        if self.diffuse_fraction < 0:
            raise ValidationError("must be non-negative", "diffuse_fraction")
        if not 0.0 < self.min_elevation < 90.0:
            raise ValidationError("must be in (0, 90)", "min_elevation")


@dataclass(frozen=True, eq=False)
class WeatherSeries:
    """One representative year of hourly beam and diffuse irradiance.

    Timestamps are local standard time at the start of each hour.
    ``site`` is optional for files read from disk; the sun positions
    need it.
    """

    timestamps: pd.DatetimeIndex
    dni: np.ndarray
    dhi: np.ndarray
    site: Optional[Site] = field(default=None)

    def __post_init__(self) -> None:
        object.__setattr__(self, "timestamps", pd.DatetimeIndex(self.timestamps))
        object.__setattr__(self, "dni", np.array(self.dni, dtype=np.float64))
        object.__setattr__(self, "dhi", np.array(self.dhi, dtype=np.float64))
        n = len(self.timestamps)
        if n != HOURS_PER_YEAR:
            raise ValidationError(f"expected {HOURS_PER_YEAR} hourly samples, got {n}")
        if self.dni.shape != (n,) or self.dhi.shape != (n,):
            raise ValidationError("dni and dhi must have one value per timestamp")
        if not (np.all(np.isfinite(self.dni)) and np.all(np.isfinite(self.dhi))):
            raise ValidationError("irradiance values must be finite")
        if np.any(self.dni < 0) or np.any(self.dhi < 0):
            raise ValidationError("irradiance values must be non-negative")
        steps = np.diff(self.timestamps.asi8)
        if np.any(steps != pd.Timedelta(hours=1).value):
            raise ValidationError("timestamps must increase in steps of exactly one hour")
        self.dni.setflags(write=False)
        self.dhi.setflags(write=False)

    def __len__(self) -> int:
        return len(self.timestamps)

    def __repr__(self) -> str:
        return (
            f"<WeatherSeries(start={self.timestamps[0]}, n={len(self)}, "
            f"site={self.site})>"
        )

    def with_site(self, site: Site) -> "WeatherSeries":
        return WeatherSeries(self.timestamps, self.dni, self.dhi, site)

    @cached_property
    def sun(self) -> "SunPositionSeries":
        """Hourly sun positions for the attached site."""
        from av_feasibility.services.solar_engine import sun_positions

        if self.site is None:
            raise ValidationError("weather series has no site attached")
        return sun_positions(self.site, self.timestamps)

    @cached_property
    def ghi(self) -> np.ndarray:
        """Global horizontal irradiance, W/m²."""
        sin_el = np.clip(np.sin(np.radians(self.sun.elevation)), 0.0, None)
        return self.dni * sin_el + self.dhi

    @cached_property
    def fingerprint(self) -> str:
        """Stable hash of the data and the site; used in cache keys."""
        digest = hashlib.sha256()
        digest.update(self.timestamps.asi8.tobytes())
        digest.update(np.ascontiguousarray(self.dni, dtype=np.float64).tobytes())
        digest.update(np.ascontiguousarray(self.dhi, dtype=np.float64).tobytes())
        if self.site is not None:
            digest.update(repr(self.site).encode())
        return digest.hexdigest()
