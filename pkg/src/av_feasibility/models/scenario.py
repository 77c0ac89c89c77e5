"""Scenario Model

A scenario bundles everything one feasibility run needs: site, weather
source, the GMPV baseline and AV arrays, module parameters, the crop
rotation, economics and the optional sweep ranges.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from av_feasibility.exceptions import ValidationError
from av_feasibility.models.array import ArrayGeometry, Orientation
from av_feasibility.models.crop import CropRotation
from av_feasibility.models.economics import EconParams
from av_feasibility.models.energy import ModuleParams
from av_feasibility.models.solar import ClearSkyParams, Site
from av_feasibility.models.sweep import DEFAULT_ML_AXIS, DEFAULT_PH_AXIS, Metric

OPTIMAL = "optimal"


@dataclass(frozen=True)
class WeatherSource:
    """Exactly one of a weather file or the clear-sky model."""

    file: Optional[Path] = None
    clearsky: Optional[ClearSkyParams] = None
    year: int = 2019

    def __post_init__(self) -> None:
        if (self.file is None) == (self.clearsky is None):
            raise ValidationError("exactly one of 'file' or 'clearsky' is required")

    def describe(self) -> str:
        return str(self.file) if self.file is not None else "clearsky"


@dataclass(frozen=True)
class GmpvSpec:
    """Ground-mounted baseline; tilt may be resolved by optimisation."""

    tilt: Union[float, str] = OPTIMAL
    pitch_over_height: float = 2.0
    clearance_over_height: float = 0.5
    albedo: float = 0.25
    azimuth: Optional[float] = None

    def __post_init__(self) -> None:
        if isinstance(self.tilt, str) and self.tilt != OPTIMAL:
            raise ValidationError(f"must be a number or {OPTIMAL!r}", "tilt")

    def geometry(self, tilt: Optional[float] = None) -> ArrayGeometry:
        if tilt is None:
            if isinstance(self.tilt, str):
                raise ValidationError("optimal tilt has not been resolved", "tilt")
            tilt = self.tilt
        return ArrayGeometry(
            orientation=Orientation.NS_TILTED,
            tilt=tilt,
            pitch_over_height=self.pitch_over_height,
            clearance_over_height=self.clearance_over_height,
            albedo=self.albedo,
            azimuth=self.azimuth,
        )


@dataclass(frozen=True)
class OpticsSettings:
    """Discretisation controls of the optical model."""

    n_points: int = 100
    masking_rows: int = 3

    def __post_init__(self) -> None:
        if not (isinstance(self.n_points, int) and self.n_points >= 16):
            raise ValidationError(f"must be an integer >= 16, got {self.n_points!r}", "n_points")
        if not (isinstance(self.masking_rows, int) and self.masking_rows >= 1):
            raise ValidationError(
                f"must be an integer >= 1, got {self.masking_rows!r}", "masking_rows"
            )


@dataclass(frozen=True)
class SweepSettings:
    ph_axis: tuple[float, ...] = DEFAULT_PH_AXIS
    ml_axis: tuple[float, ...] = DEFAULT_ML_AXIS
    metrics: tuple[Metric, ...] = (Metric.RHO,)


@dataclass(frozen=True)
class Scenario:
    """Validated scenario; see ``parse_scenario`` for the file format."""

    name: str
    site: Site
    weather: WeatherSource
    module: ModuleParams
    gmpv: GmpvSpec
    av: ArrayGeometry
    economics: EconParams
    rotation: CropRotation
    delta_fit: float = 0.0
    sweep: SweepSettings = field(default_factory=SweepSettings)
    optics: OpticsSettings = field(default_factory=OpticsSettings)
    source_hash: str = ""

    @property
    def orientation(self) -> Orientation:
        return self.av.orientation

    def with_orientation(self, orientation: Orientation) -> "Scenario":
        """Switch the AV layout; tilt, clearance and κ fall back to its defaults."""
        orientation = Orientation(orientation)
        if orientation is self.av.orientation:
            return self
        tilt = 90.0 if orientation is Orientation.EW_VERTICAL else 30.0
        av = replace(
            self.av,
            orientation=orientation,
            tilt=tilt,
            clearance_over_height=orientation.default_clearance,
            azimuth=None,
        )
        economics = self.economics.with_kappa(orientation.default_kappa)
        return replace(
            self,
            av=av,
            economics=economics,
            source_hash=f"{self.source_hash}:{orientation.value}",
        )

    def with_delta_fit(self, delta_fit: float) -> "Scenario":
        if delta_fit < 0:
            raise ValidationError(f"must be >= 0, got {delta_fit}", "delta_fit")
        return replace(
            self,
            delta_fit=delta_fit,
            source_hash=f"{self.source_hash}:dfit={delta_fit!r}",
        )

    def __repr__(self) -> str:
        return f"<Scenario({self.name!r}, {self.av!r}, weather={self.weather.describe()})>"
