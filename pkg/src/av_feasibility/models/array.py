"""Array Geometry Models

Value types for the two-dimensional cross-section of an infinite array of
module rows: geometry, the projected sun, and the resulting irradiance on
the module faces and on the ground.

Lengths are in units of the module slant height ``h``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from av_feasibility.exceptions import ValidationError


class Orientation(str, Enum):
    """Row layouts supported by the optical model."""
    NS_TILTED = "NS_tilted"
    EW_VERTICAL = "EW_vertical"

    @property
    def default_front_azimuth(self) -> float:
        # NS rows face the equator (south by default), EW faces face east
        return 180.0 if self is Orientation.NS_TILTED else 90.0

    @property
    def default_clearance(self) -> float:
        return 2.5 if self is Orientation.NS_TILTED else 0.5

    @property
    def default_kappa(self) -> float:
        return 1.38 if self is Orientation.NS_TILTED else 1.2


class Face(str, Enum):
    FRONT = "front"
    BACK = "back"


@dataclass(frozen=True)
class ArrayGeometry:
    """Cross-section of one row of an infinite, periodic array.

    The lower module edge sits at ``(0, clearance)``; the upper edge at
    ``(-cos(tilt), clearance + sin(tilt))``. The front face normal points
    towards +x, which is the horizontal direction of ``front_azimuth``.

    Attributes:
        orientation: Row layout
        tilt: Degrees from horizontal, in (0, 90]
        pitch_over_height: Row pitch p/h, at least 1
        clearance_over_height: Height of the lower edge above ground
        albedo: Ground reflectance
        azimuth: Optional front-face azimuth override (degrees from North)
    """

    orientation: Orientation = Orientation.NS_TILTED
    tilt: float = 30.0
    pitch_over_height: float = 2.0
    clearance_over_height: float = 0.5
    albedo: float = 0.25
    azimuth: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        if not 0.0 < self.tilt <= 90.0:
            raise ValidationError(f"must be in (0, 90], got {self.tilt}", "tilt")
        if not self.pitch_over_height >= 1.0:
            raise ValidationError(
                f"must be >= 1, got {self.pitch_over_height}", "pitch_over_height"
            )
        if not self.clearance_over_height >= 0.0:
            raise ValidationError(
                f"must be >= 0, got {self.clearance_over_height}",
                "clearance_over_height",
            )
        if not 0.0 <= self.albedo <= 1.0:
            raise ValidationError(f"must be in [0, 1], got {self.albedo}", "albedo")
        if self.azimuth is not None and not 0.0 <= self.azimuth < 360.0:
            raise ValidationError(f"must be in [0, 360), got {self.azimuth}", "azimuth")

    @property
    def pitch(self) -> float:
        return self.pitch_over_height

    @property
    def front_azimuth(self) -> float:
        if self.azimuth is not None:
            return self.azimuth
        return self.orientation.default_front_azimuth

    @property
    def lower_edge(self) -> tuple[float, float]:
        return (0.0, self.clearance_over_height)

    @property
    def upper_edge(self) -> tuple[float, float]:
        t = math.radians(self.tilt)
        return (-math.cos(t), self.clearance_over_height + math.sin(t))

    @property
    def ground_coverage_ratio(self) -> float:
        """Horizontal projection of a module over the pitch."""
        return math.cos(math.radians(self.tilt)) / self.pitch_over_height

    def with_pitch(self, pitch_over_height: float) -> "ArrayGeometry":
        return replace(self, pitch_over_height=pitch_over_height)

    def with_tilt(self, tilt: float) -> "ArrayGeometry":
        return replace(self, tilt=tilt)

    def as_dict(self) -> dict:
        return {
            "orientation": self.orientation.value,
            "tilt": self.tilt,
            "pitch_over_height": self.pitch_over_height,
            "clearance_over_height": self.clearance_over_height,
            "albedo": self.albedo,
            "azimuth": self.azimuth,
        }

    def __repr__(self) -> str:
        return (
            f"<ArrayGeometry({self.orientation.value}, tilt={self.tilt:g}, "
            f"p/h={self.pitch_over_height:g}, clearance={self.clearance_over_height:g})>"
        )


@dataclass(frozen=True)
class ProjectedSun:
    """Sun direction seen in the cross-section plane.

    ``sx`` and ``sz`` are the in-plane components of the unit sun vector
    (+x towards the front azimuth). ``elevation`` is the projected
    elevation in degrees measured from the horizon on the side the sun is
    on; ``in_front`` tells which side that is.
    """

    sx: float
    sz: float
    elevation: float
    in_front: bool
    below_horizon: bool
    edge_on: bool

    @property
    def angle(self) -> float:
        """Projected direction in degrees from +x, in [0, 180] above the horizon."""
        return math.degrees(math.atan2(self.sz, self.sx))


@dataclass(frozen=True)
class ModuleIrradiance:
    """Plane-of-array irradiance averaged over each face, W/m²."""

    front: float
    back: float


@dataclass(frozen=True, eq=False)
class GroundLightProfile:
    """Horizontal irradiance at ground sample points across one pitch.

    Attributes:
        x: Sample positions in [0, p), in units of h
        direct: Beam component, W/m²
        diffuse: Sky diffuse component, W/m²
    """

    x: np.ndarray
    direct: np.ndarray
    diffuse: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.direct + self.diffuse

    @property
    def mean(self) -> float:
        return float(np.mean(self.total))

    def __len__(self) -> int:
        return len(self.x)
