"""Array Optics

Two-dimensional optical model of an infinite array of module rows seen in
the vertical plane perpendicular to the row axis.

Coordinates: x is horizontal and points towards the front-face azimuth,
z is up, lengths are in module slant heights. Row ``k`` has its lower
edge at ``(k*p, c)`` and its upper edge at ``(k*p - cos t, c + sin t)``.

Directions seen from the ground are angles in (0, pi) measured from +x.
For a horizontal strip the view factor of the angular band [a, b] is
``(cos a - cos b) / 2``; for a face with normal angle ``n`` it is
``(sin(b - n) - sin(a - n)) / 2``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from av_feasibility.exceptions import ValidationError
from av_feasibility.models.array import (
    ArrayGeometry,
    Face,
    GroundLightProfile,
    ModuleIrradiance,
    Orientation,
    ProjectedSun,
)
from av_feasibility.models.solar import SunPosition, WeatherSeries

logger = logging.getLogger(__name__)

DEFAULT_N_POINTS = 100
DEFAULT_MASKING_ROWS = 3
# Rows beyond the masking radius that are still resolved one by one before
# the horizon closure
FAR_ROWS = 50
FACE_SAMPLES = 64
GROUND_PERIODS = 20

Interval = tuple[float, float]


# -- sun projection and beam -------------------------------------------------


def _in_plane(
    elevation: np.ndarray, azimuth: np.ndarray, front_azimuth: float
) -> tuple[np.ndarray, np.ndarray]:
    el = np.radians(elevation)
    rel = np.radians(np.asarray(azimuth) - front_azimuth)
    return np.cos(el) * np.cos(rel), np.sin(el)


def project_sun(
    sun: SunPosition,
    orientation: Union[Orientation, str],
    front_azimuth: Optional[float] = None,
) -> ProjectedSun:
    """Project the sun into the cross-section plane of the array.

    The projected elevation satisfies tan(e_p) = tan(e) / |cos(az - az_front)|.

    Args:
        sun: Sun position
        orientation: Row layout; fixes the default front azimuth
        front_azimuth: Override of the front-face azimuth

    Returns:
        ProjectedSun with the in-plane components and flags
    """
    orientation = Orientation(orientation)
    if front_azimuth is None:
        front_azimuth = orientation.default_front_azimuth
    sx, sz = _in_plane(np.asarray(sun.elevation), np.asarray(sun.azimuth), front_azimuth)
    sx, sz = float(sx), float(sz)
    below = sun.elevation <= 0.0
    edge_on = abs(sx) < 1e-12
    elevation = 0.0 if below else math.degrees(math.atan2(sz, abs(sx)))
    return ProjectedSun(
        sx=sx,
        sz=sz,
        elevation=elevation,
        in_front=sx >= 0.0,
        below_horizon=below,
        edge_on=edge_on,
    )


def _normal(geom: ArrayGeometry) -> tuple[float, float]:
    t = math.radians(geom.tilt)
    return math.sin(t), math.cos(t)


def _lit_fraction(geom: ArrayGeometry, sx: np.ndarray, sz: np.ndarray) -> np.ndarray:
    """Unshaded share of whichever face the beam hits (0 when grazing or down)."""
    nx, nz = _normal(geom)
    cos_front = sx * nx + sz * nz
    denom = np.abs(cos_front)
    with np.errstate(divide="ignore", invalid="ignore"):
        lit = np.where(denom > 1e-12, geom.pitch * sz / denom, 0.0)
    return np.where(sz > 0.0, np.clip(lit, 0.0, 1.0), 0.0)


def beam_module_shading(geom: ArrayGeometry, sun: ProjectedSun) -> float:
    """Fraction of the sunlit module face outside the neighbouring row's shadow.

    The shadow always covers the side of the lower edge.
    """
    if sun.below_horizon:
        return 0.0
    return float(_lit_fraction(geom, np.asarray(sun.sx), np.asarray(sun.sz)))


# -- view factors of the module faces ----------------------------------------


def _dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _face_openings(geom: ArrayGeometry, face: Face) -> tuple[float, float]:
    """Crossed-strings view factors of a face to the sky and to the ground."""
    a = geom.lower_edge
    b = geom.upper_edge
    shift = geom.pitch if Face(face) is Face.FRONT else -geom.pitch
    b_next = (b[0] + shift, b[1])
    a_next = (a[0] + shift, a[1])
    p = geom.pitch
    sky = (1.0 + p - _dist(a, b_next)) / 2.0
    ground = (1.0 + p - _dist(b, a_next)) / 2.0
    return min(max(sky, 0.0), 1.0), min(max(ground, 0.0), 1.0)


def sky_view_factor_segment(geom: ArrayGeometry, face: Union[Face, str]) -> float:
    """Face-averaged view factor from one module face to the sky.

    The neighbouring row on the face's side and the parallel line through
    the upper edges bound the visible sky; crossed strings give the
    exact two-dimensional value.
    """
    return _face_openings(geom, Face(face))[0]


def face_ground_total(geom: ArrayGeometry, face: Union[Face, str]) -> float:
    """View factor from a module face to the whole ground."""
    return _face_openings(geom, Face(face))[1]


def face_row_view_factor(geom: ArrayGeometry, face: Union[Face, str]) -> float:
    """View factor from a module face to the facing neighbour row."""
    sky, ground = _face_openings(geom, Face(face))
    return max(0.0, 1.0 - sky - ground)


@lru_cache(maxsize=512)
def face_ground_view_factors(
    geom: ArrayGeometry, face: Face, n_points: int = DEFAULT_N_POINTS
) -> np.ndarray:
    """View factors from a module face to the ground strips of one period.

    Strip ``j`` is centred at ``(j + 0.5) * p / n``; contributions of all
    periods are folded onto it. Ground further than ``GROUND_PERIODS``
    pitches away is shared out evenly. The result sums to the crossed
    strings face-to-ground value.
    """
    face = Face(face)
    p = geom.pitch
    c = geom.clearance_over_height
    t = math.radians(geom.tilt)
    u = (np.arange(FACE_SAMPLES) + 0.5) / FACE_SAMPLES
    px = -u * math.cos(t)
    pz = c + u * math.sin(t)

    if face is Face.FRONT:
        theta_n = math.pi / 2 - t
        q_lo, q_hi = 0.0, p
    else:
        theta_n = -(math.pi / 2 + t)
        q_lo, q_hi = -p, 0.0

    scale = pz / (pz - c)
    g_lo = px + (q_lo - px) * scale
    g_hi = px + (q_hi - px) * scale

    def cumulative(x: np.ndarray, ox: np.ndarray, oz: np.ndarray) -> np.ndarray:
        phi = np.arctan2(-oz, x - ox)
        return 0.5 * np.sin(phi - theta_n)

    total = cumulative(g_hi, px, pz) - cumulative(g_lo, px, pz)

    edges = np.arange(n_points + 1) * p / n_points
    periods = np.arange(-GROUND_PERIODS, GROUND_PERIODS + 1) * p
    left = (periods[:, None] + edges[None, :-1])[None, :, :]
    right = (periods[:, None] + edges[None, 1:])[None, :, :]
    lo = np.clip(left, g_lo[:, None, None], g_hi[:, None, None])
    hi = np.clip(right, g_lo[:, None, None], g_hi[:, None, None])
    ox = px[:, None, None]
    oz = pz[:, None, None]
    per_strip = cumulative(hi, ox, oz) - cumulative(lo, ox, oz)
    explicit = per_strip.sum(axis=1)  # (samples, n)
    remainder = np.clip(total - explicit.sum(axis=1), 0.0, None)
    per_sample = explicit + remainder[:, None] / n_points
    factors = per_sample.mean(axis=0)

    target = face_ground_total(geom, face)
    numeric = float(factors.sum())
    if numeric > 0:
        if abs(numeric - target) > 2e-3:
            logger.debug(
                "face-ground quadrature %.5f vs crossed strings %.5f for %r",
                numeric,
                target,
                geom,
            )
        factors = factors * (target / numeric)
    factors.setflags(write=False)
    return factors


# -- view factors of ground points -------------------------------------------


def _band(a: float, b: float) -> float:
    return 0.5 * (math.cos(a) - math.cos(b))


def _merge(intervals: Sequence[Interval]) -> list[Interval]:
    merged: list[Interval] = []
    for lo, hi in sorted(i for i in intervals if i[1] > i[0]):
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _measure(intervals: Sequence[Interval]) -> float:
    return sum(_band(lo, hi) for lo, hi in _merge(intervals))


def _overlap(interval: Interval, covered: Sequence[Interval]) -> float:
    lo, hi = interval
    return sum(_band(max(lo, a), min(hi, b)) for a, b in covered if min(hi, b) > max(lo, a))


def _row_interval(geom: ArrayGeometry, k: int, x: float) -> Interval:
    ax, az = geom.lower_edge
    bx, bz = geom.upper_edge
    offset = k * geom.pitch - x
    phi_a = math.atan2(az, ax + offset)
    phi_b = math.atan2(bz, bx + offset)
    return (min(phi_a, phi_b), max(phi_a, phi_b))


@dataclass(frozen=True)
class GroundPointViewFactors:
    """Enclosure of a ground point: sky, the masking rows and the far field.

    ``rows`` maps row offset k (relative to the row whose lower edge is at
    x = 0) to the view factor of its visible part.
    """

    sky: float
    rows: dict[int, float]
    far: float

    @property
    def total(self) -> float:
        return self.sky + sum(self.rows.values()) + self.far


def ground_point_view_factors(
    geom: ArrayGeometry, x: float, masking_rows: int = DEFAULT_MASKING_ROWS
) -> GroundPointViewFactors:
    """Split the hemisphere above ground point ``x`` between sky and rows.

    Rows within ``masking_rows`` of the point are resolved individually,
    nearer rows hiding farther ones. The rows beyond are merged into
    ``far``; past ``FAR_ROWS`` more rows everything below the last row's
    top is treated as blocked.
    """
    x = float(x) % geom.pitch
    mid = -0.5 * math.cos(math.radians(geom.tilt))
    nearest = int(round((x - mid) / geom.pitch))
    near = range(nearest - masking_rows, nearest + masking_rows + 1)
    order = sorted(near, key=lambda k: (abs(k * geom.pitch + mid - x), k))

    covered: list[Interval] = []
    rows: dict[int, float] = {}
    for k in order:
        interval = _row_interval(geom, k, x)
        rows[k] = max(0.0, _band(*interval) - _overlap(interval, covered))
        covered = _merge(covered + [interval])

    far_intervals: list[Interval] = []
    first_right = nearest + masking_rows + 1
    first_left = nearest - masking_rows - 1
    for i in range(FAR_ROWS):
        far_intervals.append(_row_interval(geom, first_right + i, x))
        far_intervals.append(_row_interval(geom, first_left - i, x))
    right_cap = _row_interval(geom, first_right + FAR_ROWS, x)
    left_cap = _row_interval(geom, first_left - FAR_ROWS, x)
    far_intervals.append((0.0, right_cap[1]))
    far_intervals.append((left_cap[0], math.pi))

    far_set = _merge(far_intervals)
    far = sum(max(0.0, _band(*i) - _overlap(i, covered)) for i in far_set)
    blocked = _measure(covered + far_set)
    sky = max(0.0, 1.0 - blocked)
    return GroundPointViewFactors(sky=sky, rows=rows, far=far)


def ground_point_sky_vf(
    geom: ArrayGeometry, x: float, masking_rows: int = DEFAULT_MASKING_ROWS
) -> float:
    """View factor from a horizontal ground point to the visible sky."""
    return ground_point_view_factors(geom, x, masking_rows).sky


def ground_points(geom: ArrayGeometry, n_points: int) -> np.ndarray:
    """Strip centres across one pitch."""
    return (np.arange(n_points) + 0.5) * geom.pitch / n_points


@lru_cache(maxsize=512)
def ground_sky_view_factors(
    geom: ArrayGeometry,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> np.ndarray:
    """Sky view factor at every ground sample point."""
    vf = np.array(
        [ground_point_sky_vf(geom, x, masking_rows) for x in ground_points(geom, n_points)]
    )
    vf.setflags(write=False)
    return vf


# -- irradiance ---------------------------------------------------------------


def _ground_direct(
    geom: ArrayGeometry,
    sx: np.ndarray,
    sz: np.ndarray,
    beam_horizontal: np.ndarray,
    x: np.ndarray,
) -> np.ndarray:
    """Beam irradiance on the ground, one row per time step."""
    up = sz > 0.0
    cot = np.where(up, sx / np.where(up, sz, 1.0), 0.0)
    ax, az = geom.lower_edge
    bx, bz = geom.upper_edge
    xa = ax - az * cot
    xb = bx - bz * cot
    start = np.minimum(xa, xb)
    width = np.abs(xa - xb)
    shaded = np.mod(x[None, :] - start[:, None], geom.pitch) < width[:, None]
    shaded |= (width >= geom.pitch)[:, None]
    lit = np.where(up[:, None] & ~shaded, 1.0, 0.0)
    return lit * beam_horizontal[:, None]


def ground_par_profile(
    geom: ArrayGeometry,
    sun: SunPosition,
    dni: float,
    dhi: float,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> GroundLightProfile:
    """Horizontal irradiance across one pitch at ground level.

    Direct light is DNI times the sine of the true sun elevation wherever
    no row blocks the beam; diffuse light is DHI times the local sky view
    factor. Light reflected from the ground or the modules back onto the
    ground is neglected.
    """
    if n_points < 16:
        raise ValidationError(f"must be >= 16, got {n_points}", "n_points")
    x = ground_points(geom, n_points)
    sx, sz = _in_plane(np.asarray([sun.elevation]), np.asarray([sun.azimuth]), geom.front_azimuth)
    beam_h = np.asarray([dni]) * np.clip(sz, 0.0, None)
    direct = _ground_direct(geom, sx, sz, beam_h, x)[0]
    diffuse = dhi * ground_sky_view_factors(geom, n_points, masking_rows)
    return GroundLightProfile(x=x, direct=direct, diffuse=np.array(diffuse))


def _face_irradiance(
    geom: ArrayGeometry,
    sx: np.ndarray,
    sz: np.ndarray,
    dni: np.ndarray,
    dhi: np.ndarray,
    ground_total: np.ndarray,
    n_points: int,
) -> tuple[np.ndarray, np.ndarray]:
    nx, nz = _normal(geom)
    cos_front = sx * nx + sz * nz
    lit = _lit_fraction(geom, sx, sz)
    up = sz > 0.0
    beam_front = np.where(up, dni * np.clip(cos_front, 0.0, None) * lit, 0.0)
    beam_back = np.where(up, dni * np.clip(-cos_front, 0.0, None) * lit, 0.0)

    reflected_front = geom.albedo * ground_total @ face_ground_view_factors(geom, Face.FRONT, n_points)
    reflected_back = geom.albedo * ground_total @ face_ground_view_factors(geom, Face.BACK, n_points)
    front = beam_front + dhi * sky_view_factor_segment(geom, Face.FRONT) + reflected_front
    back = beam_back + dhi * sky_view_factor_segment(geom, Face.BACK) + reflected_back
    return front, back


def module_irradiance(
    geom: ArrayGeometry,
    sun: SunPosition,
    dni: float,
    dhi: float,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> ModuleIrradiance:
    """Front and back plane-of-array irradiance.

    Each face receives the unshaded beam, sky diffuse through its sky view
    factor, and light reflected by the ground strips of the ground profile.
    """
    profile = ground_par_profile(geom, sun, dni, dhi, n_points, masking_rows)
    sx, sz = _in_plane(np.asarray([sun.elevation]), np.asarray([sun.azimuth]), geom.front_azimuth)
    front, back = _face_irradiance(
        geom,
        sx,
        sz,
        np.asarray([dni], dtype=float),
        np.asarray([dhi], dtype=float),
        profile.total[None, :],
        n_points,
    )
    return ModuleIrradiance(front=float(front[0]), back=float(back[0]))


# -- annual series ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ArrayIrradianceSeries:
    """Hourly optics of one geometry over a weather year.

    ``ground_direct`` and ``ground_diffuse`` have one row per hour and one
    column per ground sample point.
    """

    x: np.ndarray
    ground_direct: np.ndarray
    ground_diffuse: np.ndarray
    front: np.ndarray
    back: np.ndarray

    @property
    def ground_total(self) -> np.ndarray:
        return self.ground_direct + self.ground_diffuse


def simulate_year(
    geom: ArrayGeometry,
    weather: WeatherSeries,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> ArrayIrradianceSeries:
    """Evaluate the ground profile and module irradiance for every hour.

    Hour by hour this is identical to ``ground_par_profile`` and
    ``module_irradiance``.
    """
    sun = weather.sun
    sx, sz = _in_plane(sun.elevation, sun.azimuth, geom.front_azimuth)
    x = ground_points(geom, n_points)
    beam_h = weather.dni * np.clip(sz, 0.0, None)
    direct = _ground_direct(geom, sx, sz, beam_h, x)
    diffuse = weather.dhi[:, None] * ground_sky_view_factors(geom, n_points, masking_rows)[None, :]
    front, back = _face_irradiance(
        geom, sx, sz, weather.dni, weather.dhi, direct + diffuse, n_points
    )
    logger.debug("simulated year for %r (%d ground points)", geom, n_points)
    return ArrayIrradianceSeries(
        x=x, ground_direct=direct, ground_diffuse=diffuse, front=front, back=back
    )
