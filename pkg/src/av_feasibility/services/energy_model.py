"""Energy Model

Annual electricity per unit module area, the AV/GMPV yield ratio and the
optimal fixed tilt of the ground-mounted baseline.
"""
from __future__ import annotations

import logging
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from av_feasibility.exceptions import DegenerateInputError, ValidationError
from av_feasibility.models.array import ArrayGeometry, Orientation
from av_feasibility.models.energy import AnnualYield, ModuleParams
from av_feasibility.models.solar import Site, WeatherSeries
from av_feasibility.services.array_optics import (
    DEFAULT_MASKING_ROWS,
    DEFAULT_N_POINTS,
    ArrayIrradianceSeries,
    simulate_year,
)

logger = logging.getLogger(__name__)

TILT_BOUNDS = (0.0, 60.0)
TILT_TOLERANCE = 0.5
# A horizontal module is evaluated as this (tilt must stay positive)
MIN_TILT = 1e-6


def yield_from_irradiance(
    optics: ArrayIrradianceSeries,
    mp: ModuleParams,
    orientation: Orientation = Orientation.EW_VERTICAL,
) -> AnnualYield:
    """Convert hourly plane-of-array irradiance to kWh per m² of module.

    The rear side counts with the bifaciality of ``orientation`` rows.
    """
    effective = optics.front + mp.bifaciality_for(orientation) * optics.back
    # left-endpoint sum of one-hour samples, Wh -> kWh
    yy = mp.performance_ratio * mp.efficiency * float(np.sum(effective)) / 1000.0
    return AnnualYield(yy)


def annual_yield(
    geom: ArrayGeometry,
    weather: WeatherSeries,
    mp: Optional[ModuleParams] = None,
    n_points: int = DEFAULT_N_POINTS,
    masking_rows: int = DEFAULT_MASKING_ROWS,
) -> AnnualYield:
    """Annual electrical yield of one row of an infinite array.

    Args:
        geom: Array geometry
        weather: Hourly weather with a site attached
        mp: Module parameters (defaults when None)
        n_points: Ground strips used for the reflected light
        masking_rows: Row masking radius for ground view factors

    Returns:
        AnnualYield in kWh/m²-module/yr
    """
    mp = mp or ModuleParams()
    optics = simulate_year(geom, weather, n_points, masking_rows)
    result = yield_from_irradiance(optics, mp, geom.orientation)
    logger.debug("annual yield %r: %.2f kWh/m²", geom, result.yy)
    return result


def y_pv_ratio(av_yield: AnnualYield, gmpv_yield: AnnualYield) -> float:
    """Y_PV = yy_AV / yy_GMPV.

    Raises:
        DegenerateInputError: the GMPV baseline produces nothing
    """
    if gmpv_yield.yy <= 0.0:
        raise DegenerateInputError("GMPV baseline yield is zero; Y_PV is undefined")
    return av_yield.yy / gmpv_yield.yy


def _tilt_geometry(
    tilt: float, pitch_over_height: float, clearance: float, albedo: float
) -> ArrayGeometry:
    return ArrayGeometry(
        orientation=Orientation.NS_TILTED,
        tilt=max(tilt, MIN_TILT),
        pitch_over_height=pitch_over_height,
        clearance_over_height=clearance,
        albedo=albedo,
    )


def grid_scan_tilt(energy: Callable[[float], float], step: float = 1.0) -> float:
    """Argmax of ``energy`` over a regular tilt grid on ``TILT_BOUNDS``."""
    grid = np.arange(TILT_BOUNDS[0], TILT_BOUNDS[1] + step / 2, step)
    values = [energy(float(tilt)) for tilt in grid]
    return float(grid[int(np.argmax(values))])


def find_optimal_tilt(
    site: Site,
    weather: WeatherSeries,
    pitch_over_height: float,
    mp: Optional[ModuleParams] = None,
    clearance: float = 0.5,
    albedo: float = 0.25,
    n_points: int = 32,
) -> float:
    """Fixed tilt in [0°, 60°] maximising annual yield of NS rows.

    Bounded scalar search to ``TILT_TOLERANCE``; a 1° grid scan takes over
    when the search does not converge.

    Raises:
        ValidationError: ``weather`` is attached to a different site
    """
    mp = mp or ModuleParams()
    if weather.site is None:
        weather = weather.with_site(site)
    elif weather.site != site:
        raise ValidationError(f"weather belongs to {weather.site}, not {site}", "site")

    def energy(tilt: float) -> float:
        geom = _tilt_geometry(tilt, pitch_over_height, clearance, albedo)
        return annual_yield(geom, weather, mp, n_points).yy

    best_tilt: Optional[float] = None
    try:
        result = minimize_scalar(
            lambda tilt: -energy(tilt),
            bounds=TILT_BOUNDS,
            method="bounded",
            options={"xatol": TILT_TOLERANCE / 2},
        )
        if result.success:
            best_tilt = float(result.x)
    except (ValueError, FloatingPointError) as e:
        logger.warning("bounded tilt search failed (%s); using grid scan", e)

    if best_tilt is None:
        best_tilt = grid_scan_tilt(energy)

    logger.info("optimal tilt for p/h=%g at %s: %.1f°", pitch_over_height, site, best_tilt)
    return best_tilt
