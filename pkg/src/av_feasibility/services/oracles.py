"""Oracles

Independent reference computations used by ``av-feasibility validate`` and
the test suite: a second solar-position algorithm, Monte-Carlo ray
sampling of view factors, a segment-intersection shading check, and the
randomised criterion and cash-flow equivalence suites.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import pandas as pd

from av_feasibility.models.array import ArrayGeometry, Face, Orientation
from av_feasibility.models.economics import EconParams, SystemPair
from av_feasibility.models.solar import Site
from av_feasibility.services import array_optics, econ_model
from av_feasibility.services.solar_engine import SunPositionSeries, sun_positions

logger = logging.getLogger(__name__)

RAY_CHUNK = 250_000
GROUND_RAY_ROWS = 40
CRITERION_BAND = 1e-9


@dataclass
class OracleOutcome:
    """Result of one oracle suite."""

    name: str
    total: int
    failures: int
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def __repr__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"<OracleOutcome({self.name}: {status} {self.total - self.failures}/{self.total})>"


# -- solar position ------------------------------------------------------------


def reference_sun_positions(site: Site, timestamps: pd.DatetimeIndex) -> SunPositionSeries:
    """Low-precision almanac sun position from the Julian day.

    Independent of the fractional-year formulas used by the solar engine.
    """
    ts = pd.DatetimeIndex(timestamps) - pd.Timedelta(hours=site.utc_offset)
    n = ts.to_julian_date().to_numpy() - 2451545.0
    ut_hours = ts.hour.to_numpy() + ts.minute.to_numpy() / 60.0 + ts.second.to_numpy() / 3600.0

    mean_long = np.radians((280.460 + 0.9856474 * n) % 360.0)
    mean_anom = np.radians((357.528 + 0.9856003 * n) % 360.0)
    ecl_long = mean_long + np.radians(1.915) * np.sin(mean_anom) + np.radians(0.020) * np.sin(
        2 * mean_anom
    )
    obliquity = np.radians(23.439 - 0.0000004 * n)
    ra = np.arctan2(np.cos(obliquity) * np.sin(ecl_long), np.cos(ecl_long))
    dec = np.arcsin(np.sin(obliquity) * np.sin(ecl_long))

    gmst = (6.697375 + 0.0657098242 * n + ut_hours) % 24.0
    lmst = (gmst + site.longitude / 15.0) % 24.0
    ha = np.radians(lmst * 15.0) - ra

    lat = np.radians(site.latitude)
    sin_el = np.sin(dec) * np.sin(lat) + np.cos(dec) * np.cos(lat) * np.cos(ha)
    el = np.arcsin(np.clip(sin_el, -1.0, 1.0))
    az = np.arctan2(
        -np.sin(ha) * np.cos(dec),
        np.sin(dec) * np.cos(lat) - np.cos(dec) * np.sin(lat) * np.cos(ha),
    )
    return SunPositionSeries(elevation=np.degrees(el), azimuth=np.degrees(az) % 360.0)


def _angle_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs((a - b + 180.0) % 360.0 - 180.0)


def solar_position_suite(
    rng: np.random.Generator, samples: int = 500, tolerance: float = 0.5
) -> OracleOutcome:
    """Compare the solar engine with the almanac algorithm at random sites and times."""
    outcome = OracleOutcome("solar position", total=0, failures=0)
    for _ in range(samples):
        site = Site(
            latitude=float(rng.uniform(-60, 60)),
            longitude=float(rng.uniform(-180, 180)),
            utc_offset=float(rng.integers(-12, 13)),
        )
        start = pd.Timestamp("2000-01-01") + pd.Timedelta(days=float(rng.uniform(0, 365 * 30)))
        ts = pd.DatetimeIndex([start.floor("min")])
        ours = sun_positions(site, ts)
        ref = reference_sun_positions(site, ts)
        outcome.total += 1
        el_err = float(abs(ours.elevation[0] - ref.elevation[0]))
        az_err = 0.0
        if 5.0 < ref.elevation[0] < 80.0:
            az_err = float(_angle_diff(ours.azimuth, ref.azimuth)[0])
        if el_err > tolerance or az_err > tolerance:
            outcome.failures += 1
            outcome.details.append(f"{site} {ts[0]}: elevation {el_err:.3f}°, azimuth {az_err:.3f}°")
    return outcome


# -- ray sampling ----------------------------------------------------------------


def _segment_hits(
    ox: np.ndarray,
    oz: np.ndarray,
    dx: np.ndarray,
    dz: np.ndarray,
    s0: tuple[float, float],
    s1: tuple[float, float],
) -> np.ndarray:
    """Rays (origin o, direction d) that cross the segment s0-s1 ahead of o."""
    ex, ez = s1[0] - s0[0], s1[1] - s0[1]
    wx, wz = s0[0] - ox, s0[1] - oz
    denom = dx * ez - dz * ex
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (wx * ez - wz * ex) / denom
        u = (wx * dz - wz * dx) / denom
    return (np.abs(denom) > 1e-15) & (s > 1e-12) & (u >= 0.0) & (u <= 1.0)


def _row_segment(geom: ArrayGeometry, k: int) -> tuple[tuple[float, float], tuple[float, float]]:
    ax, az = geom.lower_edge
    bx, bz = geom.upper_edge
    shift = k * geom.pitch
    return (ax + shift, az), (bx + shift, bz)


def mc_face_view_factors(
    geom: ArrayGeometry,
    face: Face,
    rays: int = 1_000_000,
    rng: Optional[np.random.Generator] = None,
    rows: int = 2,
) -> dict[str, float]:
    """Monte-Carlo split of a face's hemisphere into sky, ground and rows.

    Origins are uniform along the face, directions cosine-weighted.
    """
    rng = rng or np.random.default_rng()
    t = math.radians(geom.tilt)
    theta_n = math.pi / 2 - t if Face(face) is Face.FRONT else -(math.pi / 2 + t)
    counts = {"sky": 0, "ground": 0, "rows": 0}
    remaining = rays
    while remaining > 0:
        m = min(RAY_CHUNK, remaining)
        remaining -= m
        u = rng.random(m)
        ox = geom.lower_edge[0] - u * math.cos(t)
        oz = geom.lower_edge[1] + u * math.sin(t)
        phi = theta_n + np.arcsin(2.0 * rng.random(m) - 1.0)
        dx, dz = np.cos(phi), np.sin(phi)
        blocked = np.zeros(m, dtype=bool)
        for k in range(-rows, rows + 1):
            if k == 0:
                continue
            s0, s1 = _row_segment(geom, k)
            blocked |= _segment_hits(ox, oz, dx, dz, s0, s1)
        counts["rows"] += int(blocked.sum())
        counts["sky"] += int((~blocked & (dz > 0)).sum())
        counts["ground"] += int((~blocked & (dz <= 0)).sum())
    return {key: value / rays for key, value in counts.items()}


def mc_ground_sky_view_factor(
    geom: ArrayGeometry,
    x: float,
    rays: int = 1_000_000,
    rng: Optional[np.random.Generator] = None,
    rows: int = GROUND_RAY_ROWS,
) -> float:
    """Monte-Carlo sky view factor of a horizontal ground point."""
    rng = rng or np.random.default_rng()
    sky = 0
    remaining = rays
    while remaining > 0:
        m = min(RAY_CHUNK, remaining)
        remaining -= m
        phi = math.pi / 2 + np.arcsin(2.0 * rng.random(m) - 1.0)
        dx, dz = np.cos(phi), np.sin(phi)
        ox = np.full(m, float(x))
        oz = np.zeros(m)
        blocked = np.zeros(m, dtype=bool)
        nearest = int(round(x / geom.pitch))
        for k in range(nearest - rows, nearest + rows + 1):
            s0, s1 = _row_segment(geom, k)
            blocked |= _segment_hits(ox, oz, dx, dz, s0, s1)
        sky += int((~blocked).sum())
    return sky / rays


def ray_lit_fraction(geom: ArrayGeometry, sx: float, sz: float, iterations: int = 80) -> float:
    """Lit share of the sunlit face found by bisection on ray-segment hits."""
    if sz <= 0:
        return 0.0
    t = math.radians(geom.tilt)
    nx, nz = math.sin(t), math.cos(t)
    if abs(sx * nx + sz * nz) < 1e-12:
        return 0.0
    norm = math.hypot(sx, sz)
    dx, dz = sx / norm, sz / norm
    neighbours = [_row_segment(geom, k) for k in (-1, 1)]

    def shaded(u: float) -> bool:
        ox = np.array([geom.lower_edge[0] - u * math.cos(t)])
        oz = np.array([geom.lower_edge[1] + u * math.sin(t)])
        return any(
            bool(_segment_hits(ox, oz, np.array([dx]), np.array([dz]), s0, s1)[0])
            for s0, s1 in neighbours
        )

    if not shaded(0.0):
        return 1.0
    if shaded(1.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if shaded(mid):
            lo = mid
        else:
            hi = mid
    return 1.0 - 0.5 * (lo + hi)


def random_geometry(rng: np.random.Generator) -> ArrayGeometry:
    vertical = bool(rng.random() < 0.5)
    return ArrayGeometry(
        orientation=Orientation.EW_VERTICAL if vertical else Orientation.NS_TILTED,
        tilt=90.0 if vertical else float(rng.uniform(5.0, 85.0)),
        pitch_over_height=float(rng.uniform(1.2, 6.0)),
        clearance_over_height=float(rng.uniform(0.0, 3.0)),
    )


def view_factor_suite(
    rng: np.random.Generator,
    geometries: int = 20,
    rays: int = 1_000_000,
    tolerance: float = 0.01,
    ground_checks: int = 5,
) -> OracleOutcome:
    """Crossed strings and ground-point view factors against ray sampling."""
    outcome = OracleOutcome("view factors", total=0, failures=0)
    for i in range(geometries):
        geom = random_geometry(rng)
        for face in Face:
            mc = mc_face_view_factors(geom, face, rays, rng)
            analytic = array_optics.sky_view_factor_segment(geom, face)
            outcome.total += 1
            if abs(mc["sky"] - analytic) > tolerance:
                outcome.failures += 1
                outcome.details.append(
                    f"{geom!r} {face.value}: crossed strings {analytic:.4f}, MC {mc['sky']:.4f}"
                )
        if i < ground_checks:
            x = float(rng.uniform(0.0, geom.pitch))
            mc_sky = mc_ground_sky_view_factor(geom, x, rays, rng)
            analytic = array_optics.ground_point_sky_vf(geom, x)
            outcome.total += 1
            if abs(mc_sky - analytic) > tolerance:
                outcome.failures += 1
                outcome.details.append(
                    f"{geom!r} ground x={x:.3f}: analytic {analytic:.4f}, MC {mc_sky:.4f}"
                )

    # two unit walls one unit away on either side
    walls = ArrayGeometry(
        orientation=Orientation.EW_VERTICAL,
        tilt=90.0,
        pitch_over_height=2.0,
        clearance_over_height=0.0,
    )
    vf = array_optics.ground_point_view_factors(walls, 1.0)
    nearest_walls = vf.rows[0] + vf.rows[1]
    expected = 1.0 - math.sin(math.radians(45.0))
    outcome.total += 1
    if abs(nearest_walls - expected) > 0.01 * expected:
        outcome.failures += 1
        outcome.details.append(f"wall case: {nearest_walls:.5f} vs {expected:.5f}")
    return outcome


# -- economics ---------------------------------------------------------------------


def random_pair(rng: np.random.Generator) -> tuple[SystemPair, EconParams, float]:
    """A random but valid AV/GMPV pair, economics and tariff premium."""
    gmpv = ArrayGeometry(pitch_over_height=float(rng.uniform(1.0, 4.0)))
    orientation = list(Orientation)[int(rng.integers(len(Orientation)))]
    tilt = 90.0 if orientation is Orientation.EW_VERTICAL else float(rng.uniform(5.0, 45.0))
    av = ArrayGeometry(
        orientation=orientation,
        tilt=tilt,
        pitch_over_height=float(rng.uniform(1.0, 8.0)),
    )
    yy_pv = float(rng.uniform(150.0, 450.0))
    p_c_open = float(rng.uniform(100.0, 20000.0))
    pair = SystemPair(
        av_geometry=av,
        gmpv_geometry=gmpv,
        yy_av=yy_pv * float(rng.uniform(0.6, 1.1)),
        yy_pv=yy_pv,
        p_c=p_c_open * float(rng.uniform(0.0, 1.0)),
        p_c_open=p_c_open,
    )
    econ = EconParams(
        c_m_pv=float(rng.uniform(20.0, 300.0)),
        m_l_pv=float(rng.uniform(2.0, 80.0)),
        kappa=float(rng.uniform(0.8, 2.0)),
        d=float(rng.uniform(0.0, 0.05)),
        r=float(rng.uniform(0.0, 0.12)),
        lifetime_years=int(rng.integers(5, 41)),
        fit_pv=float(rng.uniform(0.02, 0.2)),
    )
    delta_fit = 0.0 if rng.random() < 0.5 else float(rng.uniform(0.0, 0.05))
    return pair, econ, delta_fit


def _margin(pair: SystemPair, econ: EconParams, delta_fit: float) -> float:
    return (
        econ_model.rho(pair, econ)
        + delta_fit / econ_model.beta(pair, econ)
        - econ.kappa
    )


def criterion_suite(rng: np.random.Generator, scenarios: int = 1000) -> OracleOutcome:
    """The three rearrangements of the parity inequality agree."""
    outcome = OracleOutcome("criterion equivalence", total=0, failures=0)
    for _ in range(scenarios):
        pair, econ, delta_fit = random_pair(rng)
        if abs(_margin(pair, econ, delta_fit)) <= CRITERION_BAND:
            continue
        result = econ_model.feasibility(pair, econ, delta_fit)
        by_threshold = delta_fit >= result.delta_fit_th
        by_crop = result.y_par >= result.psi
        outcome.total += 1
        if not (result.feasible_vs_gmpv == by_threshold == by_crop):
            outcome.failures += 1
            outcome.details.append(
                f"rho={result.rho:.6f} kappa={econ.kappa:.6f}: verdict "
                f"{result.feasible_vs_gmpv}, threshold {by_threshold}, crop {by_crop}"
            )
    return outcome


def cash_flow_suite(
    rng: np.random.Generator, scenarios: int = 1000, kappa_perturbation: float = 0.0
) -> OracleOutcome:
    """Sign of the closed-form margin against year-by-year cash flows."""
    outcome = OracleOutcome("cash flow", total=0, failures=0)
    for _ in range(scenarios):
        pair, econ, delta_fit = random_pair(rng)
        margin = _margin(pair, econ, delta_fit)
        if abs(margin) <= CRITERION_BAND:
            continue
        difference = econ_model.cash_flow_profit_difference(
            pair, econ, delta_fit, kappa_perturbation=kappa_perturbation
        )
        outcome.total += 1
        if (margin > 0) != (difference > 0):
            outcome.failures += 1
            outcome.details.append(
                f"margin {margin:+.6f} but cash-flow difference {difference:+.4f}"
            )
    return outcome


SuiteRunner = Callable[[np.random.Generator], OracleOutcome]


def run_validation(
    seed: int,
    kappa_perturbation: float = 0.0,
    rays: int = 1_000_000,
    geometries: int = 20,
    scenarios: int = 1000,
) -> list[OracleOutcome]:
    """Run every oracle suite with generators derived from ``seed``."""
    seeds = np.random.SeedSequence(seed).spawn(4)
    suites: list[tuple[str, SuiteRunner]] = [
        ("view factors", lambda g: view_factor_suite(g, geometries, rays)),
        ("solar position", lambda g: solar_position_suite(g)),
        ("cash flow", lambda g: cash_flow_suite(g, scenarios, kappa_perturbation)),
        ("criterion equivalence", lambda g: criterion_suite(g, scenarios)),
    ]
    outcomes = []
    for child, (name, runner) in zip(seeds, suites):
        logger.info("running oracle suite: %s", name)
        outcomes.append(runner(np.random.default_rng(child)))
    return outcomes
