"""Scenario Pipeline

Wires the solar, optics, energy, crop and economics services together for
one scenario: weather is loaded once, the GMPV baseline tilt is resolved
once, and each AV pitch is simulated once and memoised.
"""
from __future__ import annotations

import logging
import threading
from typing import Optional

from av_feasibility.models.array import ArrayGeometry
from av_feasibility.models.economics import FeasibilityResult, SystemPair
from av_feasibility.models.scenario import Scenario
from av_feasibility.models.solar import WeatherSeries
from av_feasibility.models.sweep import Metric
from av_feasibility.services import econ_model
from av_feasibility.services.array_optics import simulate_year
from av_feasibility.services.crop_model import rotation_profit, rotation_y_par
from av_feasibility.services.energy_model import find_optimal_tilt, yield_from_irradiance
from av_feasibility.services.optics_cache import OpticsCache, OpticsEntry, cache_key
from av_feasibility.services.solar_engine import clearsky_weather, load_weather

logger = logging.getLogger(__name__)

HEAVY_SHADING_PH = 1.5


def load_scenario_weather(scenario: Scenario) -> WeatherSeries:
    """Weather year of ``scenario`` with its site attached."""
    source = scenario.weather
    if source.file is not None:
        weather = load_weather(source.file, scenario.site)
    else:
        weather = clearsky_weather(scenario.site, source.clearsky, source.year)
    logger.info("weather loaded from %s", source.describe())
    return weather


class ScenarioModel:
    """Evaluates design points (p/h, M_L) of one scenario.

    Args:
        scenario: Validated scenario
        cache: Shared optics cache; a private in-memory cache when None
    """

    def __init__(self, scenario: Scenario, cache: Optional[OpticsCache] = None) -> None:
        self.scenario = scenario
        self.cache = cache if cache is not None else OpticsCache()
        self._lock = threading.Lock()
        self._weather: Optional[WeatherSeries] = None
        self._gmpv: Optional[ArrayGeometry] = None
        self._gmpv_entry: Optional[OpticsEntry] = None

    def __repr__(self) -> str:
        return f"<ScenarioModel({self.scenario.name!r}, {self.scenario.orientation.value})>"

    @property
    def weather(self) -> WeatherSeries:
        with self._lock:
            if self._weather is None:
                self._weather = load_scenario_weather(self.scenario)
            return self._weather

    @property
    def gmpv_geometry(self) -> ArrayGeometry:
        """GMPV baseline geometry with the optimal tilt resolved."""
        weather = self.weather
        with self._lock:
            if self._gmpv is None:
                spec = self.scenario.gmpv
                tilt = None
                if isinstance(spec.tilt, str):
                    tilt = find_optimal_tilt(
                        self.scenario.site,
                        weather,
                        spec.pitch_over_height,
                        self.scenario.module,
                        spec.clearance_over_height,
                        spec.albedo,
                    )
                self._gmpv = spec.geometry(tilt)
            return self._gmpv

    def _entry(self, geom: ArrayGeometry) -> OpticsEntry:
        weather = self.weather
        optics_settings = self.scenario.optics
        rotation = self.scenario.rotation
        key = cache_key(
            geom,
            weather,
            self.scenario.module,
            rotation,
            optics_settings.n_points,
            optics_settings.masking_rows,
        )

        def compute() -> OpticsEntry:
            optics = simulate_year(
                geom, weather, optics_settings.n_points, optics_settings.masking_rows
            )
            module = self.scenario.module
            yy = yield_from_irradiance(optics, module, geom.orientation).yy
            yields = rotation_y_par(
                geom, weather, rotation, ground_total=optics.ground_total
            )
            return OpticsEntry(yy=yy, y_par=tuple(y.y_par for y in yields))

        return self.cache.get_or_compute(key, geom, compute)

    @property
    def gmpv_entry(self) -> OpticsEntry:
        geom = self.gmpv_geometry
        with self._lock:
            entry = self._gmpv_entry
        if entry is None:
            # computed outside the lock: _entry re-enters self.weather
            entry = self._entry(geom)
            with self._lock:
                if self._gmpv_entry is None:
                    self._gmpv_entry = entry
                entry = self._gmpv_entry
        return entry

    def av_geometry(self, pitch_over_height: float) -> ArrayGeometry:
        return self.scenario.av.with_pitch(pitch_over_height)

    def column(self, pitch_over_height: float) -> OpticsEntry:
        """Annual AV yield and seasonal Y_PAR at one pitch."""
        if pitch_over_height < HEAVY_SHADING_PH:
            logger.warning(
                "p/h=%g is below %g; the array heavily shades itself and the crop",
                pitch_over_height,
                HEAVY_SHADING_PH,
            )
        return self._entry(self.av_geometry(pitch_over_height))

    def pair(self, pitch_over_height: float) -> SystemPair:
        entry = self.column(pitch_over_height)
        rotation = self.scenario.rotation
        return SystemPair(
            av_geometry=self.av_geometry(pitch_over_height),
            gmpv_geometry=self.gmpv_geometry,
            yy_av=entry.yy,
            yy_pv=self.gmpv_entry.yy,
            p_c=rotation_profit(rotation, entry.y_par),
            p_c_open=rotation.open_profit,
        )

    def evaluate(
        self,
        pitch_over_height: float,
        m_l: Optional[float] = None,
        delta_fit: Optional[float] = None,
    ) -> FeasibilityResult:
        """Full feasibility result at (p/h, M_L); M_L defaults to the scenario's."""
        econ = self.scenario.economics
        if m_l is not None:
            econ = econ.with_m_l(m_l)
        if delta_fit is None:
            delta_fit = self.scenario.delta_fit
        return econ_model.feasibility(self.pair(pitch_over_height), econ, delta_fit)

    def metric(self, pitch_over_height: float, m_l: float, metric: Metric) -> float:
        return metric_value(self.evaluate(pitch_over_height, m_l), metric)


def metric_value(result: FeasibilityResult, metric: Metric) -> float:
    """Pick one sweep metric out of a feasibility result."""
    metric = Metric(metric)
    if metric is Metric.LCOE_RATIO:
        return result.lcoe_ratio
    return float(getattr(result, metric.value))
