"""
AV Feasibility Models Package

Value types shared by the services, plus the SQLAlchemy record of the
persistent optics cache.
"""

from av_feasibility.models.array import (
    ArrayGeometry,
    Face,
    GroundLightProfile,
    ModuleIrradiance,
    Orientation,
    ProjectedSun,
)
from av_feasibility.models.crop import (
    HIGH_VALUE_ROTATION,
    LOW_VALUE_ROTATION,
    CropRotation,
    CropSeason,
    SeasonalYield,
)
from av_feasibility.models.economics import EconParams, FeasibilityResult, SystemPair
from av_feasibility.models.energy import AnnualYield, ModuleParams
from av_feasibility.models.optics_record import OpticsRecord
from av_feasibility.models.scenario import (
    GmpvSpec,
    OpticsSettings,
    Scenario,
    SweepSettings,
    WeatherSource,
)
from av_feasibility.models.solar import (
    KHANEWAL,
    ClearSkyParams,
    Site,
    SunPosition,
    WeatherSeries,
)
from av_feasibility.models.sweep import Metric, SweepGrid, SweepSpec

__all__ = [
    'AnnualYield',
    'ArrayGeometry',
    'ClearSkyParams',
    'CropRotation',
    'CropSeason',
    'EconParams',
    'Face',
    'FeasibilityResult',
    'GmpvSpec',
    'GroundLightProfile',
    'HIGH_VALUE_ROTATION',
    'KHANEWAL',
    'LOW_VALUE_ROTATION',
    'Metric',
    'ModuleIrradiance',
    'ModuleParams',
    'OpticsRecord',
    'OpticsSettings',
    'Orientation',
    'ProjectedSun',
    'Scenario',
    'SeasonalYield',
    'Site',
    'SunPosition',
    'SweepGrid',
    'SweepSettings',
    'SweepSpec',
    'SystemPair',
    'WeatherSeries',
    'WeatherSource',
]
