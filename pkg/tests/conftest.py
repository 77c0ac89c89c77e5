"""Shared fixtures: Khanewal site, a clear-sky year and the bundled scenarios."""
from dataclasses import replace

import pytest

from av_feasibility.models import KHANEWAL, ArrayGeometry, OpticsSettings, Orientation
from av_feasibility.services.optics_cache import OpticsCache
from av_feasibility.services.pipeline import ScenarioModel
from av_feasibility.services.scenario import load_scenario
from av_feasibility.services.solar_engine import clearsky_weather

# Ground resolution used by the physics tests; the bundled scenarios use 100
TEST_POINTS = 48


@pytest.fixture(scope="session")
def site():
    """Khanewal, Punjab."""
    return KHANEWAL


@pytest.fixture(scope="session")
def weather(site):
    """Clear-sky hourly year for Khanewal, built once per session."""
    return clearsky_weather(site)


@pytest.fixture(scope="session")
def optics_cache():
    """In-memory optics cache shared by every scenario model."""
    return OpticsCache()


def _scenario(name, orientation):
    scenario = load_scenario(name).with_orientation(orientation)
    return replace(scenario, optics=OpticsSettings(n_points=TEST_POINTS, masking_rows=3))


@pytest.fixture(scope="session")
def scenario_models(optics_cache):
    """ScenarioModel for every (rotation, orientation) of the bundled farms."""
    return {
        (name, orientation): ScenarioModel(_scenario(name, orientation), optics_cache)
        for name in ("hv", "lv")
        for orientation in Orientation
    }


@pytest.fixture
def hv_ns(scenario_models):
    return scenario_models[("hv", Orientation.NS_TILTED)]


@pytest.fixture
def hv_ew(scenario_models):
    return scenario_models[("hv", Orientation.EW_VERTICAL)]


@pytest.fixture
def ns_geometry():
    """South-facing rows tilted 30 degrees at p/h 3."""
    return ArrayGeometry(
        orientation=Orientation.NS_TILTED,
        tilt=30.0,
        pitch_over_height=3.0,
        clearance_over_height=0.5,
    )


@pytest.fixture
def ew_geometry():
    """Vertical east/west bifacial rows at p/h 3."""
    return ArrayGeometry(
        orientation=Orientation.EW_VERTICAL,
        tilt=90.0,
        pitch_over_height=3.0,
        clearance_over_height=0.5,
    )


@pytest.fixture
def minimal_scenario_file(tmp_path):
    """Smallest valid scenario: clear sky, EW rows, one crop."""
    path = tmp_path / "minimal.toml"
    path.write_text(
        "\n".join(
            [
                "[weather]",
                "clearsky = true",
                "",
                "[av]",
                'orientation = "EW_vertical"',
                "",
                "[[crops]]",
                'name = "wheat"',
                "start_month = 10",
                "end_month = 3",
                "open_profit = 228.43",
                "",
            ]
        )
    )
    return path
