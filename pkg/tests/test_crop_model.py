import numpy as np
import pytest

from av_feasibility.exceptions import DegenerateInputError, ValidationError
from av_feasibility.models import (
    HIGH_VALUE_ROTATION,
    LOW_VALUE_ROTATION,
    CropRotation,
    CropSeason,
    SeasonalYield,
    WeatherSeries,
)
from av_feasibility.services.crop_model import (
    daily_useful_par,
    par_from_irradiance,
    rotation_profit,
    seasonal_y_par,
    y_par_from_ground,
)

WHEAT = CropSeason("wheat", 10, 3, 228.43, 1200.0)


class TestCropSeason:
    """Test seasons and rotations."""

    def test_months_wrap_the_year(self):
        assert WHEAT.months == (10, 11, 12, 1, 2, 3)

    def test_single_month(self):
        assert CropSeason("x", 5, 5, 1.0, 500.0).months == (5,)

    def test_bad_month(self):
        with pytest.raises(ValidationError) as excinfo:
            CropSeason("x", 13, 2, 1.0, 500.0)
        assert excinfo.value.field == "start_month"

    def test_overlap_rejected(self):
        """A month cannot belong to two seasons."""
        with pytest.raises(ValidationError, match="month 3"):
            CropRotation((WHEAT, CropSeason("cotton", 3, 9, 69.88, 1600.0)))

    def test_bundled_rotations_cover_the_year(self):
        for rotation in (HIGH_VALUE_ROTATION, LOW_VALUE_ROTATION):
            months = sorted(m for season in rotation for m in season.months)
            assert months == list(range(1, 13))

    def test_seasonal_yield_range(self):
        with pytest.raises(ValidationError):
            SeasonalYield("wheat", 1.5)


class TestUsefulPar:
    """Test PAR conversion and clipping at light saturation."""

    def test_par_conversion(self):
        """100 W/m² of shortwave is 205.65 µmol m⁻² s⁻¹ of PAR."""
        assert par_from_irradiance(100.0) == pytest.approx(205.65)

    def test_clipped_at_saturation(self):
        """Ten hours above a 1000 µmol saturation point count as 36 mol/m²."""
        assert daily_useful_par(np.full(10, 1500.0), 1000.0) == pytest.approx(36.0)

    def test_below_saturation_untouched(self):
        hourly = np.array([0.0, 200.0, 400.0])
        assert daily_useful_par(hourly, 1000.0) == pytest.approx(600.0 * 3600 / 1e6)

    def test_saturation_must_be_positive(self):
        with pytest.raises(ValidationError):
            daily_useful_par(np.ones(3), 0.0)


class TestSeasonalYield:
    """Test Y_PAR under the array."""

    def test_open_field_is_one(self, weather):
        """Ground that receives the full GHI everywhere gives Y_PAR = 1."""
        ground = np.repeat(weather.ghi[:, None], 5, axis=1)
        assert y_par_from_ground(ground, weather, WHEAT).y_par == pytest.approx(1.0)

    def test_darkness_under_array(self, weather):
        ground = np.zeros((len(weather), 4))
        assert y_par_from_ground(ground, weather, WHEAT).y_par == 0.0

    def test_saturation_blunts_shading(self, weather):
        """Halving the light costs an early-saturating crop far less than half its yield."""
        ground = np.repeat(0.5 * weather.ghi[:, None], 3, axis=1)
        shade_tolerant = CropSeason("garlic", 10, 3, 1.0, 300.0)
        assert y_par_from_ground(ground, weather, shade_tolerant).y_par > 0.8

    def test_no_light_is_degenerate(self, weather):
        dark = WeatherSeries(
            weather.timestamps, np.zeros(len(weather)), np.zeros(len(weather)), weather.site
        )
        with pytest.raises(DegenerateInputError):
            y_par_from_ground(np.zeros((len(dark), 4)), dark, WHEAT)

    def test_monotone_in_pitch(self, hv_ns, hv_ew):
        """Wider rows never darken a season."""
        for model in (hv_ns, hv_ew):
            values = np.array([model.column(ph).y_par for ph in (2.0, 3.0, 4.0, 6.0)])
            assert np.all(np.diff(values, axis=0) >= -1e-3)

    def test_wide_rows_keep_most_light(self, hv_ns, hv_ew):
        """At p/h 6 every season keeps over three quarters of its useful light.

        The rows still hide about a sixth of the sky from the ground and, in
        winter, intercept a quarter of the beam, so no season reaches open field.
        """
        for model in (hv_ns, hv_ew):
            values = model.column(6.0).y_par
            assert min(values) >= 0.75
            assert max(values) < 1.0

    @pytest.mark.slow
    def test_vertical_rows_shade_less(self, hv_ns, hv_ew):
        """At p/h 2 vertical EW rows leave markedly more light than tilted NS rows."""
        assert hv_ew.pair(2.0).y_par >= 1.15 * hv_ns.pair(2.0).y_par

    @pytest.mark.slow
    def test_ground_resolution_converged(self, ns_geometry, weather):
        """Doubling the ground points changes Y_PAR by less than half a percent."""
        coarse = seasonal_y_par(ns_geometry, weather, WHEAT, n_points=48).y_par
        fine = seasonal_y_par(ns_geometry, weather, WHEAT, n_points=96).y_par
        assert fine == pytest.approx(coarse, rel=5e-3)


class TestRotationProfit:
    """Test the crop profit of a rotation."""

    def test_open_field_profits(self):
        """Full light reproduces the open-field totals of both farms."""
        assert rotation_profit(HIGH_VALUE_ROTATION, [1.0] * 3) == pytest.approx(9192.34, abs=0.011)
        assert rotation_profit(LOW_VALUE_ROTATION, [1.0, 1.0]) == pytest.approx(298.31)
        assert LOW_VALUE_ROTATION.open_profit == pytest.approx(298.31)

    def test_weighted_by_season(self):
        yields = [SeasonalYield("cotton", 0.5), SeasonalYield("wheat", 1.0)]
        assert rotation_profit(LOW_VALUE_ROTATION, yields) == pytest.approx(0.5 * 69.88 + 228.43)

    def test_wrong_length(self):
        with pytest.raises(ValidationError):
            rotation_profit(HIGH_VALUE_ROTATION, [1.0, 1.0])

