import math

import numpy as np
import pytest

from av_feasibility.exceptions import ValidationError
from av_feasibility.models import ArrayGeometry, Face, Orientation, SunPosition, WeatherSeries
from av_feasibility.services.array_optics import (
    beam_module_shading,
    face_ground_total,
    face_ground_view_factors,
    face_row_view_factor,
    ground_par_profile,
    ground_point_view_factors,
    ground_sky_view_factors,
    module_irradiance,
    project_sun,
    simulate_year,
    sky_view_factor_segment,
)
from av_feasibility.services.oracles import (
    mc_face_view_factors,
    mc_ground_sky_view_factor,
    ray_lit_fraction,
)


def _walls(pitch_over_height=2.0):
    return ArrayGeometry(
        orientation=Orientation.EW_VERTICAL,
        tilt=90.0,
        pitch_over_height=pitch_over_height,
        clearance_over_height=0.0,
    )


class TestProjectSun:
    """Test projection of the sun into the array cross-section."""

    def test_oblique_sun_on_east_west_rows(self):
        """tan(e_p) = tan(e) / |cos(az - az_front)|: 30 deg at az 120 projects to 33.69."""
        psun = project_sun(SunPosition(30.0, 120.0), Orientation.EW_VERTICAL)
        assert psun.elevation == pytest.approx(33.69, abs=0.01)
        assert psun.in_front
        assert not psun.below_horizon

    def test_sun_in_plane_keeps_elevation(self):
        """A sun due south over south-facing rows is not distorted."""
        psun = project_sun(SunPosition(40.0, 180.0), Orientation.NS_TILTED)
        assert psun.elevation == pytest.approx(40.0)
        assert psun.in_front

    def test_afternoon_sun_behind_east_facing_front(self):
        """West sun lights the back of east-facing rows."""
        psun = project_sun(SunPosition(25.0, 250.0), Orientation.EW_VERTICAL)
        assert not psun.in_front
        assert psun.angle > 90.0

    def test_sun_along_rows_is_edge_on(self):
        """Sun parallel to the rows projects to the zenith."""
        psun = project_sun(SunPosition(30.0, 180.0), Orientation.EW_VERTICAL)
        assert psun.edge_on
        assert psun.elevation == pytest.approx(90.0)

    def test_below_horizon_flagged(self):
        """Night sun is flagged."""
        assert project_sun(SunPosition(-5.0, 180.0), Orientation.NS_TILTED).below_horizon

    def test_front_azimuth_override(self):
        """An explicit front azimuth replaces the orientation default."""
        psun = project_sun(SunPosition(30.0, 200.0), Orientation.NS_TILTED, front_azimuth=200.0)
        assert psun.elevation == pytest.approx(30.0)


class TestBeamShading:
    """Test the lit fraction of the module face."""

    def test_vertical_rows_closed_form(self):
        """Vertical rows at pitch p and projected elevation e: lit share p tan(e)."""
        geom = _walls(2.0)
        e = math.radians(20.0)
        psun = project_sun(SunPosition(20.0, 90.0), Orientation.EW_VERTICAL)
        assert beam_module_shading(geom, psun) == pytest.approx(2.0 * math.tan(e), rel=1e-9)

    def test_high_sun_fully_lit(self, ns_geometry):
        """Overhead sun leaves no row shadow."""
        psun = project_sun(SunPosition(89.0, 180.0), Orientation.NS_TILTED)
        assert beam_module_shading(ns_geometry, psun) == 1.0

    def test_night_is_dark(self, ns_geometry):
        psun = project_sun(SunPosition(-1.0, 180.0), Orientation.NS_TILTED)
        assert beam_module_shading(ns_geometry, psun) == 0.0

    @pytest.mark.parametrize(
        "tilt,pitch,elevation,azimuth",
        [
            (30.0, 2.0, 10.0, 180.0),
            (30.0, 1.5, 15.0, 150.0),
            (45.0, 2.5, 8.0, 200.0),
            (60.0, 3.0, 12.0, 170.0),
            (20.0, 1.2, 5.0, 180.0),
        ],
    )
    def test_matches_ray_bisection(self, tilt, pitch, elevation, azimuth):
        """Closed form agrees with ray-segment intersection."""
        geom = ArrayGeometry(tilt=tilt, pitch_over_height=pitch, clearance_over_height=0.5)
        psun = project_sun(SunPosition(elevation, azimuth), Orientation.NS_TILTED)
        expected = ray_lit_fraction(geom, psun.sx, psun.sz)
        assert beam_module_shading(geom, psun) == pytest.approx(expected, abs=1e-6)

    def test_back_face_shading_matches_rays(self):
        """Sun behind tilted rows shades the back face the same way."""
        geom = ArrayGeometry(tilt=70.0, pitch_over_height=1.5, clearance_over_height=0.5)
        psun = project_sun(SunPosition(12.0, 10.0), Orientation.NS_TILTED)
        assert not psun.in_front
        expected = ray_lit_fraction(geom, psun.sx, psun.sz)
        assert beam_module_shading(geom, psun) == pytest.approx(expected, abs=1e-6)


class TestFaceViewFactors:
    """Test crossed-strings view factors of the module faces."""

    def test_flat_module_sees_sky(self):
        """A nearly horizontal face sees almost only sky."""
        geom = ArrayGeometry(tilt=0.01, pitch_over_height=2.0)
        assert sky_view_factor_segment(geom, Face.FRONT) == pytest.approx(1.0, abs=1e-3)

    def test_isolated_vertical_module(self):
        """A lone vertical face sees half sky, half ground."""
        geom = _walls(1000.0)
        assert sky_view_factor_segment(geom, Face.FRONT) == pytest.approx(0.5, abs=1e-3)
        assert face_ground_total(geom, Face.FRONT) == pytest.approx(0.5, abs=1e-3)

    def test_vertical_faces_symmetric(self, ew_geometry):
        """Front and back of a vertical row see the same sky."""
        assert sky_view_factor_segment(ew_geometry, Face.FRONT) == pytest.approx(
            sky_view_factor_segment(ew_geometry, Face.BACK)
        )

    @pytest.mark.parametrize("face", list(Face))
    def test_closure(self, ns_geometry, face):
        """Sky, ground and neighbour row add up to one."""
        total = (
            sky_view_factor_segment(ns_geometry, face)
            + face_ground_total(ns_geometry, face)
            + face_row_view_factor(ns_geometry, face)
        )
        assert total == pytest.approx(1.0)

    def test_sky_view_grows_with_pitch(self):
        """Wider spacing opens the sky."""
        values = [
            sky_view_factor_segment(ArrayGeometry(pitch_over_height=p), Face.FRONT)
            for p in (1.2, 2.0, 4.0, 8.0)
        ]
        assert values == sorted(values)

    @pytest.mark.parametrize("face", list(Face))
    def test_against_ray_sampling(self, face):
        """Crossed strings within 1% of Monte-Carlo rays."""
        geom = ArrayGeometry(tilt=35.0, pitch_over_height=2.5, clearance_over_height=0.8)
        mc = mc_face_view_factors(geom, face, rays=200_000, rng=np.random.default_rng(3))
        assert mc["sky"] == pytest.approx(sky_view_factor_segment(geom, face), abs=0.01)

    @pytest.mark.parametrize("face", list(Face))
    def test_ground_strips_sum_to_total(self, ns_geometry, face):
        """Strip factors are non-negative and add up to the face-to-ground value."""
        strips = face_ground_view_factors(ns_geometry, face, 64)
        assert strips.shape == (64,)
        assert np.all(strips >= 0)
        assert strips.sum() == pytest.approx(face_ground_total(ns_geometry, face), rel=1e-9)

    def test_vertical_faces_see_mirrored_ground(self, ew_geometry):
        """The back of a vertical row sees the strips of the front, mirrored."""
        front = face_ground_view_factors(ew_geometry, Face.FRONT, 40)
        back = face_ground_view_factors(ew_geometry, Face.BACK, 40)
        np.testing.assert_allclose(front, back[::-1], atol=1e-3)


class TestGroundViewFactors:
    """Test the view factors of ground points."""

    def test_wall_case(self):
        """Midway between ground-level unit walls two units apart.

        The sky subtends sin 45 and the two neighbouring walls the remaining
        1 - sin 45; nothing beyond them is visible.
        """
        vf = ground_point_view_factors(_walls(2.0), 1.0)
        assert vf.sky == pytest.approx(math.sin(math.radians(45.0)), abs=1e-6)
        assert vf.rows[0] + vf.rows[1] == pytest.approx(1.0 - math.sin(math.radians(45.0)), abs=1e-6)
        assert vf.far == pytest.approx(0.0, abs=1e-9)

    def test_far_rows_seen_under_raised_walls(self):
        """Raised rows let farther rows show through; the hemisphere still closes."""
        raised = ArrayGeometry(
            orientation=Orientation.EW_VERTICAL,
            tilt=90.0,
            pitch_over_height=2.0,
            clearance_over_height=0.5,
        )
        vf = ground_point_view_factors(raised, 1.0)
        assert vf.far > 0.0
        assert vf.sky + sum(vf.rows.values()) + vf.far == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize(
        "geom",
        [
            ArrayGeometry(tilt=30.0, pitch_over_height=6.0, clearance_over_height=2.5),
            ArrayGeometry(
                orientation=Orientation.EW_VERTICAL,
                tilt=90.0,
                pitch_over_height=6.0,
                clearance_over_height=0.5,
            ),
            ArrayGeometry(tilt=30.0, pitch_over_height=2.0, clearance_over_height=0.5),
        ],
    )
    def test_mean_sky_view_is_reciprocal(self, geom):
        """Pitch-mean hidden sky equals the ground view of both faces over p/h."""
        faces = face_ground_total(geom, Face.FRONT) + face_ground_total(geom, Face.BACK)
        mean_sky = ground_sky_view_factors(geom, 400).mean()
        assert mean_sky == pytest.approx(1.0 - faces / geom.pitch, abs=3e-3)

    def test_sky_view_factors_bounded(self, ns_geometry):
        vf = ground_sky_view_factors(ns_geometry, 50)
        assert vf.shape == (50,)
        assert np.all((vf > 0) & (vf < 1))

    def test_mean_sky_view_grows_with_pitch(self):
        means = [
            ground_sky_view_factors(ArrayGeometry(pitch_over_height=p), 40).mean()
            for p in (1.5, 3.0, 6.0)
        ]
        assert means == sorted(means)

    def test_against_ray_sampling(self):
        """Ground-point sky view within 1% of Monte-Carlo rays."""
        geom = ArrayGeometry(tilt=30.0, pitch_over_height=2.0, clearance_over_height=0.5)
        for x in (0.3, 1.1, 1.7):
            mc = mc_ground_sky_view_factor(geom, x, rays=100_000, rng=np.random.default_rng(11))
            assert mc == pytest.approx(ground_point_view_factors(geom, x).sky, abs=0.01)


class TestIrradiance:
    """Test ground and plane-of-array irradiance."""

    def test_ground_profile_open_sun(self, ns_geometry):
        """Lit points receive DNI sin(el) plus diffuse; shaded ones only diffuse."""
        sun = SunPosition(60.0, 180.0)
        profile = ground_par_profile(ns_geometry, sun, dni=800.0, dhi=100.0, n_points=60)
        beam_h = 800.0 * math.sin(math.radians(60.0))
        assert len(profile) == 60
        assert set(np.round(profile.direct, 9)) <= {0.0, round(beam_h, 9)}
        assert (profile.direct == 0).any() and (profile.direct > 0).any()
        assert np.all(profile.diffuse <= 100.0)

    @pytest.mark.parametrize(
        "geom,sun",
        [
            (
                ArrayGeometry(tilt=30.0, pitch_over_height=6.0, clearance_over_height=2.5),
                SunPosition(40.0, 180.0),
            ),
            (
                ArrayGeometry(tilt=30.0, pitch_over_height=6.0, clearance_over_height=2.5),
                SunPosition(35.0, 150.0),
            ),
            (
                ArrayGeometry(
                    orientation=Orientation.EW_VERTICAL,
                    tilt=90.0,
                    pitch_over_height=6.0,
                    clearance_over_height=0.5,
                ),
                SunPosition(30.0, 100.0),
            ),
        ],
    )
    def test_ground_beam_loses_only_the_intercepted_light(self, geom, sun):
        """Pitch-averaged ground beam is the horizontal beam minus the module shadow."""
        profile = ground_par_profile(geom, sun, dni=800.0, dhi=0.0, n_points=600)
        el = math.radians(sun.elevation)
        sx = math.cos(el) * math.cos(math.radians(sun.azimuth - geom.front_azimuth))
        sz = math.sin(el)
        t = math.radians(geom.tilt)
        shadow = abs(math.sin(t) * sx + math.cos(t) * sz) / sz
        beam_h = 800.0 * sz
        expected = beam_h * (1.0 - shadow / geom.pitch)
        assert profile.direct.mean() == pytest.approx(expected, abs=2e-3 * beam_h)

    def test_night_ground_is_dark(self, ns_geometry):
        profile = ground_par_profile(ns_geometry, SunPosition(-10.0, 0.0), 0.0, 0.0, 32)
        assert profile.mean == 0.0

    def test_too_few_points_rejected(self, ns_geometry):
        with pytest.raises(ValidationError):
            ground_par_profile(ns_geometry, SunPosition(30.0, 180.0), 500.0, 50.0, n_points=8)

    def test_south_face_beats_north_face_at_noon(self, ns_geometry):
        irr = module_irradiance(ns_geometry, SunPosition(55.0, 180.0), 850.0, 100.0, 48)
        assert irr.front > irr.back > 0.0

    def test_year_matches_single_hours(self, ns_geometry, weather):
        """The vectorised year equals hour-by-hour evaluation."""
        optics = simulate_year(ns_geometry, weather, n_points=32)
        for hour in (4000, 4005, 8000):
            sun = weather.sun[hour]
            irr = module_irradiance(
                ns_geometry, sun, weather.dni[hour], weather.dhi[hour], n_points=32
            )
            profile = ground_par_profile(
                ns_geometry, sun, weather.dni[hour], weather.dhi[hour], n_points=32
            )
            assert optics.front[hour] == pytest.approx(irr.front, rel=1e-9, abs=1e-9)
            assert optics.back[hour] == pytest.approx(irr.back, rel=1e-9, abs=1e-9)
            np.testing.assert_allclose(optics.ground_total[hour], profile.total, atol=1e-9)

    def test_linear_in_irradiance(self, ew_geometry, weather):
        """Doubling DNI and DHI doubles every output."""
        doubled = WeatherSeries(weather.timestamps, 2 * weather.dni, 2 * weather.dhi, weather.site)
        base = simulate_year(ew_geometry, weather, n_points=24)
        twice = simulate_year(ew_geometry, doubled, n_points=24)
        np.testing.assert_allclose(twice.front, 2 * base.front, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(twice.ground_total, 2 * base.ground_total, rtol=1e-12, atol=1e-12)
