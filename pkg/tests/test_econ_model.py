import logging

import numpy as np
import pytest

from av_feasibility.exceptions import DegenerateInputError
from av_feasibility.models import ArrayGeometry, EconParams, Orientation, SystemPair
from av_feasibility.services import econ_model
from av_feasibility.services.oracles import cash_flow_suite, criterion_suite, random_pair


@pytest.fixture
def econ():
    """c_M = 100 USD/m², M_L = 20, kappa = 1.2 over 25 years."""
    return EconParams(c_m_pv=100.0, m_l_pv=20.0, kappa=1.2)


def _pair(yy_av=400.0, yy_pv=500.0, p_c=1000.0, p_c_open=2000.0, ph_av=3.0, ph_pv=2.0):
    return SystemPair(
        av_geometry=ArrayGeometry(
            orientation=Orientation.EW_VERTICAL, tilt=90.0, pitch_over_height=ph_av
        ),
        gmpv_geometry=ArrayGeometry(tilt=25.0, pitch_over_height=ph_pv),
        yy_av=yy_av,
        yy_pv=yy_pv,
        p_c=p_c,
        p_c_open=p_c_open,
    )


@pytest.fixture
def pair():
    return _pair()


class TestDiscounting:
    """Test the discount-depreciation sum and the LCOE."""

    def test_chi_without_depreciation(self):
        assert econ_model.chi(0.0, 0.05, 25) == pytest.approx(14.0939, abs=1e-4)

    def test_chi_without_discounting(self):
        assert econ_model.chi(0.0, 0.0, 25) == pytest.approx(25.0)

    def test_chi_with_depreciation(self, econ):
        q = 0.99 / 1.05
        assert econ_model.econ_chi(econ) == pytest.approx(q * (1 - q**25) / (1 - q))

    def test_lcoe_forms_agree(self):
        """c_M + c_L p/h over yy chi equals c_L (M_L + p/h) over yy chi."""
        chi = econ_model.chi(0.01, 0.05, 25)
        direct = econ_model.lcoe(130.0, 130.0 / 20.0, 3.0, 450.0, chi)
        via_ratio = econ_model.lcoe_from_ratio(20.0, 130.0 / 20.0, 3.0, 450.0, chi)
        assert direct == pytest.approx(via_ratio, rel=1e-12)

    def test_lcoe_zero_yield(self):
        with pytest.raises(DegenerateInputError):
            econ_model.lcoe(100.0, 5.0, 2.0, 0.0, 12.0)


class TestCriterion:
    """Test rho, the tariff threshold and psi."""

    def test_rho_by_hand(self, pair, econ):
        chi = econ_model.econ_chi(econ)
        c_l_norm = (3.0 - 0.8 * 2.0) / 20.0
        p_c_norm = 1000.0 * 3.0 * chi / (100.0 * 1e4)
        assert econ_model.rho(pair, econ) == pytest.approx(p_c_norm - c_l_norm + 0.8)

    def test_beta(self, pair, econ):
        assert econ_model.beta(pair, econ) == pytest.approx(
            100.0 / (400.0 * econ_model.econ_chi(econ))
        )

    def test_beta_zero_yield(self, econ):
        with pytest.raises(DegenerateInputError):
            econ_model.beta(_pair(yy_av=0.0), econ)

    def test_kappa_equal_to_rho_is_feasible(self, pair, econ):
        """The boundary itself counts as feasible, with no premium needed."""
        result = econ_model.feasibility(pair, econ.with_kappa(econ_model.rho(pair, econ)))
        assert result.feasible_vs_gmpv
        assert result.delta_fit_th == 0.0

    def test_threshold_closes_the_gap(self, pair, econ):
        """Paying exactly the threshold premium lands on the boundary."""
        base = econ_model.feasibility(pair, econ)
        assert not base.feasible_vs_gmpv
        assert base.delta_fit_th > 0

        at_threshold = econ_model.feasibility(pair, econ, base.delta_fit_th)
        assert at_threshold.rho_effective - econ.kappa == pytest.approx(0.0, abs=1e-12)
        assert at_threshold.psi == pytest.approx(pair.y_par, abs=1e-9)
        assert at_threshold.delta_fit_th == base.delta_fit_th

    def test_verdict_flips_at_threshold(self, pair, econ):
        th = econ_model.delta_fit_threshold(pair, econ)
        assert econ_model.feasibility(pair, econ, th * 1.001).feasible_vs_gmpv
        assert not econ_model.feasibility(pair, econ, th * 0.999).feasible_vs_gmpv

    def test_threshold_percent(self, pair, econ):
        result = econ_model.feasibility(pair, econ)
        assert result.delta_fit_th_pct == pytest.approx(100.0 * result.delta_fit_th / 0.07)

    def test_identical_systems(self):
        """AV identical to GMPV at kappa 1 and without crops is exactly at parity."""
        same = SystemPair(
            av_geometry=ArrayGeometry(pitch_over_height=2.0),
            gmpv_geometry=ArrayGeometry(pitch_over_height=2.0),
            yy_av=450.0,
            yy_pv=450.0,
            p_c=0.0,
            p_c_open=0.0,
        )
        result = econ_model.feasibility(same, EconParams(kappa=1.0))
        assert result.rho == pytest.approx(1.0)
        assert result.feasible_vs_gmpv
        assert np.isnan(result.psi)
        assert np.isnan(result.y_par)
        assert result.lcoe_ratio == pytest.approx(1.0)

    def test_psi_needs_open_field_profit(self, econ):
        with pytest.raises(DegenerateInputError):
            econ_model.psi(_pair(p_c=0.0, p_c_open=0.0), econ)

    def test_derived_fields(self, pair, econ):
        result = econ_model.feasibility(pair, econ)
        assert result.kappa_threshold == result.rho
        assert result.margin_pct == pytest.approx((result.rho - 1.0) * 100.0)
        data = result.as_dict()
        assert data["lcoe_ratio"] == pytest.approx(result.lcoe_av / result.lcoe_pv)
        assert data["pitch_over_height"] == 3.0

    def test_margin_sign(self, econ):
        """Surplus profit gives a positive margin, a shortfall a negative one."""
        rich = econ_model.feasibility(_pair(p_c=200_000.0, p_c_open=200_000.0), econ)
        poor = econ_model.feasibility(_pair(yy_av=200.0, p_c=0.0), econ)
        assert rich.rho > 1.0 and rich.margin_pct > 0.0
        assert poor.rho < 1.0 and poor.margin_pct < 0.0
        assert rich.margin_pct == pytest.approx(100.0 * (rich.kappa_threshold - 1.0))

    def test_random_pairs_cover_both_orientations(self):
        rng = np.random.default_rng(2)
        pairs = [random_pair(rng)[0] for _ in range(40)]
        seen = {pair.av_geometry.orientation for pair in pairs}
        assert seen == set(Orientation)
        for pair in pairs:
            if pair.av_geometry.orientation is Orientation.EW_VERTICAL:
                assert pair.av_geometry.tilt == 90.0

    def test_beats_gmpv_but_not_open_field(self, econ, caplog):
        """A very profitable open field makes AV lose to farming alone."""
        pair = _pair(yy_av=600.0, p_c=0.0, p_c_open=200_000.0)
        with caplog.at_level(logging.WARNING, logger="av_feasibility.services.econ_model"):
            result = econ_model.feasibility(pair, econ.with_kappa(1.0))
        assert result.feasible_vs_gmpv
        assert not result.feasible_vs_open
        assert "open-field" in caplog.text


class TestCashFlow:
    """Test the closed form against year-by-year cash flows."""

    @pytest.mark.parametrize("delta_fit", [0.0, 0.01, 0.05])
    def test_difference_equals_scaled_margin(self, pair, econ, delta_fit):
        """Profit difference is c_M (rho + delta_fit / beta - kappa) per m² of AV module."""
        margin = (
            econ_model.rho(pair, econ)
            + delta_fit / econ_model.beta(pair, econ)
            - econ.kappa
        )
        difference = econ_model.cash_flow_profit_difference(pair, econ, delta_fit)
        assert difference == pytest.approx(econ.c_m_pv * margin, rel=1e-9, abs=1e-9)

    def test_scales_with_area(self, pair, econ):
        one = econ_model.cash_flow_profit_difference(pair, econ)
        ten = econ_model.cash_flow_profit_difference(pair, econ, module_area_av=10.0)
        assert ten == pytest.approx(10.0 * one)

    def test_random_scenarios_agree(self):
        rng = np.random.default_rng(5)
        assert cash_flow_suite(rng, scenarios=300).passed
        assert criterion_suite(rng, scenarios=300).passed

    def test_perturbed_kappa_is_caught(self):
        """Shifting kappa on the cost side only must break the agreement."""
        outcome = cash_flow_suite(np.random.default_rng(5), 300, kappa_perturbation=0.25)
        assert not outcome.passed
        assert outcome.failures > 0
