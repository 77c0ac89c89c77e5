"""Econ Model

Lifetime economics of an AV array against a GMPV baseline that produces
the same annual energy (A_M,PV = Y_PV * A_M,AV) and pays the same land
cost per m² of land.

Per m² of AV module, AV matches GMPV when

    kappa <= rho + delta_fit / beta,
    rho   = p_c_norm - c_l_norm + y_pv,
    beta  = c_m_pv / (yy_av * chi),

with the normalised land cost c_l_norm = (ph_av - y_pv * ph_pv) / M_L and
the normalised lifetime crop profit p_c_norm = p_c * ph_av * chi /
(c_m_pv * 1e4). ``psi`` and ``delta_fit_threshold`` are the same
inequality solved for Y_PAR and for the tariff premium.
"""
from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np

from av_feasibility.exceptions import DegenerateInputError
from av_feasibility.models.economics import EconParams, FeasibilityResult, SystemPair

logger = logging.getLogger(__name__)

M2_PER_HECTARE = 1e4


def chi(d: float, r: float, lifetime_years: int) -> float:
    """Sum over k = 1..Y of ((1 - d) / (1 + r)) ** k."""
    k = np.arange(1, lifetime_years + 1, dtype=float)
    return float(np.sum(((1.0 - d) / (1.0 + r)) ** k))


def econ_chi(econ: EconParams) -> float:
    return chi(econ.d, econ.r, econ.lifetime_years)


def lcoe(c_m: float, c_l: float, p_over_h: float, yy: float, chi_value: float) -> float:
    """Levelised cost of electricity, USD/kWh.

    Args:
        c_m: Module-technology cost per m² of module
        c_l: Land-related cost per m² of land
        p_over_h: Land area per module area
        yy: Annual yield, kWh/m²-module/yr
        chi_value: Discount-depreciation sum

    Raises:
        DegenerateInputError: ``yy * chi_value`` is zero
    """
    denominator = yy * chi_value
    if denominator == 0:
        raise DegenerateInputError("LCOE undefined for zero yield or zero chi")
    return (c_m + c_l * p_over_h) / denominator


def lcoe_from_ratio(
    m_l: float, c_l: float, p_over_h: float, yy: float, chi_value: float
) -> float:
    """LCOE written through M_L = c_M / c_L: c_L (M_L + p/h) / (yy chi)."""
    denominator = yy * chi_value
    if denominator == 0:
        raise DegenerateInputError("LCOE undefined for zero yield or zero chi")
    return c_l * (m_l + p_over_h) / denominator


def beta(pair: SystemPair, econ: EconParams) -> float:
    """Module cost per unit lifetime AV energy, USD/kWh."""
    energy = pair.yy_av * econ_chi(econ)
    if energy <= 0:
        raise DegenerateInputError("AV lifetime energy is zero; beta is undefined")
    return econ.c_m_pv / energy


def normalized_crop_profit(p_c: float, pair: SystemPair, econ: EconParams) -> float:
    """Lifetime crop profit per m² of AV module over c_m_pv."""
    return p_c * pair.ph_av * econ_chi(econ) / (econ.c_m_pv * M2_PER_HECTARE)


def normalized_terms(pair: SystemPair, econ: EconParams) -> tuple[float, float]:
    """Return (p_c_norm, c_l_norm)."""
    c_l_norm = (pair.ph_av - pair.y_pv * pair.ph_pv) / econ.m_l_pv
    p_c_norm = normalized_crop_profit(pair.p_c, pair, econ)
    return p_c_norm, c_l_norm


def rho(pair: SystemPair, econ: EconParams) -> float:
    """Normalised food-energy profit of AV relative to GMPV module cost."""
    p_c_norm, c_l_norm = normalized_terms(pair, econ)
    return p_c_norm - c_l_norm + pair.y_pv


def delta_fit_threshold(pair: SystemPair, econ: EconParams) -> float:
    """Smallest tariff premium (USD/kWh) giving AV parity with GMPV."""
    return max(0.0, beta(pair, econ) * (econ.kappa - rho(pair, econ)))


def psi(pair: SystemPair, econ: EconParams, delta_fit: float = 0.0) -> float:
    """Minimum Y_PAR for parity; the crop criterion reads Y_PAR >= psi.

    Raises:
        DegenerateInputError: the rotation has no open-field profit
    """
    if pair.p_c_open <= 0:
        raise DegenerateInputError("open-field crop profit is zero; psi is undefined")
    _, c_l_norm = normalized_terms(pair, econ)
    p_c_open_norm = normalized_crop_profit(pair.p_c_open, pair, econ)
    return (econ.kappa - pair.y_pv + c_l_norm - delta_fit / beta(pair, econ)) / p_c_open_norm


def feasible_vs_open(pair: SystemPair, econ: EconParams, delta_fit: float = 0.0) -> bool:
    """AV energy profit plus AV crops against open-field crops on the same land.

    Evaluated per m² of AV module with lifetime-discounted cash flows.
    """
    chi_value = econ_chi(econ)
    energy_profit = (econ.fit_pv + delta_fit) * pair.yy_av * chi_value - (
        econ.kappa * econ.c_m_pv + econ.c_l * pair.ph_av
    )
    crops_av = pair.p_c * pair.ph_av * chi_value / M2_PER_HECTARE
    crops_open = pair.p_c_open * pair.ph_av * chi_value / M2_PER_HECTARE
    return energy_profit + crops_av >= crops_open


def cash_flow_profit_difference(
    pair: SystemPair,
    econ: EconParams,
    delta_fit: float = 0.0,
    kappa_perturbation: float = 0.0,
    module_area_av: float = 1.0,
) -> float:
    """Lifetime profit of AV (energy + crops) minus that of GMPV, built year by year.

    Both plants produce the same energy: the GMPV module area is Y_PV times
    the AV module area. Costs are lifetime lumps without residual value.

    Args:
        pair: AV/GMPV pair
        econ: Economic parameters
        delta_fit: Tariff premium paid to AV
        kappa_perturbation: Added to kappa on the cost side only
        module_area_av: AV module area, m²

    Returns:
        Profit difference in USD
    """
    area_av = module_area_av
    area_pv = pair.y_pv * module_area_av
    land_av = pair.ph_av * area_av
    land_pv = pair.ph_pv * area_pv
    kappa = econ.kappa + kappa_perturbation

    profit_av = -(kappa * econ.c_m_pv * area_av + econ.c_l * land_av)
    profit_pv = -(econ.c_m_pv * area_pv + econ.c_l * land_pv)
    growth = (1.0 - econ.d) / (1.0 + econ.r)
    factor = 1.0
    for _ in range(econ.lifetime_years):
        factor *= growth
        profit_av += (econ.fit_pv + delta_fit) * pair.yy_av * area_av * factor
        profit_av += pair.p_c * land_av / M2_PER_HECTARE * factor
        profit_pv += econ.fit_pv * pair.yy_pv * area_pv * factor
    return profit_av - profit_pv


def feasibility(
    pair: SystemPair, econ: EconParams, delta_fit: float = 0.0
) -> FeasibilityResult:
    """Evaluate every criterion for one design point.

    ``delta_fit_th`` does not depend on the premium actually applied; AV
    is feasible against GMPV exactly when ``delta_fit >= delta_fit_th``.
    """
    chi_value = econ_chi(econ)
    p_c_norm, c_l_norm = normalized_terms(pair, econ)
    rho_value = p_c_norm - c_l_norm + pair.y_pv
    beta_value = beta(pair, econ)
    rho_effective = rho_value + delta_fit / beta_value
    threshold = max(0.0, beta_value * (econ.kappa - rho_value))
    psi_value = psi(pair, econ, delta_fit) if pair.p_c_open > 0 else math.nan
    vs_gmpv = econ.kappa <= rho_effective
    vs_open = feasible_vs_open(pair, econ, delta_fit)
    if vs_gmpv and not vs_open:
        logger.warning(
            "p/h=%g, M_L=%g: AV beats GMPV but not open-field farming",
            pair.ph_av,
            econ.m_l_pv,
        )

    return FeasibilityResult(
        rho=rho_value,
        kappa=econ.kappa,
        p_c_norm=p_c_norm,
        c_l_norm=c_l_norm,
        psi=psi_value,
        y_par=pair.y_par,
        y_pv=pair.y_pv,
        beta=beta_value,
        chi=chi_value,
        delta_fit=delta_fit,
        delta_fit_th=threshold,
        delta_fit_th_pct=100.0 * threshold / econ.fit_pv if econ.fit_pv > 0 else math.nan,
        rho_effective=rho_effective,
        feasible_vs_gmpv=vs_gmpv,
        feasible_vs_open=vs_open,
        lcoe_av=lcoe(econ.kappa * econ.c_m_pv, econ.c_l, pair.ph_av, pair.yy_av, chi_value),
        lcoe_pv=lcoe(econ.c_m_pv, econ.c_l, pair.ph_pv, pair.yy_pv, chi_value),
        m_l_pv=econ.m_l_pv,
        pitch_over_height=pair.ph_av,
    )
