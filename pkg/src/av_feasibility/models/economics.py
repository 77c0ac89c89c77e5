"""Economic Models

Cost structure, the AV/GMPV system pair that the criterion compares, and
the full feasibility result.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Optional

from av_feasibility.exceptions import ValidationError
from av_feasibility.models.array import ArrayGeometry


@dataclass(frozen=True)
class EconParams:
    """Lifetime cost and revenue parameters.

    Attributes:
        c_m_pv: GMPV module-technology cost, USD per m² of module
        m_l_pv: M_L = c_M / c_L for GMPV
        kappa: AV module-technology cost relative to GMPV
        d: Yearly depreciation rate
        r: Yearly discount rate
        lifetime_years: Project lifetime Y
        fit_pv: Base feed-in tariff, USD/kWh
    """

    c_m_pv: float = 100.0
    m_l_pv: float = 20.0
    kappa: float = 1.38
    d: float = 0.01
    r: float = 0.05
    lifetime_years: int = 25
    fit_pv: float = 0.07

    def __post_init__(self) -> None:
        if not self.c_m_pv > 0:
            raise ValidationError(f"must be > 0, got {self.c_m_pv}", "c_m_pv")
        if not self.m_l_pv > 0:
            raise ValidationError(f"must be > 0, got {self.m_l_pv}", "m_l_pv")
        if not self.kappa > 0:
            raise ValidationError(f"must be > 0, got {self.kappa}", "kappa")
        if not 0.0 <= self.d < 1.0:
            raise ValidationError(f"must be in [0, 1), got {self.d}", "depreciation")
        if not 0.0 <= self.r < 1.0:
            raise ValidationError(f"must be in [0, 1), got {self.r}", "discount")
        if not (isinstance(self.lifetime_years, int) and self.lifetime_years >= 1):
            raise ValidationError(
                f"must be an integer >= 1, got {self.lifetime_years!r}", "lifetime_years"
            )
        if not self.fit_pv >= 0:
            raise ValidationError(f"must be >= 0, got {self.fit_pv}", "fit_pv")

    @property
    def c_l(self) -> float:
        """Land-related cost per m² of land."""
        return self.c_m_pv / self.m_l_pv

    def with_m_l(self, m_l_pv: float) -> "EconParams":
        return replace(self, m_l_pv=m_l_pv)

    def with_kappa(self, kappa: float) -> "EconParams":
        return replace(self, kappa=kappa)


@dataclass(frozen=True)
class SystemPair:
    """AV system and its equal-energy GMPV baseline.

    Attributes:
        av_geometry: Agrivoltaic array
        gmpv_geometry: Ground-mounted baseline array
        yy_av: AV annual yield, kWh/m²-module/yr
        yy_pv: GMPV annual yield, kWh/m²-module/yr
        p_c: AV crop profit (already scaled by Y_PAR), USD/ha/yr
        p_c_open: Open-field crop profit of the same rotation, USD/ha/yr
    """

    av_geometry: ArrayGeometry
    gmpv_geometry: ArrayGeometry
    yy_av: float
    yy_pv: float
    p_c: float
    p_c_open: float

    def __post_init__(self) -> None:
        if not self.yy_pv > 0:
            raise ValidationError(f"must be > 0, got {self.yy_pv}", "yy_pv")
        if not self.yy_av >= 0:
            raise ValidationError(f"must be >= 0, got {self.yy_av}", "yy_av")
        if not (self.p_c >= 0 and self.p_c_open >= 0):
            raise ValidationError("crop profits must be >= 0", "p_c")

    @property
    def y_pv(self) -> float:
        return self.yy_av / self.yy_pv

    @property
    def y_par(self) -> float:
        """Profit-weighted relative crop yield."""
        if self.p_c_open == 0:
            return math.nan
        return self.p_c / self.p_c_open

    @property
    def ph_av(self) -> float:
        return self.av_geometry.pitch_over_height

    @property
    def ph_pv(self) -> float:
        return self.gmpv_geometry.pitch_over_height


@dataclass(frozen=True)
class FeasibilityResult:
    """All terms of the AV vs GMPV comparison for one design point."""

    rho: float
    kappa: float
    p_c_norm: float
    c_l_norm: float
    psi: float
    y_par: float
    y_pv: float
    beta: float
    chi: float
    delta_fit: float
    delta_fit_th: float
    delta_fit_th_pct: float
    rho_effective: float
    feasible_vs_gmpv: bool
    feasible_vs_open: bool
    lcoe_av: float
    lcoe_pv: float
    m_l_pv: float
    pitch_over_height: float

    @property
    def kappa_threshold(self) -> float:
        """Largest AV cost ratio still matching GMPV at zero ΔFIT."""
        return self.rho

    @property
    def margin_pct(self) -> float:
        """Extra module-technology spend the food-energy profit can carry, %.

        Positive when rho > 1: AV can cost (rho - 1) * 100 % more per m² of
        module than GMPV and still break even at zero ΔFIT. Negative values
        are the shortfall, i.e. the sign is the opposite of the (1 - rho)
        cost-excess convention.
        """
        return (self.rho - 1.0) * 100.0

    @property
    def lcoe_ratio(self) -> float:
        return self.lcoe_av / self.lcoe_pv

    def as_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kappa_threshold"] = self.kappa_threshold
        data["margin_pct"] = self.margin_pct
        data["lcoe_ratio"] = self.lcoe_ratio
        return data

    def __repr__(self) -> str:
        verdict = "feasible" if self.feasible_vs_gmpv else "infeasible"
        return f"<FeasibilityResult(rho={self.rho:.4f}, kappa={self.kappa}, {verdict})>"


def optional_float(value: Optional[float]) -> Optional[float]:
    """Map NaN to None for serialisation."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value
