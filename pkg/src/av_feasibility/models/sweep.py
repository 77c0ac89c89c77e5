"""Design-space sweep types."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Optional, Sequence

import numpy as np

from av_feasibility.exceptions import ValidationError
from av_feasibility.models.array import Orientation

if TYPE_CHECKING:
    from av_feasibility.models.scenario import Scenario


class Metric(str, Enum):
    """Quantities a sweep can tabulate."""
    RHO = "rho"
    DELTA_FIT_TH = "delta_fit_th"
    PSI = "psi"
    Y_PAR = "y_par"
    Y_PV = "y_pv"
    RHO_EFFECTIVE = "rho_effective"
    LCOE_RATIO = "lcoe_ratio"


def axis(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic axis, rounded to avoid float drift (2, 2.25, ... 6)."""
    if step <= 0:
        raise ValidationError(f"must be > 0, got {step}", "step")
    if stop < start:
        raise ValidationError(f"stop {stop} is below start {start}", "stop")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


DEFAULT_PH_AXIS = axis(2.0, 6.0, 0.25)
DEFAULT_ML_AXIS = axis(5.0, 50.0, 2.5)


def _check_axis(values: Sequence[float], name: str, minimum: Optional[float]) -> None:
    if len(values) == 0:
        raise ValidationError("axis is empty", name)
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("axis values must be finite", name)
    if np.any(np.diff(arr) <= 0):
        raise ValidationError("axis must be strictly increasing", name)
    if minimum is not None and arr[0] < minimum:
        raise ValidationError(f"values must be >= {minimum}", name)


@dataclass(frozen=True)
class SweepSpec:
    """Grid over (p/h, M_L) for one metric of one scenario."""

    scenario: "Scenario"
    metric: Metric = Metric.RHO
    ph_axis: tuple[float, ...] = DEFAULT_PH_AXIS
    ml_axis: tuple[float, ...] = DEFAULT_ML_AXIS

    def __post_init__(self) -> None:
        object.__setattr__(self, "metric", Metric(self.metric))
        object.__setattr__(self, "ph_axis", tuple(float(v) for v in self.ph_axis))
        object.__setattr__(self, "ml_axis", tuple(float(v) for v in self.ml_axis))
        _check_axis(self.ph_axis, "ph_axis", 1.0)
        _check_axis(self.ml_axis, "ml_axis", None)
        if self.ml_axis[0] <= 0:
            raise ValidationError("values must be > 0", "ml_axis")


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Metric values on a (p/h, M_L) grid; rows follow p/h, columns M_L."""

    ph_axis: tuple[float, ...]
    ml_axis: tuple[float, ...]
    metric: Metric
    values: np.ndarray
    scenario_hash: str = ""
    kappa: float = float("nan")
    orientation: Optional[Orientation] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(self.ph_axis), len(self.ml_axis)):
            raise ValidationError(
                f"values shape {values.shape} does not match axes "
                f"({len(self.ph_axis)}, {len(self.ml_axis)})",
                "values",
            )
        object.__setattr__(self, "values", values)

    def column(self, ph: float) -> np.ndarray:
        """Values along M_L at one p/h."""
        return self.values[self.ph_axis.index(ph)]

    def cell(self, ph: float, m_l: float) -> float:
        return float(self.values[self.ph_axis.index(ph), self.ml_axis.index(m_l)])

    def __repr__(self) -> str:
        return (
            f"<SweepGrid({self.metric.value}, {len(self.ph_axis)}x{len(self.ml_axis)}, "
            f"orientation={self.orientation.value if self.orientation else None})>"
        )
