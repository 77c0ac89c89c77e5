"""Module electrical parameters and annual yield."""
from __future__ import annotations

from dataclasses import dataclass

from av_feasibility.exceptions import ValidationError
from av_feasibility.models.array import Orientation


@dataclass(frozen=True)
class ModuleParams:
    """Lumped electrical conversion of a module.

    Vertical EW rows carry bifacial modules; tilted NS rows, the GMPV
    baseline included, carry monofacial ones unless ``tilted_bifaciality``
    says otherwise.

    Attributes:
        efficiency: STC efficiency applied to front irradiance
        bifaciality: Rear/front efficiency ratio of vertical rows
        performance_ratio: Lumped system losses
        tilted_bifaciality: Rear/front efficiency ratio of tilted rows
    """

    efficiency: float = 0.20
    bifaciality: float = 0.9
    performance_ratio: float = 0.80
    tilted_bifaciality: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 < self.efficiency <= 1.0:
            raise ValidationError(f"must be in (0, 1], got {self.efficiency}", "efficiency")
        for name in ("bifaciality", "tilted_bifaciality"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"must be in [0, 1], got {value}", name)
        if not 0.0 < self.performance_ratio <= 1.0:
            raise ValidationError(
                f"must be in (0, 1], got {self.performance_ratio}", "performance_ratio"
            )

    def bifaciality_for(self, orientation: Orientation) -> float:
        """Rear/front ratio applied to rows of ``orientation``."""
        if Orientation(orientation) is Orientation.NS_TILTED:
            return self.tilted_bifaciality
        return self.bifaciality


@dataclass(frozen=True)
class AnnualYield:
    """Annual electricity per unit module area, kWh/m²/yr."""

    yy: float

    def __post_init__(self) -> None:
        if not self.yy >= 0.0:
            raise ValidationError(f"must be >= 0, got {self.yy}", "yy")

    def __float__(self) -> float:
        return self.yy
