"""Crop Models

Crop seasons, rotations and the two bundled Khanewal rotations: a high
value vegetable farm and a low value cotton/wheat farm. Open-field profits
are in USD per hectare per season.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from av_feasibility.exceptions import ValidationError

# Light saturation points, µmol m⁻² s⁻¹
DEFAULT_PAR_SATURATION = {
    "tomato": 1400.0,
    "cauliflower": 900.0,
    "garlic": 800.0,
    "wheat": 1200.0,
    "cotton": 1600.0,
}


@dataclass(frozen=True)
class CropSeason:
    """One crop grown over a (possibly year-wrapping) span of months."""

    name: str
    start_month: int
    end_month: int
    open_profit: float
    par_saturation: float

    def __post_init__(self) -> None:
        for attr in ("start_month", "end_month"):
            month = getattr(self, attr)
            if not (isinstance(month, int) and 1 <= month <= 12):
                raise ValidationError(f"must be an integer month 1-12, got {month!r}", attr)
        if not self.open_profit >= 0.0:
            raise ValidationError(f"must be >= 0, got {self.open_profit}", "open_profit")
        if not self.par_saturation > 0.0:
            raise ValidationError(
                f"must be > 0, got {self.par_saturation}", "par_saturation"
            )

    @property
    def months(self) -> tuple[int, ...]:
        """Calendar months covered, in growing order (Oct-Mar -> 10,11,12,1,2,3)."""
        span = (self.end_month - self.start_month) % 12
        return tuple((self.start_month - 1 + i) % 12 + 1 for i in range(span + 1))

    def __repr__(self) -> str:
        return (
            f"<CropSeason({self.name}, months={self.start_month}-{self.end_month}, "
            f"profit={self.open_profit})>"
        )


@dataclass(frozen=True)
class CropRotation:
    """Ordered crop seasons; no month belongs to two seasons."""

    seasons: tuple[CropSeason, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "seasons", tuple(self.seasons))
        if not self.seasons:
            raise ValidationError("a rotation needs at least one season", "seasons")
        seen: dict[int, str] = {}
        for season in self.seasons:
            for month in season.months:
                if month in seen:
                    raise ValidationError(
                        f"month {month} is in both {seen[month]!r} and {season.name!r}",
                        "seasons",
                    )
                seen[month] = season.name

    def __iter__(self) -> Iterator[CropSeason]:
        return iter(self.seasons)

    def __len__(self) -> int:
        return len(self.seasons)

    @property
    def open_profit(self) -> float:
        """Open-field profit of the full rotation, USD/ha/yr."""
        return float(sum(s.open_profit for s in self.seasons))


@dataclass(frozen=True)
class SeasonalYield:
    """Relative useful-PAR yield of one season under the array."""

    season: str
    y_par: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.y_par <= 1.0 + 1e-12:
            raise ValidationError(f"must be in [0, 1], got {self.y_par}", "y_par")


def make_rotation(rows: Sequence[tuple[str, int, int, float]]) -> CropRotation:
    """Build a rotation from (crop, start, end, profit) rows with default saturation."""
    return CropRotation(
        tuple(
            CropSeason(name, start, end, profit, DEFAULT_PAR_SATURATION[name])
            for name, start, end, profit in rows
        )
    )


HIGH_VALUE_ROTATION = make_rotation(
    [
        ("tomato", 4, 6, 948.81),
        ("cauliflower", 7, 9, 1145.98),
        ("garlic", 10, 3, 7097.54),
    ]
)

LOW_VALUE_ROTATION = make_rotation(
    [
        ("cotton", 4, 9, 69.88),
        ("wheat", 10, 3, 228.43),
    ]
)
