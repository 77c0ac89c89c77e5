"""Persistent Optics Cache Record

One row per simulated array column: the annual module yield and the
seasonal crop yields, keyed by a hash of every input that affects them.
"""
from __future__ import annotations

import json
from datetime import datetime

from sqlalchemy import Column, DateTime, Float, String, Text

from av_feasibility.database.base import Base


class OpticsRecord(Base):
    """Cached optical/crop simulation result for one geometry."""
    __tablename__ = "optics_results"

    key = Column(String(64), primary_key=True)
    orientation = Column(String(16), nullable=False)
    pitch_over_height = Column(Float, nullable=False)
    tilt = Column(Float, nullable=False)
    yy = Column(Float, nullable=False)  # kWh/m²-module/yr
    y_par_json = Column(Text, nullable=False)  # per-season Y_PAR, rotation order
    created_at = Column(DateTime, default=datetime.utcnow)

    @property
    def y_par(self) -> list[float]:
        return [float(v) for v in json.loads(self.y_par_json)]

    def __repr__(self) -> str:
        return (
            f"<OpticsRecord(key={self.key[:12]}, {self.orientation}, "
            f"p/h={self.pitch_over_height}, yy={self.yy:.2f})>"
        )
