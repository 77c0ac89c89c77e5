"""Optics Cache

Memoises the expensive part of a design point (one optical year per array
geometry) in memory and, optionally, in a SQLite/SQLAlchemy database.
"""
from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import asdict, dataclass
from typing import Callable, Optional

from sqlalchemy import Engine

from av_feasibility.database.base import get_db_session, get_engine, init_db
from av_feasibility.models.array import ArrayGeometry
from av_feasibility.models.crop import CropRotation
from av_feasibility.models.energy import ModuleParams
from av_feasibility.models.optics_record import OpticsRecord
from av_feasibility.models.solar import WeatherSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OpticsEntry:
    """Annual module yield and per-season Y_PAR of one geometry."""

    yy: float
    y_par: tuple[float, ...]


def cache_key(
    geom: ArrayGeometry,
    weather: WeatherSeries,
    module: ModuleParams,
    rotation: CropRotation,
    n_points: int,
    masking_rows: int,
) -> str:
    """sha256 over every input that changes an OpticsEntry."""
    payload = {
        "geometry": geom.as_dict(),
        "weather": weather.fingerprint,
        "module": asdict(module),
        "rotation": [
            [season.name, list(season.months), season.par_saturation] for season in rotation
        ],
        "n_points": n_points,
        "masking_rows": masking_rows,
    }
    text = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class OpticsCache:
    """Thread-safe memo of OpticsEntry values.

    Args:
        engine: SQLAlchemy engine of the persistent cache; None keeps
            results in memory only
    """

    def __init__(self, engine: Optional[Engine] = None) -> None:
        self._entries: dict[str, OpticsEntry] = {}
        self._lock = threading.Lock()
        self._engine = engine
        self.hits = 0
        self.misses = 0
        if engine is not None:
            init_db(engine)

    @classmethod
    def from_location(cls, location: Optional[str]) -> "OpticsCache":
        """In-memory cache for None, persistent cache for a path or URL."""
        if not location:
            return cls()
        return cls(get_engine(location))

    @property
    def persistent(self) -> bool:
        return self._engine is not None

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def get(self, key: str) -> Optional[OpticsEntry]:
        with self._lock:
            entry = self._entries.get(key)
        if entry is not None or self._engine is None:
            return entry

        with get_db_session(self._engine) as session:
            record = session.get(OpticsRecord, key)
            if record is None:
                return None
            entry = OpticsEntry(yy=record.yy, y_par=tuple(record.y_par))
        with self._lock:
            self._entries.setdefault(key, entry)
        return entry

    def put(self, key: str, entry: OpticsEntry, geom: ArrayGeometry) -> None:
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = entry
            if self._engine is None:
                return
            with get_db_session(self._engine) as session:
                if session.get(OpticsRecord, key) is None:
                    session.add(
                        OpticsRecord(
                            key=key,
                            orientation=geom.orientation.value,
                            pitch_over_height=geom.pitch_over_height,
                            tilt=geom.tilt,
                            yy=entry.yy,
                            y_par_json=json.dumps(list(entry.y_par)),
                        )
                    )

    def get_or_compute(
        self, key: str, geom: ArrayGeometry, compute: Callable[[], OpticsEntry]
    ) -> OpticsEntry:
        """Return the cached entry for ``key`` or compute and store it.

        Two threads missing the same key may both compute; the first
        insert wins.
        """
        entry = self.get(key)
        if entry is not None:
            with self._lock:
                self.hits += 1
            logger.debug("optics cache hit %s %r", key[:12], geom)
            return entry
        with self._lock:
            self.misses += 1
        logger.debug("optics cache miss %s %r", key[:12], geom)
        entry = compute()
        self.put(key, entry, geom)
        return entry
