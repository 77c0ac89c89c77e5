from concurrent.futures import ThreadPoolExecutor

import pytest

from av_feasibility.database.base import get_db_session, get_engine, resolve_db_url
from av_feasibility.models import HIGH_VALUE_ROTATION, LOW_VALUE_ROTATION, ModuleParams
from av_feasibility.models.optics_record import OpticsRecord
from av_feasibility.services.optics_cache import OpticsCache, OpticsEntry, cache_key


@pytest.fixture
def db_path(tmp_path):
    return tmp_path / "cache" / "optics.db"


@pytest.fixture
def entry():
    return OpticsEntry(yy=431.25, y_par=(0.91, 0.875, 1.0 / 3.0))


class TestCacheKey:
    """Test that every optical input changes the key."""

    def test_stable(self, ns_geometry, weather):
        args = (ns_geometry, weather, ModuleParams(), HIGH_VALUE_ROTATION, 48, 3)
        assert cache_key(*args) == cache_key(*args)

    @pytest.mark.parametrize(
        "change",
        [
            lambda g, mp, rot, n: (g.with_pitch(4.0), mp, rot, n),
            lambda g, mp, rot, n: (g.with_tilt(35.0), mp, rot, n),
            lambda g, mp, rot, n: (g, ModuleParams(bifaciality=0.0), rot, n),
            lambda g, mp, rot, n: (g, mp, LOW_VALUE_ROTATION, n),
            lambda g, mp, rot, n: (g, mp, rot, 96),
        ],
    )
    def test_sensitive(self, ns_geometry, weather, change):
        base = (ns_geometry, ModuleParams(), HIGH_VALUE_ROTATION, 48)
        geom, mp, rotation, n = change(*base)
        assert cache_key(ns_geometry, weather, *base[1:], 3) != cache_key(
            geom, weather, mp, rotation, n, 3
        )


class TestOpticsCache:
    """Test the in-memory and persistent cache."""

    def test_compute_once(self, ns_geometry, entry):
        cache = OpticsCache()
        calls = []

        def compute():
            calls.append(1)
            return entry

        assert cache.get_or_compute("k", ns_geometry, compute) == entry
        assert cache.get_or_compute("k", ns_geometry, compute) == entry
        assert len(calls) == 1
        assert (cache.hits, cache.misses) == (1, 1)
        assert len(cache) == 1
        assert not cache.persistent

    def test_counters_under_threads(self, ns_geometry, entry):
        """Every lookup is counted once when lookups race."""
        cache = OpticsCache()
        keys = [f"k{i % 4}" for i in range(200)]
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda k: cache.get_or_compute(k, ns_geometry, lambda: entry), keys))
        assert cache.hits + cache.misses == len(keys)
        assert cache.misses >= 4
        assert len(cache) == 4

    def test_persistent_round_trip(self, ns_geometry, entry, db_path):
        """A new cache on the same database file sees earlier results exactly."""
        writer = OpticsCache.from_location(str(db_path))
        writer.put("abc", entry, ns_geometry)
        assert writer.persistent

        reader = OpticsCache.from_location(str(db_path))
        assert reader.get("abc") == entry
        assert reader.get("missing") is None

    def test_record_metadata(self, ns_geometry, entry, db_path):
        engine = get_engine(str(db_path))
        OpticsCache(engine).put("abc", entry, ns_geometry)
        with get_db_session(engine) as session:
            record = session.get(OpticsRecord, "abc")
            assert record.orientation == "NS_tilted"
            assert record.pitch_over_height == 3.0
            assert record.y_par == list(entry.y_par)
            assert "NS_tilted" in repr(record)

    def test_first_insert_wins(self, ns_geometry, entry):
        cache = OpticsCache()
        cache.put("k", entry, ns_geometry)
        cache.put("k", OpticsEntry(yy=1.0, y_par=(0.5,)), ns_geometry)
        assert cache.get("k") == entry

    def test_memory_only_by_default(self):
        assert not OpticsCache.from_location(None).persistent
        assert not OpticsCache.from_location("").persistent


class TestDatabaseUrl:
    def test_url_passes_through(self):
        assert resolve_db_url("postgresql://u@h/db") == "postgresql://u@h/db"

    def test_path_becomes_sqlite(self, db_path):
        assert resolve_db_url(str(db_path)) == f"sqlite:///{db_path}"
        assert db_path.parent.is_dir()
