"""SQLAlchemy Base Configuration

Declarative base, engine construction and session handling for the
persistent optics cache. The cache is opt-in: nothing touches the disk
unless a database URL or path is configured.
"""
from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, declarative_base, sessionmaker

logger = logging.getLogger(__name__)

Base = declarative_base()

# Used when the cache is enabled without an explicit location
DEFAULT_DB_PATH = os.path.join(
    os.path.expanduser("~"),
    ".av_feasibility",
    "optics_cache.db",
)


def resolve_db_url(location: Optional[str] = None) -> str:
    """Turn a URL, a file path or None into a SQLAlchemy URL.

    Args:
        location: ``sqlite:///...``-style URL, plain file path, or None for
            the default path in the user's home directory

    Returns:
        SQLAlchemy database URL
    """
    if location and "://" in location:
        return location
    path = Path(location) if location else Path(DEFAULT_DB_PATH)
    path.parent.mkdir(parents=True, exist_ok=True)
    return f"sqlite:///{path}"


def get_engine(db_url: Optional[str] = None) -> Engine:
    """Create and return a SQLAlchemy engine.

    Args:
        db_url: Database URL or file path; None uses the default SQLite file

    Returns:
        SQLAlchemy Engine instance
    """
    url = resolve_db_url(db_url)
    logger.debug("opening optics cache database %s", url)
    return create_engine(url, echo=False)


def get_session_factory(engine: Optional[Engine] = None) -> sessionmaker:
    """Create a session factory bound to ``engine``."""
    if engine is None:
        engine = get_engine()
    return sessionmaker(bind=engine)


@contextmanager
def get_db_session(engine: Optional[Engine] = None) -> Iterator[Session]:
    """Context manager for database sessions.

    Commits on success, rolls back on error and always closes.

    Example:
        with get_db_session(engine) as session:
            record = session.get(OpticsRecord, key)
    """
    if engine is None:
        engine = get_engine()

    session = get_session_factory(engine)()
    try:
        yield session
        session.commit()
    except Exception:
        session.rollback()
        raise
    finally:
        session.close()


def init_db(engine: Optional[Engine] = None) -> None:
    """Create the cache tables if they do not exist."""
    if engine is None:
        engine = get_engine()

    # Register the models with Base before creating tables
    from av_feasibility.models import optics_record  # noqa: F401

    Base.metadata.create_all(engine)
