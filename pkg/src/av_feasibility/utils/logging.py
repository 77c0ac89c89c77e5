"""Logging setup for the command line."""
from __future__ import annotations

import logging
import sys
from typing import Union

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_HANDLER_NAME = "av_feasibility.stderr"


def configure_logging(level: Union[int, str] = logging.WARNING) -> logging.Logger:
    """Attach a single stderr handler to the package logger.

    Calling it again only updates the level and the stream.

    Args:
        level: Logging level name or number

    Returns:
        The package root logger
    """
    if isinstance(level, str):
        name = level
        level = logging.getLevelName(name.upper())
        if not isinstance(level, int):
            raise ValueError(f"unknown log level: {name}")

    root = logging.getLogger("av_feasibility")
    existing = [
        h
        for h in root.handlers
        if isinstance(h, logging.StreamHandler) and h.get_name() == _HANDLER_NAME
    ]
    if existing:
        # follow the current stderr (it is swapped by test runners)
        existing[0].setStream(sys.stderr)
    else:
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(_HANDLER_NAME)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    root.setLevel(level)
    return root
