"""Configuration and logging helpers."""

from av_feasibility.utils.logging import configure_logging
from av_feasibility.utils.settings import Settings, load_settings

__all__ = ["Settings", "configure_logging", "load_settings"]
