"""Bundled scenario files and reference tables."""
