"""Simulation services: sun, array optics, energy, crops, economics and sweeps."""
