"""
AV Feasibility - techno-economic comparison of agrivoltaics with ground-mounted PV

This package simulates array optics, energy and crop yields for agrivoltaic
row arrays and evaluates whether the combined food-energy profit makes them
economically equivalent to a conventional ground-mounted PV plant.
"""

__version__ = "0.1.0"
