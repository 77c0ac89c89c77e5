#!/usr/bin/env python
"""Setup script for the AV feasibility simulator."""

from setuptools import setup, find_packages

# Main dependencies
REQUIRED = [
    "sqlalchemy>=2.0.0",
    "click>=8.2.0",
    "python-dotenv>=1.0.0",
    "numpy>=1.24",
    "pandas>=1.5.0",
    "scipy>=1.9",
    "tabulate>=0.8.9",
    "tomli>=2.0; python_version < '3.11'",
]

# Optional dependencies
EXTRAS = {
    "dev": [
        "pytest>=6.0.0",
        "pytest-cov>=2.12.0",
        "black>=21.5b2",
        "mypy>=0.812",
    ],
}

setup(
    name="av_feasibility",
    version="0.1.0",
    description="Techno-economic feasibility of agrivoltaic arrays against ground-mounted PV",
    author="Slimane Lakehal",
    author_email="lakehalslimane@gmail.com",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"av_feasibility.data": ["*.toml", "*.csv"]},
    python_requires=">=3.10",
    install_requires=REQUIRED,
    extras_require=EXTRAS,
    entry_points={
        "console_scripts": [
            "av-feasibility=av_feasibility.cli.main:cli",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering",
    ],
    keywords="agrivoltaics, photovoltaics, bifacial, view factor, LCOE, crop yield",
)
