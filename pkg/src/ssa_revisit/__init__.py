"""Analytical revisit and coverage evaluation for in-orbit optical SSA constellations."""

from ssa_revisit.orbital_mechanics import (
    CONSTANTS,
    INFINITE_PERIOD,
    OrbitGeometry,
    PhysicalConstants,
)
from ssa_revisit.sensor_model import SensorSpec
from ssa_revisit.constellation import ConstellationSpec, preset
from ssa_revisit.revisit_engine import EngineConfig, RevisitReport, revisit_report

__all__ = [
    "CONSTANTS",
    "INFINITE_PERIOD",
    "OrbitGeometry",
    "PhysicalConstants",
    "SensorSpec",
    "ConstellationSpec",
    "preset",
    "EngineConfig",
    "RevisitReport",
    "revisit_report",
]

__version__ = "0.1.0"
