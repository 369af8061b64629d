"""Python access to the p2h harmonic model and scheduler."""

import json

from ._core import (
    ElectrolyzerSpec,
    ModelError,
    OperatingPoint,
    Scenario,
    ScenarioError,
    harmonic,
    harmonic_fft,
    load_scenario,
    operating_point,
    plant_efficiency,
    stack_power,
    stack_voltage,
)
from . import _core


def region(scenario):
    return json.loads(_core.region_json(scenario))


def compare(scenario):
    return json.loads(_core.compare_json(scenario))


__all__ = [
    "ElectrolyzerSpec", "ModelError", "OperatingPoint", "Scenario", "ScenarioError",
    "compare", "harmonic", "harmonic_fft", "load_scenario", "operating_point",
    "plant_efficiency", "region", "stack_power", "stack_voltage",
]
