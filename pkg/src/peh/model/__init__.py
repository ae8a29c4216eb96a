"""Bimorph cantilever plate model: geometry, assembly, and modal reduction."""

from peh.model.config import (
    BRONZE,
    PZT5A,
    DeviceConfig,
    Geometry,
    Material,
    Wiring,
    default_device,
    load_device_config,
    save_device_config,
)
from peh.model.assembly import DiscreteOperators, assemble_plate, capacitance
from peh.model.modal import ReducedModel, auto_mode_count, beam_oracle_f1, solve_modes

__all__ = [
    "BRONZE",
    "PZT5A",
    "DeviceConfig",
    "DiscreteOperators",
    "Geometry",
    "Material",
    "ReducedModel",
    "Wiring",
    "assemble_plate",
    "auto_mode_count",
    "beam_oracle_f1",
    "capacitance",
    "default_device",
    "load_device_config",
    "save_device_config",
    "solve_modes",
]
