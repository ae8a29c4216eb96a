"""Device configuration: geometry, layer materials, wiring, and solver knobs.

All quantities are SI (m, kg, Pa, F, Ohm). Nothing here is hard-coded into
the numerics; material constants live in config so they can be overridden
from a JSON file.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from enum import Enum
from pathlib import Path

from peh.errors import ConfigError


class Wiring(str, Enum):
    """Electrical connection of the two piezo layers."""

    SERIES = "series"
    PARALLEL = "parallel"


@dataclass(frozen=True)
class Geometry:
    """Planform and layer thicknesses of the rectangular bimorph.

    length_m is the cantilever span (clamped edge at x = 0), width_m the
    free-edge width. The laminate is substrate of thickness
    substrate_thickness_m between two identical piezo layers of thickness
    piezo_thickness_m each.
    """

    length_m: float
    width_m: float
    piezo_thickness_m: float
    substrate_thickness_m: float

    def validate(self) -> None:
        for name in ("length_m", "width_m", "piezo_thickness_m", "substrate_thickness_m"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ConfigError(f"geometry.{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class Material:
    """Isotropic layer material, plane-stress constants for the piezo layer.

    e31_c_per_m2 is the effective plane-stress piezoelectric constant and
    eps33s_f_per_m the clamped (constant-strain) permittivity; both are only
    meaningful for the piezo layer and default to 0 for passive materials.
    """

    name: str
    density_kg_m3: float
    youngs_modulus_pa: float
    poisson_ratio: float
    e31_c_per_m2: float = 0.0
    eps33s_f_per_m: float = 0.0

    def validate(self, piezo: bool = False) -> None:
        if not self.density_kg_m3 > 0.0:
            raise ConfigError(f"material {self.name}: density must be positive")
        if not self.youngs_modulus_pa > 0.0:
            raise ConfigError(f"material {self.name}: Young's modulus must be positive")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise ConfigError(
                f"material {self.name}: Poisson ratio must lie in [0, 0.5), "
                f"got {self.poisson_ratio}"
            )
        if piezo and not self.eps33s_f_per_m > 0.0:
            raise ConfigError(f"material {self.name}: piezo layer needs eps33S > 0")


# Handbook constants chosen to reproduce a ~21 Hz fundamental for the
# 15 cm device; override from config files for other stacks.
PZT5A = Material(
    name="PZT-5A",
    density_kg_m3=7750.0,
    youngs_modulus_pa=61.0e9,
    poisson_ratio=0.35,
    e31_c_per_m2=-10.4,
    eps33s_f_per_m=1.33e-8,
)

BRONZE = Material(
    name="bronze",
    density_kg_m3=8800.0,
    youngs_modulus_pa=105.0e9,
    poisson_ratio=0.34,
)


@dataclass(frozen=True)
class DeviceConfig:
    """One harvester candidate: geometry, materials, circuit, discretization.

    num_modes with value None means "auto": keep the smallest mode count
    whose top frequency clears 1.5x the 200 Hz analysis band, clamped to
    [4, 12].
    """

    geometry: Geometry
    piezo: Material = PZT5A
    substrate: Material = BRONZE
    wiring: Wiring = Wiring.SERIES
    load_resistance_ohm: float = 100.0
    rayleigh_alpha: float = 14.65
    rayleigh_beta: float = 1.0e-5
    spline_degree: int = 3
    control_net: tuple[int, int] = (24, 8)
    num_modes: int | None = None

    def validate(self) -> None:
        self.geometry.validate()
        self.piezo.validate(piezo=True)
        self.substrate.validate()
        if not self.load_resistance_ohm > 0.0:
            raise ConfigError("load_resistance_ohm must be positive")
        if self.rayleigh_alpha < 0.0 or self.rayleigh_beta < 0.0:
            raise ConfigError("Rayleigh coefficients must be non-negative")
        if self.spline_degree < 2:
            raise ConfigError("spline_degree must be >= 2 (bending needs C1 basis)")
        nx, ny = self.control_net
        # Clamping removes two coefficient columns at x = 0, so the length
        # direction needs headroom beyond the open-knot minimum of p+1.
        if nx < self.spline_degree + 2:
            raise ConfigError(
                f"control_net n_x={nx} too small for degree {self.spline_degree}; "
                f"need n_x >= {self.spline_degree + 2}"
            )
        if ny < self.spline_degree + 1:
            raise ConfigError(
                f"control_net n_y={ny} too small for degree {self.spline_degree}; "
                f"need n_y >= {self.spline_degree + 1}"
            )
        if self.num_modes is not None and self.num_modes < 1:
            raise ConfigError("num_modes must be >= 1 (or None for auto)")

    def with_length(self, length_m: float) -> "DeviceConfig":
        return replace(self, geometry=replace(self.geometry, length_m=length_m))


def default_device(length_m: float = 0.15) -> DeviceConfig:
    """PZT-5A/bronze stack with the reference cross-section and given length."""
    return DeviceConfig(
        geometry=Geometry(
            length_m=length_m,
            width_m=0.05,
            piezo_thickness_m=0.25e-3,
            substrate_thickness_m=0.50e-3,
        )
    )


def _config_to_dict(config: DeviceConfig) -> dict:
    data = asdict(config)
    data["wiring"] = config.wiring.value
    data["control_net"] = list(config.control_net)
    return data


def save_device_config(config: DeviceConfig, path: str | Path) -> None:
    """Write a device config as human-editable JSON."""
    Path(path).write_text(json.dumps(_config_to_dict(config), indent=2) + "\n")


def load_device_config(path: str | Path) -> DeviceConfig:
    """Read a device config written by save_device_config (or by hand)."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read device config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse device config {path}: {exc}") from exc
    try:
        config = DeviceConfig(
            geometry=Geometry(**data["geometry"]),
            piezo=Material(**data.get("piezo", asdict(PZT5A))),
            substrate=Material(**data.get("substrate", asdict(BRONZE))),
            wiring=Wiring(data.get("wiring", "series")),
            load_resistance_ohm=data.get("load_resistance_ohm", 100.0),
            rayleigh_alpha=data.get("rayleigh_alpha", 14.65),
            rayleigh_beta=data.get("rayleigh_beta", 1.0e-5),
            spline_degree=data.get("spline_degree", 3),
            control_net=tuple(data.get("control_net", (24, 8))),
            num_modes=data.get("num_modes"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid device config {path}: {exc}") from exc
    config.validate()
    return config
