"""Sweep configuration and its JSON file form."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from peh.errors import ConfigError
from peh.model.config import DeviceConfig, Geometry, Material, Wiring, default_device
from peh.synth.generator import TrafficScenario

DEFAULT_LENGTHS_M = (0.05, 0.10, 0.15, 0.20, 0.25, 0.30)
TWELVE_HOURS_S = 12.0 * 3600.0


@dataclass(frozen=True)
class EnergyWindowSpec:
    """One harvested-energy evaluation window.

    A synthetic traffic trace long enough to cover end_s is generated from
    the window's seed, and the energy integral runs over [start_s, end_s].
    Five 12-hour windows with distinct seeds stand in for five separate
    days of real traffic.
    """

    start_s: float
    end_s: float
    seed: int

    def validate(self) -> None:
        if not self.start_s < self.end_s:
            raise ConfigError(f"energy window needs start < end, got [{self.start_s}, {self.end_s}]")


def default_energy_windows(
    duration_s: float = TWELVE_HOURS_S, count: int = 5, base_seed: int = 100
) -> tuple[EnergyWindowSpec, ...]:
    return tuple(EnergyWindowSpec(0.0, duration_s, base_seed + i) for i in range(count))


@dataclass(frozen=True)
class SweepConfig:
    manifest_path: Path
    lengths_m: tuple[float, ...] = DEFAULT_LENGTHS_M
    base_device: DeviceConfig = field(default_factory=default_device)
    scenario: TrafficScenario = field(default_factory=TrafficScenario)
    energy_windows: tuple[EnergyWindowSpec, ...] = field(default_factory=default_energy_windows)
    n_runs: int = 5
    classifier: str = "baseline"  # "baseline" | "external-cnn"
    eval_seed: int = 0
    arrivals_per_hour: float = 120.0
    # Long traffic windows model physical excitation; their noise floor is
    # independent of the classifier dataset's (often low) SNR knob.
    energy_window_snr_db: float = 20.0
    frf_grid_hz: tuple[float, float, float] = (1.0, 200.0, 0.5)  # start, stop, step
    cnn_command: tuple[str, ...] = ("peh-cnn",)
    cnn_image_size: tuple[int, int] = (64, 64)
    cnn_epochs: int = 30

    def validate(self) -> None:
        if len(self.lengths_m) != len(set(self.lengths_m)):
            raise ConfigError("sweep lengths must be distinct")
        if any(length <= 0.0 for length in self.lengths_m):
            raise ConfigError("sweep lengths must be positive")
        if self.classifier not in ("baseline", "external-cnn"):
            raise ConfigError(f"unknown classifier {self.classifier!r}")
        if self.n_runs < 1:
            raise ConfigError("n_runs must be >= 1")
        if not self.energy_windows:
            raise ConfigError("at least one energy window is required")
        for window in self.energy_windows:
            window.validate()
        self.base_device.validate()
        self.scenario.validate()


def _dataclass_to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {k: _dataclass_to_jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, (list, tuple)):
        return [_dataclass_to_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, Wiring):
        return obj.value
    return obj


def save_sweep_config(config: SweepConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(_dataclass_to_jsonable(config), indent=2) + "\n")


def load_sweep_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read sweep config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse sweep config {path}: {exc}") from exc
    try:
        device_raw = data.get("base_device")
        if device_raw is None:
            device = default_device()
        else:
            device = DeviceConfig(
                geometry=Geometry(**device_raw["geometry"]),
                piezo=Material(**device_raw["piezo"]),
                substrate=Material(**device_raw["substrate"]),
                wiring=Wiring(device_raw.get("wiring", "series")),
                load_resistance_ohm=device_raw.get("load_resistance_ohm", 100.0),
                rayleigh_alpha=device_raw.get("rayleigh_alpha", 14.65),
                rayleigh_beta=device_raw.get("rayleigh_beta", 1.0e-5),
                spline_degree=device_raw.get("spline_degree", 3),
                control_net=tuple(device_raw.get("control_net", (24, 8))),
                num_modes=device_raw.get("num_modes"),
            )
        scenario_raw = data.get("scenario", {})
        scenario_fields = {f.name for f in dataclasses.fields(TrafficScenario)}
        scenario_kwargs = {
            k: tuple(v) if isinstance(v, list) else v
            for k, v in scenario_raw.items()
            if k in scenario_fields
        }
        manifest_raw = Path(data["manifest_path"])
        if not manifest_raw.is_absolute():
            manifest_raw = path.parent / manifest_raw
        config = SweepConfig(
            manifest_path=manifest_raw,
            lengths_m=tuple(data.get("lengths_m", DEFAULT_LENGTHS_M)),
            base_device=device,
            scenario=TrafficScenario(**scenario_kwargs),
            energy_windows=tuple(
                EnergyWindowSpec(**w) for w in data.get("energy_windows", ())
            )
            or default_energy_windows(),
            n_runs=data.get("n_runs", 5),
            classifier=data.get("classifier", "baseline"),
            eval_seed=data.get("eval_seed", 0),
            arrivals_per_hour=data.get("arrivals_per_hour", 120.0),
            energy_window_snr_db=data.get("energy_window_snr_db", 20.0),
            frf_grid_hz=tuple(data.get("frf_grid_hz", (1.0, 200.0, 0.5))),
            cnn_command=tuple(data.get("cnn_command", ("peh-cnn",))),
            cnn_image_size=tuple(data.get("cnn_image_size", (64, 64))),
            cnn_epochs=data.get("cnn_epochs", 30),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid sweep config {path}: {exc}") from exc
    config.validate()
    return config
