"""Six-device study: voltages, scalograms, classifier, energy, joint report."""

from peh.sweep.config import EnergyWindowSpec, SweepConfig, load_sweep_config, save_sweep_config
from peh.sweep.run import run_sweep
from peh.sweep.report import DeviceResult, SweepReport, emit_report, load_report

__all__ = [
    "DeviceResult",
    "EnergyWindowSpec",
    "SweepConfig",
    "SweepReport",
    "emit_report",
    "load_report",
    "load_sweep_config",
    "run_sweep",
    "save_sweep_config",
]
