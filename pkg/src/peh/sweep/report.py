"""Sweep results: data model, JSON round-trip, tables, and plots."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from peh.errors import PehError


@dataclass(frozen=True)
class DeviceResult:
    length_m: float
    status: str  # "ok" | "failed"
    error: str | None = None
    natural_freqs_hz: tuple[float, ...] = ()
    frf_path: str | None = None
    energies_j: tuple[float, ...] = ()
    accuracy_runs: tuple[float, ...] = ()
    confusion: tuple[tuple[int, ...], ...] = ()

    @property
    def mean_energy_j(self) -> float:
        return float(np.mean(self.energies_j)) if self.energies_j else math.nan

    @property
    def std_energy_j(self) -> float:
        return float(np.std(self.energies_j)) if self.energies_j else math.nan

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracy_runs)) if self.accuracy_runs else math.nan

    @property
    def std_accuracy(self) -> float:
        return float(np.std(self.accuracy_runs)) if self.accuracy_runs else math.nan


@dataclass(frozen=True)
class SweepReport:
    devices: tuple[DeviceResult, ...]
    dominant_excitation_hz: float
    n_events: int
    n_runs: int
    classifier: str

    def ok_devices(self) -> tuple[DeviceResult, ...]:
        return tuple(d for d in self.devices if d.status == "ok")

    @property
    def argmax_energy_length_m(self) -> float:
        ok = self.ok_devices()
        if not ok:
            raise PehError("no successful devices in sweep")
        return max(ok, key=lambda d: d.mean_energy_j).length_m

    @property
    def argmax_accuracy_length_m(self) -> float:
        ok = self.ok_devices()
        if not ok:
            raise PehError("no successful devices in sweep")
        return max(ok, key=lambda d: d.mean_accuracy).length_m

    @property
    def optima_coincide(self) -> bool:
        """Whether the best-harvesting and best-sensing devices are the same.

        Surfaced explicitly because the study's point is that they need not
        coincide; downstream must read it, not assume it.
        """
        return self.argmax_energy_length_m == self.argmax_accuracy_length_m

    @property
    def nearest_resonance_length_m(self) -> float:
        """Device whose fundamental sits closest to the dominant excitation."""
        ok = self.ok_devices()
        if not ok:
            raise PehError("no successful devices in sweep")
        return min(
            ok, key=lambda d: abs(d.natural_freqs_hz[0] - self.dominant_excitation_hz)
        ).length_m

    def to_dict(self) -> dict:
        return {
            "devices": [
                {
                    "length_m": d.length_m,
                    "status": d.status,
                    "error": d.error,
                    "natural_freqs_hz": list(d.natural_freqs_hz),
                    "frf_path": d.frf_path,
                    "energies_j": list(d.energies_j),
                    "accuracy_runs": list(d.accuracy_runs),
                    "confusion": [list(row) for row in d.confusion],
                }
                for d in self.devices
            ],
            "dominant_excitation_hz": self.dominant_excitation_hz,
            "n_events": self.n_events,
            "n_runs": self.n_runs,
            "classifier": self.classifier,
            "argmax_energy_length_m": self.argmax_energy_length_m,
            "argmax_accuracy_length_m": self.argmax_accuracy_length_m,
            "optima_coincide": self.optima_coincide,
            "nearest_resonance_length_m": self.nearest_resonance_length_m,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SweepReport":
        return cls(
            devices=tuple(
                DeviceResult(
                    length_m=d["length_m"],
                    status=d["status"],
                    error=d.get("error"),
                    natural_freqs_hz=tuple(d.get("natural_freqs_hz", ())),
                    frf_path=d.get("frf_path"),
                    energies_j=tuple(d.get("energies_j", ())),
                    accuracy_runs=tuple(d.get("accuracy_runs", ())),
                    confusion=tuple(tuple(int(v) for v in row) for row in d.get("confusion", ())),
                )
                for d in data["devices"]
            ),
            dominant_excitation_hz=data["dominant_excitation_hz"],
            n_events=data["n_events"],
            n_runs=data["n_runs"],
            classifier=data["classifier"],
        )


def load_report(path: str | Path) -> SweepReport:
    return SweepReport.from_dict(json.loads(Path(path).read_text()))


def _format_table(report: SweepReport) -> str:
    lines = [
        f"{'L [cm]':>7} {'f1 [Hz]':>9} {'E mean [J]':>12} {'E std':>10} "
        f"{'acc mean':>9} {'acc std':>8}  status",
        "-" * 70,
    ]
    for d in report.devices:
        if d.status == "ok":
            lines.append(
                f"{d.length_m * 100:7.1f} {d.natural_freqs_hz[0]:9.2f} "
                f"{d.mean_energy_j:12.4e} {d.std_energy_j:10.2e} "
                f"{d.mean_accuracy:9.3f} {d.std_accuracy:8.3f}  ok"
            )
        else:
            lines.append(f"{d.length_m * 100:7.1f} {'-':>9} {'-':>12} {'-':>10} "
                         f"{'-':>9} {'-':>8}  failed: {d.error}")
    lines.append("")
    lines.append(f"classifier: {report.classifier} ({report.n_runs} runs, {report.n_events} events)")
    lines.append(f"dominant excitation: {report.dominant_excitation_hz:.1f} Hz")
    lines.append(f"best energy   : L = {report.argmax_energy_length_m * 100:.1f} cm")
    lines.append(f"best accuracy : L = {report.argmax_accuracy_length_m * 100:.1f} cm")
    lines.append(
        "energy and sensing optima "
        + ("COINCIDE" if report.optima_coincide else "DIFFER")
        + " for this dataset"
    )
    return "\n".join(lines) + "\n"


def emit_report(report: SweepReport, out_dir: str | Path) -> dict[str, Path]:
    """Write report.json, report.txt, and the four figure files.

    Returns the emitted paths keyed by artifact name.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    paths["json"] = json_path

    table_path = out_dir / "report.txt"
    table_path.write_text(_format_table(report))
    paths["table"] = table_path

    ok = report.ok_devices()
    labels = [f"{d.length_m * 100:.0f} cm" for d in ok]

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for d in ok:
        if d.frf_path and Path(d.frf_path).exists():
            curve = np.loadtxt(d.frf_path, delimiter=",", skiprows=1)
            ax.semilogy(curve[:, 0], np.hypot(curve[:, 1], curve[:, 2]),
                        label=f"{d.length_m * 100:.0f} cm")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("|H_v| [V per m/s$^2$]")
    ax.legend(fontsize=8)
    ax.set_title("Voltage FRF per device")
    paths["frf_overlay"] = out_dir / "frf_overlay.png"
    fig.savefig(paths["frf_overlay"], dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, [d.mean_energy_j for d in ok], yerr=[d.std_energy_j for d in ok], capsize=4)
    ax.set_ylabel("harvested energy [J]")
    ax.set_title("Energy per window, mean over windows")
    paths["energy_bars"] = out_dir / "energy_bars.png"
    fig.savefig(paths["energy_bars"], dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, [d.mean_accuracy for d in ok], yerr=[d.std_accuracy for d in ok],
           capsize=4, color="#2a7")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("validation accuracy")
    ax.set_title(f"Speed-class accuracy, mean over {report.n_runs} runs")
    paths["accuracy_bars"] = out_dir / "accuracy_bars.png"
    fig.savefig(paths["accuracy_bars"], dpi=130)
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    ax.scatter([d.mean_energy_j for d in ok], [d.mean_accuracy for d in ok])
    for d in ok:
        ax.annotate(f"{d.length_m * 100:.0f} cm", (d.mean_energy_j, d.mean_accuracy),
                    textcoords="offset points", xytext=(5, 3), fontsize=8)
    ax.set_xlabel("harvested energy [J]")
    ax.set_ylabel("validation accuracy")
    ax.set_title("Energy vs sensing accuracy")
    paths["energy_vs_accuracy"] = out_dir / "energy_vs_accuracy.png"
    fig.savefig(paths["energy_vs_accuracy"], dpi=130)
    plt.close(fig)

    return paths
