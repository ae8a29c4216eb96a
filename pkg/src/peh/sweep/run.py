"""Sweep orchestration: one pipeline pass per device length.

Per device: reduce the plate model, simulate every manifest event with the
closed-form LTI propagator, turn voltages into scalogram features, run the
classifier protocol, and integrate harvested energy over the configured
long traffic windows. Device failures are recorded and skipped, never
fatal for the sweep.

Parallelism: events within a device fan out over a process pool when the
PEH_WORKERS environment variable asks for more than one worker; results
are collected by index so the report is identical either way.
"""

from __future__ import annotations

import dataclasses
import json
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from peh.baseline.classifier import EvalProtocol, Metrics, evaluate
from peh.baseline.features import extract_features
from peh.errors import PehError
from peh.model.modal import ReducedModel, reduce_device
from peh.response.frf import frf_voltage
from peh.response.simulate import SolverOpts, exact_propagator, simulate_voltage
from peh.response.timeseries import load_timeseries
from peh.signals.cwt import cwt_morlet
from peh.signals.images import image_from_scalogram, save_image_tensor
from peh.signals.speed import SpeedClass
from peh.sweep.config import SweepConfig
from peh.sweep.report import DeviceResult, SweepReport
from peh.synth.dataset import DatasetManifest, load_manifest
from peh.synth.generator import synth_long_window

_CLASS_INDEX = {SpeedClass.C30: 0, SpeedClass.C40: 1, SpeedClass.C50: 2}
_ENERGY_CHUNK = 2_000_000  # samples per streaming block for long windows


def _worker_count() -> int:
    raw = os.environ.get("PEH_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _event_scalogram(model: ReducedModel, accel_path: Path):
    accel = load_timeseries(accel_path)
    voltage = simulate_voltage(model, accel, SolverOpts(method="exact"))
    return cwt_morlet(voltage)


def _event_features(args) -> np.ndarray:
    model, accel_path = args
    return extract_features(_event_scalogram(model, accel_path))


def _device_features(model: ReducedModel, manifest: DatasetManifest) -> np.ndarray:
    tasks = [(model, rec.accel_path) for rec in manifest.records]
    workers = _worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_event_features, tasks, chunksize=4))
    else:
        rows = [_event_features(t) for t in tasks]
    return np.asarray(rows)


def _device_energies(model: ReducedModel, cfg: SweepConfig) -> list[float]:
    energy_scenario = dataclasses.replace(
        cfg.scenario, noise_snr_db=cfg.energy_window_snr_db
    )
    energies = []
    for window in cfg.energy_windows:
        trace = synth_long_window(
            energy_scenario, window.end_s, seed=window.seed,
            arrivals_per_hour=cfg.arrivals_per_hour,
        )
        step = exact_propagator(model, trace.dt)
        rl = model.load_resistance_ohm
        i0 = int(round(window.start_s * trace.sample_rate_hz))
        i1 = min(int(round(window.end_s * trace.sample_rate_hz)), len(trace.values) - 1)
        energy = 0.0
        boundary_power = None  # power at the last in-window sample of the previous chunk
        for lo in range(0, len(trace.values), _ENERGY_CHUNK):
            power = step(trace.values[lo : lo + _ENERGY_CHUNK]) ** 2 / rl
            a = max(lo, i0)
            b = min(lo + len(power) - 1, i1)
            if a > b:
                continue
            seg = power[a - lo : b - lo + 1]
            energy += float(np.trapezoid(seg, dx=trace.dt))
            if a == lo and boundary_power is not None:
                # Trapezoid spanning the chunk boundary.
                energy += 0.5 * (boundary_power + seg[0]) * trace.dt
            boundary_power = seg[-1] if b == lo + len(power) - 1 and b < i1 else None
        energies.append(energy)
    return energies


def _save_frf(model: ReducedModel, grid: tuple[float, float, float], path: Path) -> None:
    start, stop, step = grid
    freqs = np.arange(start, stop + 0.5 * step, step)
    curve = frf_voltage(model, freqs)
    with path.open("w") as fh:
        fh.write("freq_hz,re_h,im_h\n")
        for f, h in zip(curve.freqs_hz, curve.h_v):
            fh.write(f"{float(f):.17g},{float(h.real):.17g},{float(h.imag):.17g}\n")


def _evaluate_external_cnn(
    cfg: SweepConfig,
    model: ReducedModel,
    manifest: DatasetManifest,
    device_dir: Path,
) -> Metrics:
    """Exit-code/paths contract with the external image classifier.

    We render per-event image tensors plus a JSON-lines image manifest, the
    command must exit 0 and leave metrics.json (baseline Metrics schema) in
    its --out directory.
    """
    image_dir = device_dir / "images"
    image_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = device_dir / "images.jsonl"
    with manifest_path.open("w") as fh:
        for rec in manifest.records:
            sc = _event_scalogram(model, rec.accel_path)
            image = image_from_scalogram(sc, size=cfg.cnn_image_size)
            tensor_path = image_dir / f"{rec.event_id}.f32"
            save_image_tensor(image, tensor_path)
            fh.write(
                json.dumps(
                    {
                        "event_id": rec.event_id,
                        "image": str(tensor_path.relative_to(device_dir)),
                        "speed_class": rec.speed_class.value,
                        "speed_kmh": rec.speed_kmh,
                    }
                )
                + "\n"
            )
    cnn_out = device_dir / "cnn"
    command = list(cfg.cnn_command) + [
        "train",
        "--manifest", str(manifest_path),
        "--out", str(cnn_out),
        "--runs", str(cfg.n_runs),
        "--seed", str(cfg.eval_seed),
        "--epochs", str(cfg.cnn_epochs),
    ]
    result = subprocess.run(command, capture_output=True, text=True)
    if result.returncode != 0:
        raise PehError(
            f"external classifier failed (exit {result.returncode}): {result.stderr.strip()}"
        )
    metrics_path = cnn_out / "metrics.json"
    if not metrics_path.exists():
        raise PehError(f"external classifier left no {metrics_path}")
    return Metrics.from_dict(json.loads(metrics_path.read_text()))


def run_sweep(cfg: SweepConfig, out_dir: str | Path) -> SweepReport:
    """Run the full study; returns the report (also emitted by the CLI)."""
    cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = load_manifest(cfg.manifest_path)
    labeled = [rec for rec in manifest.records if rec.speed_class is not SpeedClass.EXCLUDED]
    manifest = DatasetManifest(records=tuple(labeled))
    labels = np.array([_CLASS_INDEX[rec.speed_class] for rec in manifest.records])

    results: list[DeviceResult] = []
    for length in cfg.lengths_m:
        device_dir = out_dir / f"device_{length * 100:.0f}cm"
        device_dir.mkdir(parents=True, exist_ok=True)
        try:
            device_cfg = cfg.base_device.with_length(length)
            model = reduce_device(device_cfg)
            frf_path = device_dir / "frf.csv"
            _save_frf(model, cfg.frf_grid_hz, frf_path)

            if cfg.classifier == "external-cnn":
                metrics = _evaluate_external_cnn(cfg, model, manifest, device_dir)
            else:
                features = _device_features(model, manifest)
                metrics = evaluate(
                    features, labels, EvalProtocol(n_runs=cfg.n_runs, seed=cfg.eval_seed)
                )
            energies = _device_energies(model, cfg)
            results.append(
                DeviceResult(
                    length_m=length,
                    status="ok",
                    natural_freqs_hz=tuple(float(f) for f in model.natural_freqs_hz),
                    frf_path=str(frf_path),
                    energies_j=tuple(energies),
                    accuracy_runs=metrics.run_accuracies,
                    confusion=tuple(tuple(int(v) for v in row) for row in metrics.confusion),
                )
            )
        except PehError as exc:
            results.append(DeviceResult(length_m=length, status="failed", error=str(exc)))

    return SweepReport(
        devices=tuple(results),
        dominant_excitation_hz=cfg.scenario.dominant_frequency_hz,
        n_events=len(manifest.records),
        n_runs=cfg.n_runs,
        classifier=cfg.classifier,
    )
