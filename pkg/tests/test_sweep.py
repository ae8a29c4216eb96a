"""Sweep orchestration: composition, determinism, report artifacts."""

import json
import sys

import numpy as np
import pytest

from peh.baseline import EvalProtocol, evaluate, extract_features
from peh.model import default_device
from peh.model.modal import reduce_device
from peh.response import SolverOpts, simulate_voltage
from peh.response.energy import harvested_energy
from peh.signals import cwt_morlet
from peh.sweep import (
    EnergyWindowSpec,
    SweepConfig,
    emit_report,
    load_report,
    load_sweep_config,
    run_sweep,
    save_sweep_config,
)
from peh.synth import TrafficScenario, synth_dataset, synth_long_window

pytestmark = pytest.mark.filterwarnings("ignore:FigureCanvasAgg")


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("dataset")
    scenario = TrafficScenario(noise_snr_db=-12.0)
    manifest = synth_dataset((8, 8, 8), scenario, seed=21, out_dir=out, save_strains=False)
    return out / "manifest.jsonl", scenario, manifest


def small_config(manifest_path, scenario, lengths=(0.15, 0.30)) -> SweepConfig:
    return SweepConfig(
        manifest_path=manifest_path,
        lengths_m=lengths,
        scenario=scenario,
        energy_windows=(EnergyWindowSpec(0.0, 40.0, 100), EnergyWindowSpec(0.0, 40.0, 101)),
        n_runs=3,
        eval_seed=5,
    )


class TestRunSweep:
    def test_single_length_matches_manual_pipeline(self, small_dataset, tmp_path):
        manifest_path, scenario, manifest = small_dataset
        cfg = small_config(manifest_path, scenario, lengths=(0.15,))
        report = run_sweep(cfg, tmp_path / "out")
        assert len(report.devices) == 1
        device = report.devices[0]
        assert device.status == "ok"

        model = reduce_device(default_device(0.15))
        feats, labels = [], []
        class_index = {"C30": 0, "C40": 1, "C50": 2}
        for rec in manifest.records:
            volt = simulate_voltage(model, rec.load_accel(), SolverOpts(method="exact"))
            feats.append(extract_features(cwt_morlet(volt)))
            labels.append(class_index[rec.speed_class.value])
        metrics = evaluate(
            np.asarray(feats), np.asarray(labels), EvalProtocol(n_runs=3, seed=5)
        )
        assert device.accuracy_runs == metrics.run_accuracies

        from dataclasses import replace

        energy_scenario = replace(scenario, noise_snr_db=cfg.energy_window_snr_db)
        window = synth_long_window(energy_scenario, 40.0, seed=100)
        volt = simulate_voltage(model, window, SolverOpts(method="exact"))
        manual_energy = harvested_energy(volt, model.load_resistance_ohm, 0.0, window.end_time_s)
        assert device.energies_j[0] == pytest.approx(manual_energy, rel=1e-9)

    def test_deterministic_reports(self, small_dataset, tmp_path):
        manifest_path, scenario, _ = small_dataset
        cfg = small_config(manifest_path, scenario, lengths=(0.15,))
        r1 = run_sweep(cfg, tmp_path / "run1")
        r2 = run_sweep(cfg, tmp_path / "run2")
        d1, d2 = r1.to_dict(), r2.to_dict()
        # FRF paths differ by output directory; everything else is identical.
        for d in (d1, d2):
            for device in d["devices"]:
                device["frf_path"] = None
        assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)

    def test_energy_window_with_offset_start(self, small_dataset, tmp_path, monkeypatch):
        manifest_path, scenario, _ = small_dataset
        import peh.sweep.run as run_mod
        from dataclasses import replace as dc_replace

        monkeypatch.setattr(run_mod, "_ENERGY_CHUNK", 7000)  # force boundary stitching
        cfg = dc_replace(
            small_config(manifest_path, scenario, lengths=(0.15,)),
            energy_windows=(EnergyWindowSpec(10.0, 40.0, 100),),
        )
        report = run_sweep(cfg, tmp_path / "out")

        from peh.model import default_device
        from peh.model.modal import reduce_device

        model = reduce_device(default_device(0.15))
        energy_scenario = dc_replace(scenario, noise_snr_db=cfg.energy_window_snr_db)
        window = synth_long_window(energy_scenario, 40.0, seed=100)
        volt = simulate_voltage(model, window, SolverOpts(method="exact"))
        manual = harvested_energy(volt, model.load_resistance_ohm, 10.0, window.end_time_s)
        assert report.devices[0].energies_j[0] == pytest.approx(manual, rel=1e-9)

    def test_worker_pool_matches_serial(self, small_dataset, monkeypatch):
        manifest_path, _, manifest = small_dataset
        from peh.model import default_device
        from peh.model.modal import reduce_device
        from peh.sweep.run import _device_features

        model = reduce_device(default_device(0.15))
        monkeypatch.setenv("PEH_WORKERS", "1")
        serial = _device_features(model, manifest)
        monkeypatch.setenv("PEH_WORKERS", "2")
        parallel = _device_features(model, manifest)
        assert np.array_equal(serial, parallel)

    def test_failed_device_recorded_not_fatal(self, small_dataset, tmp_path, monkeypatch):
        manifest_path, scenario, _ = small_dataset
        import peh.sweep.run as run_mod

        real_reduce = run_mod.reduce_device

        def failing_reduce(config, n_modes=None):
            if config.geometry.length_m == 0.30:
                from peh.errors import AssemblyError

                raise AssemblyError("injected failure")
            return real_reduce(config, n_modes)

        monkeypatch.setattr(run_mod, "reduce_device", failing_reduce)
        cfg = small_config(manifest_path, scenario)
        report = run_sweep(cfg, tmp_path / "out")
        by_status = {d.length_m: d.status for d in report.devices}
        assert by_status == {0.15: "ok", 0.30: "failed"}
        assert "injected failure" in report.devices[1].error
        assert report.argmax_energy_length_m == 0.15


@pytest.fixture(scope="module")
def two_length_report(small_dataset, tmp_path_factory):
    manifest_path, scenario, _ = small_dataset
    out = tmp_path_factory.mktemp("sweep_out")
    return run_sweep(small_config(manifest_path, scenario), out)


class TestReport:
    def test_json_round_trip(self, two_length_report, tmp_path):
        report = two_length_report
        paths = emit_report(report, tmp_path / "report")
        loaded = load_report(paths["json"])
        assert loaded == report
        assert loaded.to_dict() == report.to_dict()

    def test_emitted_artifacts(self, two_length_report, tmp_path):
        report = two_length_report
        paths = emit_report(report, tmp_path / "report")
        for kind in ("json", "table", "frf_overlay", "energy_bars",
                     "accuracy_bars", "energy_vs_accuracy"):
            assert paths[kind].exists() and paths[kind].stat().st_size > 0
        data = json.loads(paths["json"].read_text())
        assert len(data["devices"]) == len(report.devices)
        assert "optima_coincide" in data
        assert data["nearest_resonance_length_m"] in [d.length_m for d in report.devices]

    def test_config_round_trip(self, small_dataset, tmp_path):
        manifest_path, scenario, _ = small_dataset
        cfg = small_config(manifest_path, scenario)
        path = tmp_path / "sweep.json"
        save_sweep_config(cfg, path)
        loaded = load_sweep_config(path)
        assert loaded.lengths_m == cfg.lengths_m
        assert loaded.energy_windows == cfg.energy_windows
        assert loaded.scenario == cfg.scenario
        assert loaded.base_device == cfg.base_device


CNN_STUB = """
import argparse, json, pathlib
parser = argparse.ArgumentParser()
sub = parser.add_subparsers(dest="command")
train = sub.add_parser("train")
train.add_argument("--manifest", required=True)
train.add_argument("--out", required=True)
train.add_argument("--runs", type=int, default=5)
train.add_argument("--seed", type=int, default=0)
train.add_argument("--epochs", type=int, default=1)
args = parser.parse_args()
records = [json.loads(l) for l in open(args.manifest) if l.strip()]
assert records, "stub got an empty manifest"
base = pathlib.Path(args.manifest).parent
for rec in records:
    assert (base / rec["image"]).exists(), rec["image"]
out = pathlib.Path(args.out); out.mkdir(parents=True, exist_ok=True)
metrics = {
    "run_accuracies": [0.9] * args.runs,
    "mean_accuracy": 0.9,
    "std_accuracy": 0.0,
    "confusion": [[3, 0, 0], [0, 3, 0], [0, 0, 3]],
    "classes": ["C30", "C40", "C50"],
}
(out / "metrics.json").write_text(json.dumps(metrics))
"""


class TestExternalCnnContract:
    def test_stub_classifier_via_subprocess(self, small_dataset, tmp_path):
        manifest_path, scenario, _ = small_dataset
        stub = tmp_path / "stub_cnn.py"
        stub.write_text(CNN_STUB)
        cfg = SweepConfig(
            manifest_path=manifest_path,
            lengths_m=(0.15,),
            scenario=scenario,
            energy_windows=(EnergyWindowSpec(0.0, 30.0, 100),),
            n_runs=4,
            classifier="external-cnn",
            cnn_command=(sys.executable, str(stub)),
            cnn_image_size=(16, 16),
        )
        report = run_sweep(cfg, tmp_path / "out")
        assert report.devices[0].status == "ok"
        assert report.devices[0].accuracy_runs == (0.9, 0.9, 0.9, 0.9)

    def test_failing_command_marks_device_failed(self, small_dataset, tmp_path):
        manifest_path, scenario, _ = small_dataset
        stub = tmp_path / "broken_cnn.py"
        stub.write_text("import sys; sys.exit(3)")
        cfg = SweepConfig(
            manifest_path=manifest_path,
            lengths_m=(0.15,),
            scenario=scenario,
            energy_windows=(EnergyWindowSpec(0.0, 30.0, 100),),
            classifier="external-cnn",
            cnn_command=(sys.executable, str(stub)),
            cnn_image_size=(8, 8),
        )
        report = run_sweep(cfg, tmp_path / "out")
        assert report.devices[0].status == "failed"
        assert "exit 3" in report.devices[0].error
