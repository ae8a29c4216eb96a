"""Command-line interface: `peh <subcommand>`.

Subcommands cover the whole pipeline: device modal analysis, transient
simulation, energy integration, event extraction, scalogram images, speed
estimation, dataset synthesis, baseline training/evaluation, and the
six-device sweep.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from peh.errors import PehError


def _parse_size(raw: str) -> tuple[int, int]:
    parts = raw.lower().split("x")
    if len(parts) == 1:
        parts = [parts[0], parts[0]]
    return int(parts[0]), int(parts[1])


def _cmd_model(args) -> int:
    from peh.model import capacitance, load_device_config
    from peh.model.assembly import assemble_plate
    from peh.model.modal import auto_mode_count, solve_modes

    config = load_device_config(args.config)
    ops = assemble_plate(config)
    n_modes = args.modes if args.modes else (config.num_modes or auto_mode_count(ops))
    model = solve_modes(
        ops,
        n_modes,
        rayleigh_alpha=config.rayleigh_alpha,
        rayleigh_beta=config.rayleigh_beta,
        load_resistance_ohm=config.load_resistance_ohm,
    )
    print(f"device: L={config.geometry.length_m} m, W={config.geometry.width_m} m, "
          f"wiring={config.wiring.value}")
    print(f"C_p = {capacitance(config):.6e} F")
    print(f"{'mode':>4} {'f [Hz]':>12} {'zeta':>10}")
    zetas = model.modal_damping_ratios()
    for i, (f, z) in enumerate(zip(model.natural_freqs_hz, zetas), start=1):
        print(f"{i:>4} {f:12.4f} {z:10.5f}")
    if args.out:
        model.to_json(args.out)
        print(f"reduced model written to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    from peh.model.modal import ReducedModel
    from peh.response import SolverOpts, load_timeseries, save_timeseries, simulate_voltage

    model = ReducedModel.from_json(args.model)
    accel = load_timeseries(args.accel)
    opts = SolverOpts(rtol=args.rtol, atol=args.atol, method=args.method)
    voltage = simulate_voltage(model, accel, opts)
    save_timeseries(voltage, args.out)
    print(f"voltage written to {args.out} ({len(voltage)} samples, "
          f"peak {np.abs(voltage.values).max():.4e} V)")
    return 0


def _cmd_energy(args) -> int:
    from peh.response import harvested_energy, load_timeseries

    volts = load_timeseries(args.volts)
    t1 = args.t_from if args.t_from is not None else volts.start_time_s
    t2 = args.t_to if args.t_to is not None else volts.end_time_s
    energy = harvested_energy(volts, args.rl, t1, t2)
    print(f"E[{t1:.3f}, {t2:.3f}] = {energy:.6e} J ({args.rl} ohm load)")
    return 0


def _cmd_events(args) -> int:
    from peh.response import load_timeseries, save_timeseries
    from peh.signals import DetectOpts, detect_events

    accel = load_timeseries(args.accel)
    windows = detect_events(accel, DetectOpts(threshold_mads=args.threshold))
    print(f"{len(windows)} event(s)")
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for i, w in enumerate(windows):
        print(f"  event {i}: peak at {w.peak_time_s:.2f} s, window "
              f"[{w.start_s:.2f}, {w.end_s:.2f}] s")
        if out_dir:
            save_timeseries(w.accel, out_dir / f"event_{i:04d}.csv")
    return 0


def _cmd_cwt(args) -> int:
    from peh.response import load_timeseries
    from peh.signals import cwt_morlet, render_image

    size = _parse_size(args.size)
    if args.manifest:
        return _render_manifest_images(args, size)
    if not args.series:
        print("pass --series <csv> or --manifest <jsonl>", file=sys.stderr)
        return 2
    series = load_timeseries(args.series)
    sc = cwt_morlet(series)
    png = args.png if args.png else None
    render_image(sc, args.out, size=size, png_path=png)
    print(f"image tensor written to {args.out}" + (f" (PNG: {png})" if png else ""))
    return 0


def _render_manifest_images(args, size: tuple[int, int]) -> int:
    """Batch mode: one image per manifest event, plus an image manifest.

    --source accel renders the raw acceleration scalograms (the benchmark
    protocol); --source voltage simulates the device in --model first.
    """
    from peh.model.modal import ReducedModel
    from peh.response import SolverOpts, simulate_voltage
    from peh.signals import cwt_morlet, render_image
    from peh.synth import load_manifest

    manifest = load_manifest(args.manifest)
    out_dir = Path(args.out)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    model = None
    if args.source == "voltage":
        if not args.model:
            print("--source voltage needs --model <reduced-model.json>", file=sys.stderr)
            return 2
        model = ReducedModel.from_json(args.model)
    records = []
    for rec in manifest.records:
        series = rec.load_accel()
        if model is not None:
            series = simulate_voltage(model, series, SolverOpts(method="exact"))
        sc = cwt_morlet(series)
        tensor_path = out_dir / "images" / f"{rec.event_id}.f32"
        render_image(sc, tensor_path, size=size)
        records.append(
            {
                "event_id": rec.event_id,
                "image": str(tensor_path.relative_to(out_dir)),
                "speed_class": rec.speed_class.value,
                "speed_kmh": rec.speed_kmh,
            }
        )
    manifest_path = out_dir / "images.jsonl"
    with manifest_path.open("w") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    print(f"{len(records)} images under {out_dir} (manifest: {manifest_path})")
    return 0


def _cmd_speed(args) -> int:
    from peh.response import load_timeseries
    from peh.signals import estimate_event_speed, estimate_speed, label_speed

    series = [load_timeseries(p) for p in args.strains]
    if len(series) == 2:
        speed = estimate_speed(series[0], series[1], args.spacing)
        flagged = False
    elif len(series) == 4:
        est = estimate_event_speed(tuple(series), args.spacing)
        speed, flagged = est.speed_kmh, est.flagged
    else:
        print("pass 2 strain files (one pair) or 4 (both pairs)", file=sys.stderr)
        return 2
    label = label_speed(speed)
    print(f"speed = {speed:.2f} km/h, class = {label.speed_class.value}"
          + (" [FLAGGED: pairs disagree >10%]" if flagged else ""))
    return 0


def _cmd_synth(args) -> int:
    from peh.synth import TrafficScenario, synth_dataset

    mix = tuple(int(v) for v in args.mix.split(","))
    if len(mix) != 3:
        print("--mix must be three comma-separated counts", file=sys.stderr)
        return 2
    scenario = TrafficScenario(noise_snr_db=args.snr)
    manifest = synth_dataset(
        mix, scenario, seed=args.seed, out_dir=args.out, save_strains=not args.no_strains
    )
    counts = {cls.value: n for cls, n in manifest.class_counts().items() if n}
    print(f"{len(manifest)} events under {args.out} (counts: {counts})")
    return 0


def _features_from_manifest(manifest_path: Path):
    from peh.baseline import extract_features
    from peh.signals import cwt_morlet
    from peh.signals.speed import SpeedClass
    from peh.synth import load_manifest

    class_index = {SpeedClass.C30: 0, SpeedClass.C40: 1, SpeedClass.C50: 2}
    manifest = load_manifest(manifest_path)
    feats, labels = [], []
    for rec in manifest.records:
        if rec.speed_class is SpeedClass.EXCLUDED:
            continue
        feats.append(extract_features(cwt_morlet(rec.load_accel())))
        labels.append(class_index[rec.speed_class])
    return np.asarray(feats), np.asarray(labels)


def _cmd_train_baseline(args) -> int:
    from peh.baseline import save_model, train_baseline

    feats, labels = _features_from_manifest(Path(args.manifest))
    model = train_baseline(feats, labels)
    save_model(model, args.out)
    accuracy = float(np.mean(model.predict(feats) == labels))
    print(f"trained on {len(labels)} events (training accuracy {accuracy:.3f}); "
          f"model written to {args.out}")
    return 0


def _cmd_eval_baseline(args) -> int:
    from peh.baseline import EvalProtocol, evaluate

    feats, labels = _features_from_manifest(Path(args.manifest))
    metrics = evaluate(feats, labels, EvalProtocol(n_runs=args.runs, seed=args.seed))
    metrics.save(args.out)
    print(f"accuracy {metrics.mean_accuracy:.3f} +/- {metrics.std_accuracy:.3f} "
          f"over {args.runs} runs; metrics written to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    from peh.sweep import emit_report, load_sweep_config, run_sweep

    cfg = load_sweep_config(args.config)
    if args.classifier:
        import dataclasses

        cfg = dataclasses.replace(cfg, classifier=args.classifier)
        cfg.validate()
    report = run_sweep(cfg, args.out)
    paths = emit_report(report, args.out)
    print(Path(paths["table"]).read_text())
    failed = [d for d in report.devices if d.status != "ok"]
    for d in failed:
        print(f"device L={d.length_m} m FAILED: {d.error}", file=sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peh", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="modal analysis of one device config")
    p.add_argument("--config", required=True)
    p.add_argument("--modes", type=int, default=0, help="mode count (default: auto)")
    p.add_argument("--out", help="write the reduced model artifact (JSON)")
    p.set_defaults(func=_cmd_model)

    p = sub.add_parser("simulate", help="voltage response to an acceleration CSV")
    p.add_argument("--model", required=True, help="reduced model artifact from `peh model`")
    p.add_argument("--accel", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--method", default="dopri45", choices=["dopri45", "exact"])
    p.add_argument("--rtol", type=float, default=1e-6)
    p.add_argument("--atol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("energy", help="harvested energy over a voltage window")
    p.add_argument("--volts", required=True)
    p.add_argument("--rl", type=float, default=100.0)
    p.add_argument("--from", dest="t_from", type=float, default=None)
    p.add_argument("--to", dest="t_to", type=float, default=None)
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("events", help="detect passage windows in a long record")
    p.add_argument("--accel", required=True)
    p.add_argument("--out", help="directory for the 25 s event CSVs")
    p.add_argument("--threshold", type=float, default=6.0, help="MAD multiples")
    p.set_defaults(func=_cmd_events)

    p = sub.add_parser("cwt", help="scalogram image of a series (or a whole manifest)")
    p.add_argument("--series", help="single time-series CSV")
    p.add_argument("--out", required=True, help="tensor file, or directory in manifest mode")
    p.add_argument("--png", help="optional grayscale PNG path (single mode)")
    p.add_argument("--size", default="224x224", help="HxW, e.g. 64x64")
    p.add_argument("--manifest", help="dataset manifest for batch image export")
    p.add_argument("--source", default="accel", choices=["accel", "voltage"])
    p.add_argument("--model", help="reduced model artifact for --source voltage")
    p.set_defaults(func=_cmd_cwt)

    p = sub.add_parser("speed", help="vehicle speed from strain CSVs")
    p.add_argument("--strains", nargs="+", required=True)
    p.add_argument("--spacing", type=float, required=True, help="sensor spacing D in m")
    p.set_defaults(func=_cmd_speed)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    p.add_argument("--mix", default="649,490,126", help="events per class")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.add_argument("--snr", type=float, default=20.0)
    p.add_argument("--no-strains", action="store_true", help="skip strain channels")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train-baseline", help="train the linear classifier on a dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train_baseline)

    p = sub.add_parser("eval-baseline", help="70/30 x N evaluation protocol")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_eval_baseline)

    p = sub.add_parser("sweep", help="six-device energy/accuracy study")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--classifier", choices=["baseline", "external-cnn"])
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PehError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
