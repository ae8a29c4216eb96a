"""Dataset synthesis on disk and the JSON-lines manifest format.

Each manifest line is one event record:

    {"event_id": "ev0000", "accel": "accel/ev0000.csv",
     "strains": ["..."] | null, "speed_kmh": 33.1, "speed_class": "C30"}

Relative paths resolve against the manifest's own directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from peh.errors import TimeSeriesError
from peh.response.timeseries import TimeSeries, load_timeseries, save_timeseries
from peh.signals.speed import CLASS_BINS, SpeedClass
from peh.synth.generator import TrafficScenario, synth_event


@dataclass(frozen=True)
class EventRecord:
    event_id: str
    accel_path: Path
    strain_paths: tuple[Path, Path, Path, Path] | None
    speed_kmh: float
    speed_class: SpeedClass

    def load_accel(self) -> TimeSeries:
        return load_timeseries(self.accel_path)

    def load_strains(self) -> tuple[TimeSeries, ...]:
        if self.strain_paths is None:
            raise TimeSeriesError(f"event {self.event_id} was generated without strain channels")
        return tuple(load_timeseries(p) for p in self.strain_paths)


@dataclass(frozen=True)
class DatasetManifest:
    records: tuple[EventRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def class_counts(self) -> dict[SpeedClass, int]:
        counts = {cls: 0 for cls in SpeedClass}
        for rec in self.records:
            counts[rec.speed_class] += 1
        return counts

    def save(self, path: str | Path) -> None:
        path = Path(path)
        base = path.parent.resolve()

        def encode(p: Path) -> str:
            p = Path(p).resolve()
            try:
                return str(p.relative_to(base))
            except ValueError:
                return str(p)

        with path.open("w") as fh:
            for rec in self.records:
                fh.write(
                    json.dumps(
                        {
                            "event_id": rec.event_id,
                            "accel": encode(rec.accel_path),
                            "strains": (
                                [encode(p) for p in rec.strain_paths]
                                if rec.strain_paths is not None
                                else None
                            ),
                            "speed_kmh": rec.speed_kmh,
                            "speed_class": rec.speed_class.value,
                        }
                    )
                    + "\n"
                )


def load_manifest(path: str | Path) -> DatasetManifest:
    path = Path(path)
    base = path.parent.resolve()

    def resolve(raw: str) -> Path:
        p = Path(raw)
        return p if p.is_absolute() else base / p

    records = []
    try:
        fh_ctx = path.open()
    except OSError as exc:
        raise TimeSeriesError(f"cannot read manifest {path}: {exc}") from exc
    with fh_ctx as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                strains = data.get("strains")
                records.append(
                    EventRecord(
                        event_id=data["event_id"],
                        accel_path=resolve(data["accel"]),
                        strain_paths=(
                            tuple(resolve(p) for p in strains) if strains is not None else None
                        ),
                        speed_kmh=float(data["speed_kmh"]),
                        speed_class=SpeedClass(data["speed_class"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise TimeSeriesError(f"{path}: bad manifest record: {exc}", lineno) from exc
    return DatasetManifest(records=tuple(records))


def synth_dataset(
    mix: tuple[int, int, int],
    template: TrafficScenario,
    seed: int,
    out_dir: str | Path,
    save_strains: bool = True,
    csv_format: str = "%.17g",
) -> DatasetManifest:
    """Generate (n_C30, n_C40, n_C50) labeled events under out_dir.

    Speeds are uniform inside each class interval; every event gets its own
    RNG stream derived from (seed, event index), so datasets are
    reproducible and events independent.
    """
    if any(n < 1 for n in mix):
        raise ValueError(f"need at least one event per class, got mix {mix}")
    out_dir = Path(out_dir)
    (out_dir / "events").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    classes = [SpeedClass.C30, SpeedClass.C40, SpeedClass.C50]
    speeds: list[float] = []
    for cls, count in zip(classes, mix):
        lo, hi = CLASS_BINS[cls]
        speeds.extend(rng.uniform(lo, hi, size=count))
    order = rng.permutation(len(speeds))

    records = []
    for event_index, speed in enumerate(np.asarray(speeds)[order]):
        event_id = f"ev{event_index:05d}"
        scenario = replace(
            template,
            speed_kmh=float(speed),
            rng_seed=int(rng.integers(0, 2**31 - 1)),
        )
        accel, strains, truth = synth_event(scenario)
        accel_path = out_dir / "events" / f"{event_id}_accel.csv"
        save_timeseries(accel, accel_path, fmt=csv_format)
        strain_paths = None
        if save_strains:
            paths = []
            # Lexicographic channel names match the (pair, upstream/downstream)
            # order estimate_event_speed expects, so shell globs pair correctly.
            for channel, series in zip(("1a", "1b", "2a", "2b"), strains):
                p = out_dir / "events" / f"{event_id}_strain_{channel}.csv"
                save_timeseries(series, p, fmt=csv_format)
                paths.append(p)
            strain_paths = tuple(paths)
        records.append(
            EventRecord(
                event_id=event_id,
                accel_path=accel_path,
                strain_paths=strain_paths,
                speed_kmh=float(speed),
                speed_class=truth.speed_class,
            )
        )

    manifest = DatasetManifest(records=tuple(records))
    manifest.save(out_dir / "manifest.jsonl")
    return manifest
