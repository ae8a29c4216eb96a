"""Labeled synthetic bridge-traffic data: events, datasets, long windows."""

from peh.synth.generator import TrafficScenario, synth_event, synth_long_window
from peh.synth.dataset import DatasetManifest, EventRecord, load_manifest, synth_dataset

__all__ = [
    "DatasetManifest",
    "EventRecord",
    "TrafficScenario",
    "load_manifest",
    "synth_dataset",
    "synth_event",
    "synth_long_window",
]
