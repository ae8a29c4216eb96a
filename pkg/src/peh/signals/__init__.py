"""Event extraction, Morlet scalograms, classifier images, speed labels."""

from peh.signals.events import DetectOpts, EventWindow, detect_events
from peh.signals.cwt import Scalogram, cwt_complex, cwt_morlet, default_frequency_grid
from peh.signals.images import image_from_scalogram, load_image_tensor, render_image, save_image_tensor
from peh.signals.speed import (
    SpeedClass,
    SpeedLabel,
    estimate_event_speed,
    estimate_speed,
    label_speed,
)

__all__ = [
    "DetectOpts",
    "EventWindow",
    "Scalogram",
    "SpeedClass",
    "SpeedLabel",
    "cwt_complex",
    "cwt_morlet",
    "default_frequency_grid",
    "detect_events",
    "estimate_event_speed",
    "estimate_speed",
    "image_from_scalogram",
    "label_speed",
    "load_image_tensor",
    "render_image",
    "save_image_tensor",
]
