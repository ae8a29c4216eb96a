"""Ground-truth vehicle speed from strain-gauge pairs, and class labels.

The transit time between two gauges a known distance apart is read off the
peak of their normalized cross-correlation after band-passing away the
common-mode bridge response; a parabolic fit around the peak refines the
delay below one sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.signal

from peh.errors import SpeedDirectionError, SpeedEstimateError, TimeSeriesError
from peh.response.timeseries import TimeSeries

BAND_HZ = (0.5, 30.0)
MIN_PEAK_CORRELATION = 0.5
PAIR_DISAGREEMENT_LIMIT = 0.10


class SpeedClass(str, Enum):
    C30 = "C30"
    C40 = "C40"
    C50 = "C50"
    EXCLUDED = "Excluded"


# Closed class bins in km/h; everything outside (including the gaps
# (38, 42) and (48, 50)) is excluded from training.
CLASS_BINS = {
    SpeedClass.C30: (30.0, 38.0),
    SpeedClass.C40: (42.0, 48.0),
    SpeedClass.C50: (50.0, 60.0),
}


@dataclass(frozen=True)
class SpeedLabel:
    speed_kmh: float
    speed_class: SpeedClass


def label_speed(speed_kmh: float) -> SpeedLabel:
    """Bin a speed; gap and out-of-range speeds land in Excluded."""
    if not np.isfinite(speed_kmh) or speed_kmh <= 0.0:
        raise ValueError(f"speed must be finite and positive, got {speed_kmh}")
    for cls, (lo, hi) in CLASS_BINS.items():
        if lo <= speed_kmh <= hi:
            return SpeedLabel(speed_kmh, cls)
    return SpeedLabel(speed_kmh, SpeedClass.EXCLUDED)


def _band_pass(values: np.ndarray, sample_rate: float) -> np.ndarray:
    nyquist = sample_rate / 2.0
    sos = scipy.signal.butter(
        4, [BAND_HZ[0] / nyquist, BAND_HZ[1] / nyquist], btype="bandpass", output="sos"
    )
    # Zero-phase filtering: both channels get identical group delay (none).
    return scipy.signal.sosfiltfilt(sos, values)


def estimate_speed(strain_a: TimeSeries, strain_b: TimeSeries, spacing_m: float) -> float:
    """Speed in km/h from the delay of strain_b relative to strain_a.

    strain_a is the upstream gauge: a vehicle must reach it first, so the
    recovered delay has to be positive.
    """
    if strain_a.sample_rate_hz != strain_b.sample_rate_hz:
        raise TimeSeriesError("strain pair must share one sample rate")
    if not spacing_m > 0.0:
        raise ValueError("sensor spacing must be positive")
    a = _band_pass(strain_a.values, strain_a.sample_rate_hz)
    b = _band_pass(strain_b.values, strain_b.sample_rate_hz)

    corr = scipy.signal.correlate(b, a, mode="full")
    denom = np.sqrt(np.sum(a * a) * np.sum(b * b))
    if denom <= 0.0:
        raise SpeedEstimateError("strain channels carry no signal")
    corr /= denom
    peak = int(np.argmax(corr))
    if corr[peak] < MIN_PEAK_CORRELATION:
        raise SpeedEstimateError(
            f"correlation peak {corr[peak]:.3f} below {MIN_PEAK_CORRELATION}; "
            "estimate unreliable"
        )
    lag = float(peak - (len(a) - 1))
    if 0 < peak < len(corr) - 1:
        left, mid, right = corr[peak - 1], corr[peak], corr[peak + 1]
        curvature = left - 2.0 * mid + right
        if curvature < 0.0:
            lag += 0.5 * (left - right) / curvature
    delay_s = lag / strain_a.sample_rate_hz
    if delay_s <= 0.0:
        raise SpeedDirectionError(f"non-positive inter-sensor delay {delay_s:.4f} s")
    return 3.6 * spacing_m / delay_s


@dataclass(frozen=True)
class EventSpeedEstimate:
    speed_kmh: float
    pair_speeds_kmh: tuple[float, float]
    flagged: bool


def estimate_event_speed(
    strains: tuple[TimeSeries, TimeSeries, TimeSeries, TimeSeries], spacing_m: float
) -> EventSpeedEstimate:
    """Average the two independent pair estimates; flag >10% disagreement."""
    v1 = estimate_speed(strains[0], strains[1], spacing_m)
    v2 = estimate_speed(strains[2], strains[3], spacing_m)
    mean = 0.5 * (v1 + v2)
    flagged = abs(v1 - v2) > PAIR_DISAGREEMENT_LIMIT * mean
    return EventSpeedEstimate(speed_kmh=mean, pair_speeds_kmh=(v1, v2), flagged=flagged)
