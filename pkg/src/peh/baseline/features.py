"""Band/segment energy features summarizing a scalogram.

The grid is 8 log-spaced frequency bands over 1-200 Hz crossed with 10
equal time segments of the [5, 25] s analysis window; each cell holds the
mean squared magnitude. 80 numbers per event, standardized later against
the training split.
"""

from __future__ import annotations

import numpy as np

from peh.signals.cwt import Scalogram

N_FREQ_BANDS = 8
N_TIME_SEGMENTS = 10
FEATURE_LENGTH = N_FREQ_BANDS * N_TIME_SEGMENTS
FREQ_RANGE_HZ = (1.0, 200.0)
TIME_RANGE_S = (5.0, 25.0)


def band_edges_hz() -> np.ndarray:
    return np.logspace(np.log10(FREQ_RANGE_HZ[0]), np.log10(FREQ_RANGE_HZ[1]), N_FREQ_BANDS + 1)


def extract_features(sc: Scalogram) -> np.ndarray:
    """Mean |CWT|^2 per (band, segment) cell, flattened band-major."""
    times = sc.times_s - sc.times_s[0]
    dt = times[1] - times[0] if len(times) > 1 else 0.0
    # A window of n samples spans (n-1)*dt; allow that one-sample shortfall.
    if times[-1] < TIME_RANGE_S[1] - dt - 1e-9:
        raise ValueError(
            f"scalogram spans {times[-1]:.2f} s; features need {TIME_RANGE_S[1]} s"
        )
    if sc.freqs_hz[0] > FREQ_RANGE_HZ[0] + 1e-9 or sc.freqs_hz[-1] < FREQ_RANGE_HZ[1] - 1e-9:
        raise ValueError(
            f"scalogram frequency grid [{sc.freqs_hz[0]}, {sc.freqs_hz[-1]}] Hz "
            f"does not cover {FREQ_RANGE_HZ} Hz"
        )
    power = sc.magnitude**2
    edges_f = band_edges_hz()
    edges_t = np.linspace(TIME_RANGE_S[0], TIME_RANGE_S[1], N_TIME_SEGMENTS + 1)
    features = np.empty(FEATURE_LENGTH)
    cell = 0
    for b in range(N_FREQ_BANDS):
        # Half-open bins except the last, so every grid row lands somewhere.
        in_band = (sc.freqs_hz >= edges_f[b]) & (
            sc.freqs_hz < edges_f[b + 1] if b < N_FREQ_BANDS - 1 else sc.freqs_hz <= edges_f[-1]
        )
        for s in range(N_TIME_SEGMENTS):
            in_seg = (times >= edges_t[s]) & (
                times < edges_t[s + 1] if s < N_TIME_SEGMENTS - 1 else times <= edges_t[-1]
            )
            features[cell] = power[np.ix_(in_band, in_seg)].mean()
            cell += 1
    return features
