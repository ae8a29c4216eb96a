"""Event detection, Morlet CWT, image rendering, speed estimation, labels."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peh.errors import SpeedDirectionError, SpeedEstimateError
from peh.response.timeseries import Quantity, TimeSeries
from peh.signals import (
    Scalogram,
    cwt_complex,
    cwt_morlet,
    default_frequency_grid,
    detect_events,
    estimate_event_speed,
    estimate_speed,
    image_from_scalogram,
    label_speed,
    load_image_tensor,
    save_image_tensor,
)
from peh.signals.speed import SpeedClass

FS = 600.0


def impulse_trace(duration_s: float, peak_times_s: list[float], seed: int = 0) -> TimeSeries:
    """Noise floor with decaying 21 Hz bursts planted at given times."""
    rng = np.random.default_rng(seed)
    n = int(duration_s * FS)
    t = np.arange(n) / FS
    values = 0.01 * rng.normal(size=n)
    for peak in peak_times_s:
        mask = t >= peak
        tau = t[mask] - peak
        values[mask] += 1.0 * np.exp(-tau / 1.5) * np.sin(2.0 * np.pi * 21.0 * tau)
    return TimeSeries(0.0, FS, values, Quantity.ACCELERATION)


class TestDetectEvents:
    def test_single_impulse_window(self):
        trace = impulse_trace(130.0, [100.0])
        windows = detect_events(trace)
        assert len(windows) == 1
        w = windows[0]
        assert abs(w.peak_time_s - 100.0) < 0.5
        assert w.start_s == pytest.approx(w.peak_time_s - 10.0)
        assert w.end_s == pytest.approx(w.peak_time_s + 15.0)
        assert len(w.accel) == 15000

    def test_close_events_merge(self):
        trace = impulse_trace(130.0, [60.0, 72.0])
        assert len(detect_events(trace)) == 1

    def test_forty_planted_events(self):
        peaks = [30.0 + 32.0 * i for i in range(40)]
        trace = impulse_trace(peaks[-1] + 40.0, peaks, seed=4)
        windows = detect_events(trace)
        assert len(windows) == 40
        for w in windows:
            assert len(w.accel) == 15000

    def test_short_record_empty(self):
        trace = TimeSeries(0.0, FS, np.zeros(600), Quantity.ACCELERATION)
        assert detect_events(trace) == []

    def test_boundary_windows_dropped(self):
        trace = impulse_trace(60.0, [5.0])  # window would start before record
        assert detect_events(trace) == []


class TestCwt:
    @pytest.mark.parametrize("tone_hz", [10, 25, 50, 100, 150, 200])
    def test_tone_ridge_within_one_bin(self, tone_hz):
        t = np.arange(int(8 * FS)) / FS
        series = TimeSeries(0.0, FS, np.sin(2 * np.pi * tone_hz * t), Quantity.ACCELERATION)
        sc = cwt_morlet(series)
        interior = slice(len(t) // 4, 3 * len(t) // 4)
        assert np.abs(sc.ridge()[interior] - tone_hz).max() <= 1.0

    def test_tone_ridge_magnitude_scale_free(self):
        mags = []
        t = np.arange(int(8 * FS)) / FS
        for tone in (10, 50, 200):
            series = TimeSeries(0.0, FS, np.sin(2 * np.pi * tone * t), Quantity.ACCELERATION)
            sc = cwt_morlet(series)
            mags.append(sc.magnitude[:, len(t) // 2].max())
        assert np.ptp(mags) / np.mean(mags) < 0.01

    def test_chirp_ridge_within_two_bins(self):
        import scipy.signal

        duration = 20.0
        t = np.arange(int(duration * FS)) / FS
        series = TimeSeries(0.0, FS, scipy.signal.chirp(t, 10.0, duration, 150.0),
                            Quantity.ACCELERATION)
        sc = cwt_morlet(series)
        instantaneous = 10.0 + (150.0 - 10.0) * t / duration
        interior = slice(int(0.1 * len(t)), int(0.9 * len(t)))
        assert np.abs(sc.ridge()[interior] - instantaneous[interior]).max() <= 2.0

    def test_complex_linearity(self):
        rng = np.random.default_rng(0)
        a = TimeSeries(0.0, FS, rng.normal(size=1500), Quantity.ACCELERATION)
        b = TimeSeries(0.0, FS, rng.normal(size=1500), Quantity.ACCELERATION)
        both = TimeSeries(0.0, FS, a.values + b.values, Quantity.ACCELERATION)
        freqs = default_frequency_grid()
        residual = cwt_complex(both, freqs) - cwt_complex(a, freqs) - cwt_complex(b, freqs)
        assert np.abs(residual).max() < 1e-10

    def test_above_nyquist_rejected(self):
        series = TimeSeries(0.0, FS, np.zeros(600), Quantity.ACCELERATION)
        with pytest.raises(ValueError):
            cwt_morlet(series, np.array([301.0]))


def synthetic_scalogram(fill=None, n_f=60, n_t=80):
    freqs = np.linspace(1.0, 200.0, n_f)
    times = np.linspace(0.0, 25.0, n_t)
    if fill is None:
        rng = np.random.default_rng(5)
        magnitude = rng.uniform(0.0, 1.0, size=(n_f, n_t))
    else:
        magnitude = np.full((n_f, n_t), float(fill))
    return Scalogram(freqs, times, magnitude)


class TestImages:
    def test_constant_scalogram_maps_to_zeros(self):
        image = image_from_scalogram(synthetic_scalogram(fill=3.0), size=(32, 32))
        assert np.all(image == 0.0)

    def test_crop_time_span(self):
        sc = synthetic_scalogram()
        image = image_from_scalogram(sc, time_crop_s=(5.0, 25.0), size=(16, 16))
        assert image.shape == (16, 16)
        assert image.min() >= 0.0 and image.max() <= 1.0

    def test_identity_resample(self):
        n_f, n_t = 40, 50
        sc = synthetic_scalogram(n_f=n_f, n_t=n_t)
        # Same grid in, same grid out: the interpolator must be exact.
        image1 = image_from_scalogram(sc, time_crop_s=(0.0, 25.0),
                                      freq_crop_hz=(1.0, 200.0), size=(n_f, n_t))
        rescaled = Scalogram(sc.freqs_hz, sc.times_s, image1)
        image2 = image_from_scalogram(rescaled, time_crop_s=(0.0, 25.0),
                                      freq_crop_hz=(1.0, 200.0), size=(n_f, n_t))
        assert np.abs(image2 - image1).max() < 1e-6

    def test_degenerate_crop_rejected(self):
        with pytest.raises(ValueError):
            image_from_scalogram(synthetic_scalogram(), time_crop_s=(10.0, 10.0))

    def test_tensor_round_trip(self, tmp_path):
        image = np.random.default_rng(1).uniform(size=(17, 23))
        path = tmp_path / "img.f32"
        save_image_tensor(image, path)
        loaded = load_image_tensor(path)
        assert loaded.shape == (17, 23)
        assert np.abs(loaded - image).max() < 1e-6  # float32 quantization

    def test_png_export(self, tmp_path):
        from peh.signals.images import save_image_png

        path = tmp_path / "img.png"
        save_image_png(np.random.default_rng(2).uniform(size=(16, 16)), path)
        assert path.stat().st_size > 0


def delayed_pair(delay_s: float, seed: int = 0, noise: float = 0.01):
    rng = np.random.default_rng(seed)
    t = np.arange(int(12 * FS)) / FS
    pulse = np.exp(-0.5 * ((t - 4.0) / 0.12) ** 2) + 0.8 * np.exp(-0.5 * ((t - 4.5) / 0.12) ** 2)
    a = pulse + noise * rng.normal(size=len(t))
    b = np.roll(pulse, int(round(delay_s * FS))) + noise * rng.normal(size=len(t))
    return (
        TimeSeries(0.0, FS, a, Quantity.STRAIN),
        TimeSeries(0.0, FS, b, Quantity.STRAIN),
    )


class TestSpeed:
    def test_hand_delay_value(self):
        a, b = delayed_pair(0.81)
        assert estimate_speed(a, b, 9.0) == pytest.approx(40.0, rel=0.01)

    def test_negative_delay_raises_direction_error(self):
        a, b = delayed_pair(0.81)
        with pytest.raises(SpeedDirectionError):
            estimate_speed(b, a, 9.0)

    def test_uncorrelated_noise_rejected(self):
        rng = np.random.default_rng(9)
        a = TimeSeries(0.0, FS, rng.normal(size=4000), Quantity.STRAIN)
        b = TimeSeries(0.0, FS, rng.normal(size=4000), Quantity.STRAIN)
        with pytest.raises(SpeedEstimateError):
            estimate_speed(a, b, 9.0)

    def test_pair_average_and_flag(self):
        a1, b1 = delayed_pair(0.81, seed=1)
        a2, b2 = delayed_pair(0.81, seed=2)
        est = estimate_event_speed((a1, b1, a2, b2), 9.0)
        assert est.speed_kmh == pytest.approx(40.0, rel=0.01)
        assert not est.flagged
        # Disagreeing pairs (delays 0.81 vs 1.2 s) must be flagged.
        a3, b3 = delayed_pair(1.2, seed=3)
        est = estimate_event_speed((a1, b1, a3, b3), 9.0)
        assert est.flagged


class TestLabels:
    @pytest.mark.parametrize(
        "speed,expected",
        [
            (35.0, SpeedClass.C30),
            (30.0, SpeedClass.C30),
            (38.0, SpeedClass.C30),
            (42.0, SpeedClass.C40),
            (49.0, SpeedClass.EXCLUDED),
            (39.5, SpeedClass.EXCLUDED),
            (50.0, SpeedClass.C50),
            (60.0, SpeedClass.C50),
            (61.0, SpeedClass.EXCLUDED),
            (5.0, SpeedClass.EXCLUDED),
        ],
    )
    def test_bins(self, speed, expected):
        assert label_speed(speed).speed_class is expected

    @given(st.floats(min_value=1e-6, max_value=500.0, allow_nan=False))
    @settings(max_examples=300, deadline=None)
    def test_partition_property(self, speed):
        label = label_speed(speed)
        assert label.speed_class in SpeedClass
        inside_bin = any(
            lo <= speed <= hi
            for lo, hi in ((30.0, 38.0), (42.0, 48.0), (50.0, 60.0))
        )
        assert (label.speed_class is not SpeedClass.EXCLUDED) == inside_bin

    def test_invalid_speed_rejected(self):
        with pytest.raises(ValueError):
            label_speed(-3.0)
        with pytest.raises(ValueError):
            label_speed(float("nan"))
