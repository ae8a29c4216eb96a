"""Classifier image rendering and the float32 tensor file format.

Tensor file layout: 8-byte header of two little-endian uint32 (height,
width) followed by height*width little-endian float32 values, row-major,
row 0 = lowest frequency.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from peh.signals.cwt import Scalogram

DEFAULT_IMAGE_SIZE = (224, 224)
DEFAULT_TIME_CROP = (5.0, 25.0)
DEFAULT_FREQ_CROP = (0.0, 200.0)


def image_from_scalogram(
    sc: Scalogram,
    time_crop_s: tuple[float, float] = DEFAULT_TIME_CROP,
    freq_crop_hz: tuple[float, float] = DEFAULT_FREQ_CROP,
    size: tuple[int, int] = DEFAULT_IMAGE_SIZE,
) -> np.ndarray:
    """Crop, bilinearly resample to (H, W), and normalize to [0, 1].

    Times in the crop are relative to the scalogram's own start. A
    zero-range (constant) crop maps to all zeros rather than dividing by
    zero.
    """
    t0, t1 = time_crop_s
    f0, f1 = freq_crop_hz
    if not (t0 < t1 and f0 < f1):
        raise ValueError(f"degenerate crop: time [{t0}, {t1}] s, freq [{f0}, {f1}] Hz")
    height, width = size
    if height < 2 or width < 2:
        raise ValueError(f"image size must be at least 2x2, got {size}")

    times = sc.times_s - sc.times_s[0]
    # A window of n samples spans (n-1)*dt; allow that one-sample shortfall
    # at the upper crop edge.
    dt = times[1] - times[0] if len(times) > 1 else 0.0
    if t0 < times[0] - 1e-9 or t1 > times[-1] + dt + 1e-9:
        raise ValueError(
            f"time crop [{t0}, {t1}] s outside scalogram span [0, {times[-1]:.3f}] s"
        )
    # The frequency grid starts at its lowest reachable bin; a crop edge at
    # or below it clamps there (the 0 Hz axis label is nominal).
    f_lo = max(f0, sc.freqs_hz[0])
    f_hi = min(f1, sc.freqs_hz[-1])
    if f_hi <= f_lo:
        raise ValueError(
            f"frequency crop [{f0}, {f1}] Hz misses grid "
            f"[{sc.freqs_hz[0]}, {sc.freqs_hz[-1]}] Hz"
        )

    interp = RegularGridInterpolator(
        (sc.freqs_hz, times), sc.magnitude, method="linear", bounds_error=False, fill_value=None
    )
    target_f = np.linspace(f_lo, f_hi, height)
    target_t = np.linspace(max(t0, times[0]), min(t1, times[-1]), width)
    grid_f, grid_t = np.meshgrid(target_f, target_t, indexing="ij")
    image = interp(np.stack([grid_f.ravel(), grid_t.ravel()], axis=-1)).reshape(height, width)

    lo, hi = image.min(), image.max()
    # Constant fields come back with ~eps interpolation jitter; normalizing
    # that would amplify noise, so treat near-zero ranges as exactly zero.
    if hi - lo <= 1e-12 * max(abs(hi), abs(lo), 1e-300):
        return np.zeros_like(image)
    return (image - lo) / (hi - lo)


def render_image(
    sc: Scalogram,
    out_path: str | Path,
    time_crop_s: tuple[float, float] = DEFAULT_TIME_CROP,
    freq_crop_hz: tuple[float, float] = DEFAULT_FREQ_CROP,
    size: tuple[int, int] = DEFAULT_IMAGE_SIZE,
    png_path: str | Path | None = None,
) -> np.ndarray:
    """Write the normalized image tensor file (and optional grayscale PNG)."""
    image = image_from_scalogram(sc, time_crop_s, freq_crop_hz, size)
    save_image_tensor(image, out_path)
    if png_path is not None:
        save_image_png(image, png_path)
    return image


def save_image_tensor(image: np.ndarray, path: str | Path) -> None:
    if image.ndim != 2:
        raise ValueError("image tensor must be 2-D")
    height, width = image.shape
    with Path(path).open("wb") as fh:
        fh.write(struct.pack("<II", height, width))
        fh.write(np.ascontiguousarray(image, dtype="<f4").tobytes())


def load_image_tensor(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated tensor header")
    height, width = struct.unpack("<II", raw[:8])
    expected = 8 + 4 * height * width
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for {height}x{width}, got {len(raw)}")
    return np.frombuffer(raw[8:], dtype="<f4").reshape(height, width).astype(np.float64)


def save_image_png(image: np.ndarray, path: str | Path) -> None:
    """8-bit grayscale export, highest frequency at the top row."""
    from PIL import Image

    quantized = np.clip(np.round(image * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(quantized[::-1]).save(Path(path))
