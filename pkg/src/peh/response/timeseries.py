"""Uniformly sampled scalar time series and their CSV file format.

File layout (one value per line after three header lines):

    # quantity: acceleration_m_s2
    # sample_rate_hz: 600.0
    # start_time_s: 0.0
    0.0123
    ...
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from peh.errors import TimeSeriesError


class Quantity(str, Enum):
    ACCELERATION = "acceleration_m_s2"
    STRAIN = "strain_ue"
    VOLTAGE = "voltage_v"


@dataclass(frozen=True)
class TimeSeries:
    """Scalar signal sampled uniformly at sample_rate_hz from start_time_s."""

    start_time_s: float
    sample_rate_hz: float
    values: np.ndarray
    quantity: Quantity

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not self.sample_rate_hz > 0.0:
            raise TimeSeriesError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if self.values.ndim != 1:
            raise TimeSeriesError("time series values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise TimeSeriesError("time series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate_hz

    @property
    def end_time_s(self) -> float:
        return self.start_time_s + (len(self.values) - 1) * self.dt

    @property
    def duration_s(self) -> float:
        return (len(self.values) - 1) * self.dt

    def times(self) -> np.ndarray:
        return self.start_time_s + np.arange(len(self.values)) * self.dt

    def slice(self, t_from: float, t_to: float) -> "TimeSeries":
        """Sub-series covering [t_from, t_to] (sample-aligned, inclusive)."""
        if t_from >= t_to:
            raise TimeSeriesError(f"empty slice [{t_from}, {t_to}]")
        i0 = int(round((t_from - self.start_time_s) * self.sample_rate_hz))
        i1 = int(round((t_to - self.start_time_s) * self.sample_rate_hz))
        if i0 < 0 or i1 >= len(self.values):
            raise TimeSeriesError(
                f"slice [{t_from}, {t_to}] s outside series "
                f"[{self.start_time_s}, {self.end_time_s}] s"
            )
        return TimeSeries(
            start_time_s=self.start_time_s + i0 * self.dt,
            sample_rate_hz=self.sample_rate_hz,
            values=self.values[i0 : i1 + 1].copy(),
            quantity=self.quantity,
        )

    def interp(self, t: float | np.ndarray) -> np.ndarray:
        """Linear interpolation between samples, clamped at the ends."""
        return np.interp(t, self.times(), self.values)


def save_timeseries(series: TimeSeries, path: str | Path, fmt: str = "%.17g") -> None:
    """Write a series in the headered CSV format (defaults keep float64 exact)."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"# quantity: {series.quantity.value}\n")
        fh.write(f"# sample_rate_hz: {float(series.sample_rate_hz)!r}\n")
        fh.write(f"# start_time_s: {float(series.start_time_s)!r}\n")
        np.savetxt(fh, series.values, fmt=fmt)


def _parse_header_line(line: str, key: str, lineno: int) -> str:
    prefix = f"# {key}:"
    if not line.startswith(prefix):
        raise TimeSeriesError(f"expected header '{prefix} ...', got {line.strip()!r}", lineno)
    return line[len(prefix) :].strip()


def load_timeseries(path: str | Path) -> TimeSeries:
    """Read a series written by save_timeseries; errors carry line numbers."""
    path = Path(path)
    try:
        fh_ctx = path.open()
    except OSError as exc:
        raise TimeSeriesError(f"cannot read time series {path}: {exc}") from exc
    with fh_ctx as fh:
        header = [fh.readline() for _ in range(3)]
        if any(not line for line in header):
            raise TimeSeriesError(f"{path}: truncated header", len([h for h in header if h]))
        quantity_raw = _parse_header_line(header[0], "quantity", 1)
        rate_raw = _parse_header_line(header[1], "sample_rate_hz", 2)
        start_raw = _parse_header_line(header[2], "start_time_s", 3)
        try:
            quantity = Quantity(quantity_raw)
        except ValueError as exc:
            raise TimeSeriesError(f"{path}: unknown quantity {quantity_raw!r}", 1) from exc
        try:
            rate = float(rate_raw)
            start = float(start_raw)
        except ValueError as exc:
            raise TimeSeriesError(f"{path}: bad numeric header: {exc}", 2) from exc
        values = []
        for lineno, line in enumerate(fh, start=4):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                values.append(float(stripped))
            except ValueError as exc:
                raise TimeSeriesError(f"{path}: bad value {stripped!r}", lineno) from exc
    if not values:
        raise TimeSeriesError(f"{path}: no samples", 4)
    return TimeSeries(start, rate, np.asarray(values), quantity)
