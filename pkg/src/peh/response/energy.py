"""Harvested electrical energy from a voltage record."""

from __future__ import annotations

import numpy as np

from peh.errors import TimeSeriesError
from peh.response.timeseries import Quantity, TimeSeries


def harvested_energy(voltage: TimeSeries, load_resistance_ohm: float, t1: float, t2: float) -> float:
    """Trapezoidal integral of v^2 / R_l over [t1, t2], in joules."""
    if voltage.quantity is not Quantity.VOLTAGE:
        raise TimeSeriesError(f"harvested_energy needs a voltage series, got {voltage.quantity}")
    if not load_resistance_ohm > 0.0:
        raise ValueError("load resistance must be positive")
    if not t1 < t2:
        raise ValueError(f"need t1 < t2, got [{t1}, {t2}]")
    window = voltage.slice(t1, t2)
    power = window.values**2 / load_resistance_ohm
    return float(np.trapezoid(power, dx=window.dt))
