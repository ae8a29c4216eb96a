"""Voltage response of a reduced device model: FRF, transients, energy."""

from peh.response.timeseries import Quantity, TimeSeries, load_timeseries, save_timeseries
from peh.response.frf import FrfCurve, frf_voltage, state_matrix
from peh.response.simulate import SolverOpts, simulate_voltage
from peh.response.energy import harvested_energy

__all__ = [
    "FrfCurve",
    "Quantity",
    "SolverOpts",
    "TimeSeries",
    "frf_voltage",
    "harvested_energy",
    "load_timeseries",
    "save_timeseries",
    "simulate_voltage",
    "state_matrix",
]
