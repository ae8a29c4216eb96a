"""Voltage frequency response and the coupled state-space operator.

The voltage FRF per unit harmonic base acceleration is

    H_v(w) = i*w*chi * theta_phi @ inv(-w^2 I + i*w c_o + k_o
             + i*w*chi * outer(theta_o, theta_phi)) @ f_o,
    chi    = 1 / (1/R_l + i*w*C_p)

with mass-normalized modes (identity modal mass).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from peh.errors import SimulationError
from peh.model.modal import ReducedModel


@dataclass(frozen=True)
class FrfCurve:
    """Complex voltage-per-acceleration response sampled on freqs_hz."""

    freqs_hz: np.ndarray
    h_v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "freqs_hz", np.asarray(self.freqs_hz, dtype=float))
        object.__setattr__(self, "h_v", np.asarray(self.h_v, dtype=complex))
        if self.freqs_hz.shape != self.h_v.shape:
            raise ValueError("freqs_hz and h_v must have equal length")
        if np.any(self.freqs_hz < 0.0):
            raise ValueError("FRF frequencies must be non-negative")

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.h_v)


def frf_voltage(model: ReducedModel, freqs_hz: np.ndarray) -> FrfCurve:
    """Evaluate the voltage FRF at the given frequencies (Hz, >= 0)."""
    freqs_hz = np.atleast_1d(np.asarray(freqs_hz, dtype=float))
    if np.any(freqs_hz < 0.0):
        raise ValueError("FRF frequencies must be non-negative")
    k = model.n_modes
    identity = np.eye(k)
    coupling = np.outer(model.theta_o, model.theta_phi)
    h = np.empty(len(freqs_hz), dtype=complex)
    for idx, f in enumerate(freqs_hz):
        w = 2.0 * np.pi * f
        chi = 1.0 / (1.0 / model.load_resistance_ohm + 1j * w * model.capacitance_f)
        inner = (-(w**2)) * identity + 1j * w * model.c_o + model.k_o + 1j * w * chi * coupling
        try:
            solved = np.linalg.solve(inner, model.f_o)
        except np.linalg.LinAlgError as exc:
            raise SimulationError(f"FRF inner matrix singular at {f:.6g} Hz") from exc
        h[idx] = 1j * w * chi * (model.theta_phi @ solved)
    return FrfCurve(freqs_hz, h)


def state_matrix(model: ReducedModel) -> tuple[np.ndarray, np.ndarray]:
    """State operator (A, b) for Z = [eta, eta_dot, v], Zdot = A Z + b a_b(t)."""
    k = model.n_modes
    n = 2 * k + 1
    a = np.zeros((n, n))
    a[:k, k : 2 * k] = np.eye(k)
    a[k : 2 * k, :k] = -model.k_o
    a[k : 2 * k, k : 2 * k] = -model.c_o
    a[k : 2 * k, 2 * k] = model.theta_o
    a[2 * k, k : 2 * k] = -model.theta_phi / model.capacitance_f
    a[2 * k, 2 * k] = -1.0 / (model.capacitance_f * model.load_resistance_ohm)
    b = np.zeros(n)
    b[k : 2 * k] = model.f_o
    return a, b
