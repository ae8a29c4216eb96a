"""Modal reduction of the assembled plate and the beam validation oracle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from peh.errors import ConfigError, EigenSolverError
from peh.model.assembly import DiscreteOperators, assemble_plate
from peh.model.config import DeviceConfig

# Mode truncation targets 1.5x the 200 Hz image band so the kept modes
# cover everything the classifier can see.
AUTO_MODE_BAND_HZ = 300.0
AUTO_MODE_RANGE = (4, 12)


@dataclass(frozen=True)
class ReducedModel:
    """Mass-normalized modal operators driving the coupled voltage equations.

    Attributes:
        natural_freqs_rad: ascending circular frequencies omega_i (rad/s).
        mode_shapes: N x K matrix of mass-normalized modes (Phi' M Phi = I).
        k_o: K x K diag(omega_i^2).
        c_o: K x K modal Rayleigh damping alpha*I + beta*k_o.
        theta_o: K-vector, voltage-to-modal-force coupling Phi' Theta.
        theta_phi: K-vector, velocity-to-current coupling Theta' Phi
            (numerically theta_o transposed; kept separate to mirror the
            circuit equation).
        f_o: K-vector, modal participation of base acceleration.
        capacitance_f / load_resistance_ohm: circuit constants.
    """

    natural_freqs_rad: np.ndarray
    mode_shapes: np.ndarray
    k_o: np.ndarray
    c_o: np.ndarray
    theta_o: np.ndarray
    theta_phi: np.ndarray
    f_o: np.ndarray
    capacitance_f: float
    load_resistance_ohm: float

    @property
    def n_modes(self) -> int:
        return len(self.natural_freqs_rad)

    @property
    def natural_freqs_hz(self) -> np.ndarray:
        return self.natural_freqs_rad / (2.0 * math.pi)

    def modal_damping_ratios(self) -> np.ndarray:
        return np.diag(self.c_o) / (2.0 * self.natural_freqs_rad)

    def to_json(self, path: str | Path) -> None:
        data = {
            "natural_freqs_rad": self.natural_freqs_rad.tolist(),
            "mode_shapes": self.mode_shapes.tolist(),
            "theta_o": self.theta_o.tolist(),
            "f_o": self.f_o.tolist(),
            "c_o_diag": np.diag(self.c_o).tolist(),
            "capacitance_f": self.capacitance_f,
            "load_resistance_ohm": self.load_resistance_ohm,
        }
        Path(path).write_text(json.dumps(data) + "\n")

    @classmethod
    def from_json(cls, path: str | Path) -> "ReducedModel":
        data = json.loads(Path(path).read_text())
        omega = np.asarray(data["natural_freqs_rad"], dtype=float)
        theta_o = np.asarray(data["theta_o"], dtype=float)
        return cls(
            natural_freqs_rad=omega,
            mode_shapes=np.asarray(data["mode_shapes"], dtype=float),
            k_o=np.diag(omega**2),
            c_o=np.diag(np.asarray(data["c_o_diag"], dtype=float)),
            theta_o=theta_o,
            theta_phi=theta_o.copy(),
            f_o=np.asarray(data["f_o"], dtype=float),
            capacitance_f=float(data["capacitance_f"]),
            load_resistance_ohm=float(data["load_resistance_ohm"]),
        )


def solve_modes(
    ops: DiscreteOperators,
    n_modes: int,
    rayleigh_alpha: float = 14.65,
    rayleigh_beta: float = 1.0e-5,
    load_resistance_ohm: float = 100.0,
) -> ReducedModel:
    """Smallest n_modes of K phi = omega^2 M phi, mass-normalized, ascending.

    Builds the reduced operators from the raw eigenpairs; scipy's
    generalized symmetric driver already returns Phi' M Phi = I vectors.
    """
    if not ops.clamped:
        raise ConfigError("solve_modes expects clamped operators (rigid modes otherwise)")
    if n_modes > ops.dof_count:
        raise ConfigError(f"requested {n_modes} modes but only {ops.dof_count} free DOFs")
    try:
        omega_sq, phi = scipy.linalg.eigh(
            ops.stiffness, ops.mass, subset_by_index=[0, n_modes - 1]
        )
    except scipy.linalg.LinAlgError as exc:
        info = getattr(exc, "info", None)
        raise EigenSolverError(f"generalized eigensolver failed to converge: {exc}", info) from exc
    if np.any(omega_sq <= 0.0):
        raise EigenSolverError(
            f"non-positive eigenvalue {omega_sq.min():.3e}; clamped stiffness not PD"
        )
    omega = np.sqrt(omega_sq)
    k_o = np.diag(omega_sq)
    return ReducedModel(
        natural_freqs_rad=omega,
        mode_shapes=phi,
        k_o=k_o,
        c_o=rayleigh_alpha * np.eye(n_modes) + rayleigh_beta * k_o,
        theta_o=phi.T @ ops.coupling,
        theta_phi=ops.coupling @ phi,
        f_o=phi.T @ ops.base_force,
        capacitance_f=ops.capacitance_f,
        load_resistance_ohm=load_resistance_ohm,
    )


def auto_mode_count(ops: DiscreteOperators) -> int:
    """Smallest K with f_K >= AUTO_MODE_BAND_HZ, clamped to AUTO_MODE_RANGE."""
    lo, hi = AUTO_MODE_RANGE
    hi = min(hi, ops.dof_count)
    probe = solve_modes(ops, hi)
    freqs_hz = probe.natural_freqs_hz
    above = np.nonzero(freqs_hz >= AUTO_MODE_BAND_HZ)[0]
    k = int(above[0]) + 1 if len(above) else hi
    return max(lo, min(k, hi))


def reduce_device(config: DeviceConfig, n_modes: int | None = None) -> ReducedModel:
    """Assemble + solve in one step, honoring the config's mode policy."""
    ops = assemble_plate(config)
    if n_modes is None:
        n_modes = config.num_modes if config.num_modes is not None else auto_mode_count(ops)
    return solve_modes(
        ops,
        n_modes,
        rayleigh_alpha=config.rayleigh_alpha,
        rayleigh_beta=config.rayleigh_beta,
        load_resistance_ohm=config.load_resistance_ohm,
    )


def beam_oracle_f1(config: DeviceConfig) -> float:
    """Closed-form composite Euler-Bernoulli fundamental frequency in Hz.

    Independent of the plate discretization: per-width bending rigidity of
    the three-layer stack without Poisson stiffening, first cantilever root
    1.875. Used as the validation oracle for the plate result.
    """
    config.geometry.validate()
    g = config.geometry
    hp, hs = g.piezo_thickness_m, g.substrate_thickness_m
    e_s = config.substrate.youngs_modulus_pa
    e_p = config.piezo.youngs_modulus_pa
    rigidity = e_s * hs**3 / 12.0 + (2.0 / 3.0) * e_p * ((hs / 2.0 + hp) ** 3 - (hs / 2.0) ** 3)
    areal_mass = config.substrate.density_kg_m3 * hs + 2.0 * config.piezo.density_kg_m3 * hp
    lam1 = 1.875104068711961  # first root of cos(x)cosh(x) = -1
    return (lam1**2 / (2.0 * math.pi)) * math.sqrt(
        rigidity / (areal_mass * g.length_m**4)
    )
