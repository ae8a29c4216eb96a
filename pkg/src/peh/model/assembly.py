"""Galerkin assembly of the bimorph Kirchhoff-Love cantilever plate.

The deflection field lives on a tensor-product B-spline basis (open knot
vectors, same degree in both directions). Bending rigidity follows
classical lamination of the substrate plus two identical piezo skins under
plane stress; areal mass is the through-thickness density integral. The
clamped edge at x = 0 is imposed strongly by dropping the first two
control-coefficient columns (deflection and normal slope).

DOF ordering: I = i * n_y + j for basis (i, j) with i along the length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from peh.errors import AssemblyError
from peh.model.bsplines import BasisGrid
from peh.model.config import DeviceConfig, Material, Wiring


@dataclass(frozen=True)
class Laminate:
    """Plane-stress bending constants of the substrate + 2x piezo stack."""

    d11: float
    d12: float
    d66: float
    areal_mass_kg_m2: float
    coupling_arm_c_per_m: float  # e31 * moment arm, already wiring-adjusted


def _plane_stress_rigidity(material: Material, z_lo: float, z_hi: float) -> tuple[float, float, float]:
    """(D11, D12, D66) contribution of one isotropic layer spanning [z_lo, z_hi]."""
    e, nu = material.youngs_modulus_pa, material.poisson_ratio
    third_moment = (z_hi**3 - z_lo**3) / 3.0
    q11 = e / (1.0 - nu * nu)
    return q11 * third_moment, nu * q11 * third_moment, 0.5 * (1.0 - nu) * q11 * third_moment


def laminate_constants(config: DeviceConfig) -> Laminate:
    """Bending rigidities, areal mass, and electromechanical arm of the stack."""
    hp = config.geometry.piezo_thickness_m
    hs = config.geometry.substrate_thickness_m
    d11, d12, d66 = _plane_stress_rigidity(config.substrate, -hs / 2.0, hs / 2.0)
    p11, p12, p66 = _plane_stress_rigidity(config.piezo, hs / 2.0, hs / 2.0 + hp)
    # The two piezo skins are symmetric about the mid-plane: double one skin.
    d11 += 2.0 * p11
    d12 += 2.0 * p12
    d66 += 2.0 * p66
    areal_mass = config.substrate.density_kg_m3 * hs + 2.0 * config.piezo.density_kg_m3 * hp
    # Series: layer voltages add, each skin carries v/2 -> arm e31*(hp+hs)/2.
    # Parallel: both skins see full v -> current doubles, arm doubles.
    arm = config.piezo.e31_c_per_m2 * (hp + hs) / 2.0
    if config.wiring is Wiring.PARALLEL:
        arm *= 2.0
    return Laminate(d11, d12, d66, areal_mass, arm)


def capacitance(config: DeviceConfig) -> float:
    """Equivalent electrode capacitance of the two piezo layers in farads.

    Series wiring puts the two layer capacitances in series (half of one
    layer); parallel wiring puts them in parallel (twice one layer).
    """
    config.validate()
    g = config.geometry
    layer = config.piezo.eps33s_f_per_m * g.length_m * g.width_m / g.piezo_thickness_m
    if config.wiring is Wiring.SERIES:
        return layer / 2.0
    return 2.0 * layer


@dataclass(frozen=True)
class DiscreteOperators:
    """Assembled (and by default clamped) plate operators.

    mass and stiffness are dense symmetric N x N; coupling maps deflection
    DOFs to electrode charge (C/m per DOF); base_force is the -M*1 inertial
    participation of uniform base acceleration.
    """

    mass: np.ndarray
    stiffness: np.ndarray
    coupling: np.ndarray
    base_force: np.ndarray
    capacitance_f: float
    dof_count: int
    clamped: bool

    def __post_init__(self):
        for name in ("mass", "stiffness"):
            m = getattr(self, name)
            scale = np.abs(m).max()
            if scale > 0 and np.abs(m - m.T).max() > 1e-12 * scale:
                raise AssemblyError(f"{name} matrix lost symmetry during assembly")


def assemble_plate(config: DeviceConfig, apply_clamp: bool = True) -> DiscreteOperators:
    """Assemble mass/stiffness/coupling operators for one device.

    With apply_clamp=True (default) the clamped-edge columns are eliminated
    and the stiffness is positive definite; with False the free-free
    operators are returned (stiffness only positive semidefinite).
    """
    config.validate()
    lam = laminate_constants(config)
    g = config.geometry
    nx, ny = config.control_net
    p = config.spline_degree

    bx = BasisGrid(nx, p, 0.0, g.length_m)
    by = BasisGrid(ny, p, 0.0, g.width_m)

    # 1D weighted Gram matrices between derivative orders.
    ax0, ay0 = bx.moment(0, 0), by.moment(0, 0)
    ax1, ay1 = bx.moment(1, 1), by.moment(1, 1)
    ax2, ay2 = bx.moment(2, 2), by.moment(2, 2)
    cx20, cy02 = bx.moment(2, 0), by.moment(0, 2)

    mass = lam.areal_mass_kg_m2 * np.kron(ax0, ay0)
    # Curvature energy: D11 w,xx^2 + D11 w,yy^2 + 2 D12 w,xx w,yy + 4 D66 w,xy^2
    # (isotropic-layer laminate, so D22 = D11).
    stiffness = (
        lam.d11 * (np.kron(ax2, ay0) + np.kron(ax0, ay2))
        + lam.d12 * (np.kron(cx20, cy02) + np.kron(cx20.T, cy02.T))
        + 4.0 * lam.d66 * np.kron(ax1, ay1)
    )
    stiffness = 0.5 * (stiffness + stiffness.T)

    # Coupling against the curvature trace; 1D integrals Kronecker-combine.
    vx0, vy0 = bx.integral(0), by.integral(0)
    vx2, vy2 = bx.integral(2), by.integral(2)
    coupling = lam.coupling_arm_c_per_m * (np.kron(vx2, vy0) + np.kron(vx0, vy2))

    base_force = -mass @ np.ones(nx * ny)

    if apply_clamp:
        keep = np.repeat(np.arange(nx) >= 2, ny)
        mass = mass[np.ix_(keep, keep)]
        stiffness = stiffness[np.ix_(keep, keep)]
        coupling = coupling[keep]
        base_force = base_force[keep]

    _check_conditioning(mass, stiffness, config, clamped=apply_clamp)

    return DiscreteOperators(
        mass=mass,
        stiffness=stiffness,
        coupling=coupling,
        base_force=base_force,
        capacitance_f=capacitance(config),
        dof_count=mass.shape[0],
        clamped=apply_clamp,
    )


def _check_conditioning(mass, stiffness, config: DeviceConfig, clamped: bool) -> None:
    nx, ny = config.control_net
    diag_m = np.diag(mass)
    if not np.all(np.isfinite(mass)) or not np.all(np.isfinite(stiffness)):
        raise AssemblyError("assembly produced non-finite entries")
    if np.any(diag_m <= 0.0):
        raise AssemblyError("mass matrix has non-positive diagonal entries")
    # A collapsed quadrature span shows up as a vanishing diagonal band;
    # name the direction so the offending control-net dimension is clear.
    cond = np.linalg.cond(mass)
    if cond > 1e14:
        dim = "n_x" if nx <= ny else "n_y"
        raise AssemblyError(
            f"mass matrix condition number {cond:.2e} indicates a mesh too "
            f"coarse or degenerate in {dim} (control_net={config.control_net})"
        )
    if clamped:
        # Clamped stiffness must be PD; Cholesky is the cheap certificate.
        try:
            np.linalg.cholesky(stiffness + 0.0)
        except np.linalg.LinAlgError as exc:
            raise AssemblyError(
                f"clamped stiffness not positive definite (control_net="
                f"{config.control_net}, degree {config.spline_degree}); "
                f"refine n_x"
            ) from exc
