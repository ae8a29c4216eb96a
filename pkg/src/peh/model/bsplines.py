"""Univariate B-spline basis utilities for the tensor-product Galerkin plate.

Open (clamped) knot vectors with uniform interior knots; basis values and
derivatives are evaluated through scipy's BSpline with an identity
coefficient matrix, which yields the full design matrix in one call.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import BSpline


def open_knot_vector(n_basis: int, degree: int, start: float, end: float) -> np.ndarray:
    """Open knot vector with n_basis functions of the given degree on [start, end]."""
    if n_basis < degree + 1:
        raise ValueError(f"need at least degree+1={degree + 1} basis functions, got {n_basis}")
    n_interior = n_basis - degree - 1
    interior = np.linspace(start, end, n_interior + 2)[1:-1]
    return np.concatenate(
        [np.full(degree + 1, float(start)), interior, np.full(degree + 1, float(end))]
    )


def design_matrix(knots: np.ndarray, degree: int, x: np.ndarray, deriv: int = 0) -> np.ndarray:
    """Dense matrix B with B[i, j] = d^deriv N_j(x_i)."""
    n = len(knots) - degree - 1
    spline = BSpline(knots, np.eye(n), degree, extrapolate=False)
    values = spline(np.asarray(x, dtype=float), nu=deriv)
    return np.nan_to_num(values, nan=0.0)


def gauss_grid(knots: np.ndarray, degree: int, n_gauss: int | None = None):
    """Gauss-Legendre points/weights over every non-empty knot span.

    Returns (points, weights) flattened across spans; n_gauss defaults to
    degree+1 per span, exact for the polynomial integrands of the plate
    forms.
    """
    if n_gauss is None:
        n_gauss = degree + 1
    ref_x, ref_w = np.polynomial.legendre.leggauss(n_gauss)
    spans = np.unique(knots)
    points, weights = [], []
    for a, b in zip(spans[:-1], spans[1:]):
        half = 0.5 * (b - a)
        points.append(0.5 * (a + b) + half * ref_x)
        weights.append(half * ref_w)
    return np.concatenate(points), np.concatenate(weights)


class BasisGrid:
    """Basis values and first/second derivatives on a quadrature grid.

    Precomputes the three design matrices Bk (k = 0, 1, 2) and the
    quadrature weights for one parametric direction.
    """

    def __init__(self, n_basis: int, degree: int, start: float, end: float):
        self.n_basis = n_basis
        self.degree = degree
        self.knots = open_knot_vector(n_basis, degree, start, end)
        self.points, self.weights = gauss_grid(self.knots, degree)
        self.B = [design_matrix(self.knots, degree, self.points, deriv=k) for k in range(3)]

    def moment(self, da: int, db: int) -> np.ndarray:
        """Weighted Gram matrix between the da-th and db-th derivatives."""
        return self.B[da].T @ (self.weights[:, None] * self.B[db])

    def integral(self, deriv: int) -> np.ndarray:
        """Vector of integrals of the deriv-th basis derivatives."""
        return self.B[deriv].T @ self.weights
