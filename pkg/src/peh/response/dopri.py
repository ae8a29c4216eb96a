"""Adaptive Dormand-Prince 5(4) integrator with dense output.

Standard DOPRI5 tableau with FSAL and the quartic interpolant used by the
classic ode45-family solvers. Kept dependency-free and lean because the
sweep integrates many small LTI systems where per-step overhead dominates.
"""

from __future__ import annotations

import numpy as np

from peh.errors import SimulationError

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# Difference between 5th and embedded 4th order weights.
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# Dense-output polynomial: y(t0+theta*h) = y0 + h * (K^T P) @ [theta..theta^4].
_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


def _error_norm(err: np.ndarray, scale: np.ndarray) -> float:
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(f, t0, y0, f0, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1)


def integrate_dopri45(
    f,
    t_span: tuple[float, float],
    y0: np.ndarray,
    t_eval: np.ndarray,
    rtol: float = 1e-6,
    atol: float = 1e-9,
    max_step: float = np.inf,
) -> np.ndarray:
    """Integrate y' = f(t, y) forward, returning y at each t_eval.

    t_eval must be ascending and inside t_span; outputs come from the
    per-step dense interpolant, not from forcing step endpoints.
    """
    t0, t_end = float(t_span[0]), float(t_span[1])
    t_eval = np.asarray(t_eval, dtype=float)
    if len(t_eval) and (t_eval[0] < t0 - 1e-12 or t_eval[-1] > t_end + 1e-12):
        raise ValueError("t_eval must lie within t_span")
    y = np.array(y0, dtype=float)
    n = len(y)
    out = np.empty((len(t_eval), n))
    next_out = 0

    t = t0
    k = np.empty((7, n))
    k[0] = f(t, y)
    h = min(_initial_step(f, t, y, k[0], rtol, atol), max_step, t_end - t0)

    while t < t_end:
        h = min(h, t_end - t)
        if h <= 16.0 * np.finfo(float).eps * max(abs(t), 1.0):
            raise SimulationError(f"step size underflow at t = {t:.9g} s")
        for stage in range(1, 7):
            dy = k[:stage].T @ _A[stage]
            k[stage] = f(t + _C[stage] * h, y + h * dy)
        y_new = y + h * (k.T @ _B)
        err = h * (k.T @ _E)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        norm = _error_norm(err, scale)
        if norm > 1.0:
            h *= max(_MIN_FACTOR, _SAFETY * norm**-0.2)
            continue
        # Accepted: emit dense output for every requested time in (t, t+h].
        t_new = t + h
        if next_out < len(t_eval):
            hi = np.searchsorted(t_eval, t_new, side="right")
            if hi > next_out:
                theta = (t_eval[next_out:hi] - t) / h
                powers = np.vstack([theta, theta**2, theta**3, theta**4])
                out[next_out:hi] = y + h * ((k.T @ _P) @ powers).T
                next_out = hi
        y = y_new
        t = t_new
        k[0] = k[6]  # FSAL
        factor = _MAX_FACTOR if norm == 0.0 else min(_MAX_FACTOR, _SAFETY * norm**-0.2)
        h = min(h * factor, max_step)

    if next_out < len(t_eval):
        # Times exactly at t_end that searchsorted left behind.
        out[next_out:] = y
    return out
