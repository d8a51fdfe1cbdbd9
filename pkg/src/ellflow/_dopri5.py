"""Dormand-Prince 5(4) tableau, dense-output coefficients and step control.

The same pair drives the specialised flow stepper (see ``backend``) and the
generic linear solves for the evolution operators.
"""

from __future__ import annotations

import numpy as np

from .errors import StepSizeUnderflow, ToleranceUnreachable

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])

A = [
    np.array([], dtype=float),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]

# 5th-order weights; the 7th stage is FSAL.
B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])

# b5 - b4, applied to the stages gives the embedded error estimate.
E = np.array(
    [
        71 / 57600,
        0.0,
        -71 / 16695,
        71 / 1920,
        -17253 / 339200,
        22 / 525,
        -1 / 40,
    ]
)

# Quartic dense-output weights (rcont5 combination).
D = np.array(
    [
        -12715105075 / 11282082432,
        0.0,
        87487479700 / 32700410799,
        -10690763975 / 1880347072,
        701980252875 / 199316789632,
        -1453857185 / 822651844,
        69997945 / 29380423,
    ]
)

SAFETY = 0.9
BETA = 0.04
EXPO1 = 0.2 - BETA * 0.75
FAC_MIN = 0.2  # max shrink per step is 1/FAC_MIN
FAC_MAX = 10.0  # max growth per step
MAX_CONSECUTIVE_REJECTS = 60


def error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, rtol: float, atol: float) -> float:
    """Weighted RMS of the embedded error estimate (<= 1 means accept)."""
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    ratio = np.abs(err) / scale
    return float(np.sqrt(np.mean(ratio * ratio)))


class StepController:
    """PI step-size controller for the embedded 5(4) pair."""

    def __init__(self, h_init: float, h_max: float, h_floor: float):
        self.h = float(h_init)
        self.h_max = float(h_max)
        self.h_floor = float(h_floor)
        self.fac_old = 1e-4
        self.rejects_in_a_row = 0

    def clamp(self, remaining: float, cap: float = np.inf) -> float:
        self.h = min(self.h, self.h_max, cap, remaining)
        if self.h < self.h_floor:
            raise StepSizeUnderflow(f"step {self.h:g} below floor {self.h_floor:g}")
        return self.h

    def update(self, err: float, accepted: bool) -> None:
        if not np.isfinite(err):
            err = 1e10
        fac11 = err**EXPO1 if err > 0.0 else 0.0
        if accepted:
            fac = fac11 / self.fac_old**BETA
            fac = max(1.0 / FAC_MAX, min(1.0 / FAC_MIN, fac / SAFETY))
            self.h = self.h / fac
            self.fac_old = max(err, 1e-4)
            self.rejects_in_a_row = 0
        else:
            self.h = self.h / min(1.0 / FAC_MIN, fac11 / SAFETY)
            self.rejects_in_a_row += 1
            if self.rejects_in_a_row > MAX_CONSECUTIVE_REJECTS:
                raise ToleranceUnreachable(
                    f"{self.rejects_in_a_row} consecutive rejected steps"
                )


def generic_step(f, t: float, y: np.ndarray, h: float, k1: np.ndarray):
    """One 5(4) step for a generic (possibly matrix-valued) right-hand side.

    Returns ``(y5, err, k7)`` with ``k7 = f(t + h, y5)`` reusable as the next
    step's first stage.
    """
    k = [k1]
    for i in range(1, 7):
        yi = y + h * np.tensordot(A[i], np.array(k[:i]), axes=(0, 0))
        k.append(f(t + C[i] * h, yi))
    karr = np.array(k)
    y5 = y + h * np.tensordot(B, karr, axes=(0, 0))
    err = h * np.tensordot(E, karr, axes=(0, 0))
    return y5, err, k[6]


def solve_linear_ode(f, t0: float, t1: float, y0: np.ndarray, rtol: float, atol: float, h_init: float | None = None):
    """Adaptively integrate ``y' = f(t, y)`` from t0 to t1, returning y(t1)."""
    if t1 < t0:
        raise ValueError("need t1 >= t0")
    span = t1 - t0
    if span == 0.0:
        return y0.copy()
    h0 = h_init if h_init is not None else span / 64.0
    ctrl = StepController(h0, span, max(1e-14 * span, 1e-300))
    t = t0
    y = np.array(y0, dtype=np.complex128)
    k1 = f(t, y)
    while t < t1:
        h = ctrl.clamp(t1 - t)
        y5, err_vec, k7 = generic_step(f, t, y, h, k1)
        err = error_norm(err_vec, y, y5, rtol, atol)
        if err <= 1.0:
            t = t1 if abs(t + h - t1) < 1e-14 * max(1.0, abs(t1)) else t + h
            y = y5
            k1 = k7
            ctrl.update(err, accepted=True)
        else:
            ctrl.update(err, accepted=False)
    return y
