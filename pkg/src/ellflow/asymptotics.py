"""Infinite-time limits, decay rates and scalar closed forms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DegenerateDenominator,
    InsufficientSamples,
    NonDecaying,
    NotConverged,
)
from .flow import dense_eval, hs_norm_sq_integral, sample_grid
from .invariants import _check_commuting
from .problem import FlowProblem, Trajectory


@dataclass(frozen=True)
class AsymptoticsResult:
    """Limit operator, energy shift and decay diagnostics of one run."""

    upsilon_inf: np.ndarray
    delta_inf: np.ndarray
    energy_shift: float
    fitted_rate: float
    tail_bound: float
    gap_check: dict

    def to_json(self) -> dict:
        return {
            "upsilon_inf": linalg.matrix_to_json(self.upsilon_inf),
            "delta_inf": linalg.matrix_to_json(self.delta_inf),
            "energy_shift": self.energy_shift,
            "fitted_rate": self.fitted_rate,
            "tail_bound": self.tail_bound,
            "gap_check": dict(self.gap_check),
        }


@dataclass(frozen=True)
class ScalarFlow:
    """One-dimensional flow parameters; ``c = sqrt(alpha^2 + 4 beta^2)``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if self.beta == 0.0:
            raise ValueError("beta must be nonzero")

    @property
    def c(self) -> float:
        return math.hypot(self.alpha, 2.0 * self.beta)


def scalar_closed_form(s: ScalarFlow, t: float):
    """Closed-form (f(t), |g(t)|) of the one-dimensional flow.

    The pair satisfies ``(f - alpha)^2 + 4 |g|^2 = alpha^2 + 4 beta^2``
    exactly for every t >= 0.
    """
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    a, c = s.alpha, s.c
    e = math.exp(-8.0 * c * t)
    den = (c + a) * (1.0 + e) - 2.0 * a
    if abs(den) < 1e-300:
        raise DegenerateDenominator("closed-form denominator vanished")
    ratio = ((c + a) * (1.0 - e) - 2.0 * a) / den
    f = a + c * ratio
    g_mag = 0.5 * c * math.sqrt(max(1.0 - ratio * ratio, 0.0))
    return f, g_mag


def commutative_closed_form(problem: FlowProblem) -> np.ndarray:
    """Limit operator ``sqrt(Ups0^2 + 4 D0 D0*)`` for commuting data."""
    _check_commuting(problem)
    ups0 = problem.upsilon0
    d0 = problem.d0
    arg = linalg.hermitian_part(ups0 @ ups0 + 4.0 * (d0 @ d0.conj().T))
    scale = max(1.0, float(np.linalg.norm(arg)))
    return linalg.psd_sqrt(arg, tol=1e-10 * scale)


def fit_decay_rate(traj: Trajectory, window_fraction: float = 0.3) -> float:
    """Exponential decay rate of ``||D_t||_2`` from the trailing samples.

    Least-squares slope of ``log ||D_t||_2`` over the trailing
    ``window_fraction`` of samples, returned as a positive rate.  The window
    default skips the transient where the ellipticity bound is still
    climbing.
    """
    if not 0.0 < window_fraction <= 1.0:
        raise ValueError("window_fraction must be in (0, 1]")
    ts = sample_grid(traj, 200)
    norms = np.array(
        [float(np.linalg.norm(dense_eval(traj, float(t)).d)) for t in ts]
    )
    if np.all(norms == 0.0):
        raise NonDecaying("||D||_2 is identically zero")
    keep = norms > 0.0
    ts, norms = ts[keep], norms[keep]
    n_tail = max(int(round(window_fraction * len(ts))), 2)
    if n_tail < 20:
        raise InsufficientSamples(
            f"only {n_tail} samples in the trailing window, need >= 20"
        )
    ts, norms = ts[-n_tail:], norms[-n_tail:]
    slope = np.polyfit(ts, np.log(norms), 1)[0]
    if slope >= 0.0:
        raise NonDecaying(f"log ||D||_2 slope {slope:g} is nonnegative")
    return float(-slope)


def scan_max_mu(upsilon0: np.ndarray, d0: np.ndarray, step: float | None = None) -> float | None:
    """Largest positive shift mu on a grid keeping the ellipticity PSD.

    Scans mu over a grid of the given step (default 1e-3 of the spectral
    span of upsilon0) and returns the largest scanned value for which the
    initial ellipticity functional is PSD and the shifted operator keeps a
    positive margin; None when no positive mu works.  A larger admissible mu
    sharpens both the reported decay rate and the limit gap estimate.
    """
    ups0 = linalg.as_matrix(upsilon0, "upsilon0")
    d0 = linalg.as_matrix(d0, "d0")
    lam = np.linalg.eigvalsh(linalg.hermitian_part(ups0))
    span = float(lam[-1] - lam[0])
    if step is None:
        step = 1e-3 * max(span, 1.0)
    lo = max(0.0, -float(lam[0])) + step
    # PSD-ness of the initial functional forces mu <= lam_max + |lam_min| + 2||D0||_op
    d_op = linalg.norm(d0, "operator")
    hi = max(lo + step, float(lam[-1]) + abs(float(lam[0])) + 2.0 * d_op + 1.0)
    eye = np.eye(ups0.shape[0])
    best = None
    for mu in np.arange(lo, hi, step):
        m = ups0.T + mu * eye
        b = linalg.hermitian_part(d0 @ np.linalg.solve(m, d0.conj().T))
        frak_d0 = linalg.hermitian_part(ups0 - mu * eye + 4.0 * b)
        if linalg.min_eigenvalue(frak_d0) >= -1e-12:
            best = float(mu)
        else:
            # the functional is matrix-decreasing in mu (shift and shrinking
            # inverse), so the admissible set is a prefix of the grid
            break
    return best


def limit_operator(traj: Trajectory, window_fraction: float = 0.3) -> AsymptoticsResult:
    """Limit operator, energy shift and tail bound of a converged run.

    ``delta_inf`` is taken at the final time; the neglected tail is bounded
    with the fitted decay rate and reported, not added.  The energy shift is
    computed by quadrature of ``16 ||D_tau||_2^2`` (then halved), which is a
    route independent of the trace identity ``shift = tr(delta_inf)/2`` used
    as a cross-check downstream.
    """
    if not traj.reached_stop:
        raise NotConverged("trajectory did not reach the stop threshold")
    problem = traj.problem
    final = traj.states[-1]
    delta_inf = np.array(final.delta)
    upsilon_inf = problem.upsilon0 + delta_inf
    quad = hs_norm_sq_integral(traj, 0.0, traj.t_end)
    energy_shift = 0.5 * (16.0 * quad)

    d_end = float(np.linalg.norm(final.d))
    try:
        rate = fit_decay_rate(traj, window_fraction)
        tail_bound = 16.0 * d_end**2 / (2.0 * rate)
    except (NonDecaying, InsufficientSamples):
        # no usable rate: report an unbounded tail rather than a fake one
        rate = float("nan")
        tail_bound = float("inf") if d_end > 0.0 else 0.0
    if problem.is_constant:
        rate = float("nan")
        tail_bound = 0.0

    observed = linalg.min_eigenvalue(upsilon_inf)
    hypotheses_hold = problem.mu < 0.0
    if not hypotheses_hold and problem.mu != 0.0 and not problem.is_constant:
        z0 = _initial_zeta(problem)
        hypotheses_hold = z0 >= -1e-10
    gap_check = {
        "claimed": abs(problem.mu) if hypotheses_hold else None,
        "observed": observed,
    }
    return AsymptoticsResult(
        upsilon_inf=upsilon_inf,
        delta_inf=delta_inf,
        energy_shift=energy_shift,
        fitted_rate=rate,
        tail_bound=tail_bound,
        gap_check=gap_check,
    )


def _initial_zeta(problem: FlowProblem) -> float:
    eye = np.eye(problem.dim)
    m = problem.upsilon0.T + problem.mu * eye
    b = linalg.hermitian_part(problem.d0 @ np.linalg.solve(m, problem.d0.conj().T))
    frak_d0 = problem.upsilon0 - problem.mu * eye + 4.0 * b
    return linalg.min_eigenvalue(frak_d0)
