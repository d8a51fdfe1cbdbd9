"""Conserved and monotone quantities of the flow, and their audit.

Covers the trace constant of motion, the ellipticity functional and its
minimum eigenvalue, the interaction budget, the commutator-type transported
matrix, the unconventional ellipse/hyperbola predicates and a trajectory-wide
audit with per-sample values and monotonicity verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import (
    GammaInSpectrum,
    NotCommutingInitialData,
    ShiftNotInvertible,
)
from .flow import (
    _shift_margin,
    _shifted_inverse_budget,
    dense_eval,
    evolve_W,
    hs_norm_sq_integral,
    sample_grid,
)
from .problem import FlowProblem, FlowState, Trajectory

MONOTONE_TOL = 1e-7
COMMUTE_TOL = 1e-10


def motion_trace(state: FlowState, problem: FlowProblem) -> float:
    """Constant of motion ``tr(Ups^2 + 4 D D*)`` with ``Ups = Ups0 + delta``."""
    ups = problem.upsilon0 + state.delta
    return float(np.linalg.norm(ups) ** 2 + 4.0 * np.linalg.norm(state.d) ** 2)


def _require_margin(state: FlowState, problem: FlowProblem) -> None:
    if _shift_margin(np.array(state.delta), np.array(state.d), problem) < 0.5 * problem.epsilon:
        raise ShiftNotInvertible(
            f"lambda_min(Ups^T + mu) < epsilon/2 at t = {state.t:g}"
        )


def frakB(state: FlowState, problem: FlowProblem) -> np.ndarray:
    """Interaction budget ``D (Ups^T + mu)^{-1} D*``: Hermitian PSD."""
    _require_margin(state, problem)
    return _shifted_inverse_budget(
        np.array(state.delta), np.array(state.d), np.array(problem.upsilon0), problem.mu
    )


def frakD(state: FlowState, problem: FlowProblem) -> np.ndarray:
    """Ellipticity functional ``Ups - mu 1 + 4 D (Ups^T + mu)^{-1} D*``."""
    b = frakB(state, problem)
    ups = problem.upsilon0 + state.delta
    return linalg.hermitian_part(ups - problem.mu * np.eye(problem.dim) + 4.0 * b)


def zeta(state: FlowState, problem: FlowProblem) -> float:
    """Minimum eigenvalue of the ellipticity functional; always >= -2 mu."""
    return linalg.min_eigenvalue(frakD(state, problem))


def K_matrix(state: FlowState, problem: FlowProblem) -> np.ndarray:
    """Commutator-type matrix ``Ups D - D Ups^T``."""
    ups = problem.upsilon0 + state.delta
    return ups @ state.d - state.d @ ups.T


def _check_commuting(problem: FlowProblem) -> None:
    k0 = problem.upsilon0 @ problem.d0 - problem.d0 @ problem.upsilon0.T
    scale = float(np.linalg.norm(problem.upsilon0) * np.linalg.norm(problem.d0))
    if float(np.linalg.norm(k0)) > COMMUTE_TOL * max(scale, 1.0):
        raise NotCommutingInitialData("Ups0 D0 = D0 Ups0^T violated")


def commutative_motion_residual(state: FlowState, problem: FlowProblem) -> float:
    """Full-matrix conservation residual for commuting initial data."""
    _check_commuting(problem)
    ups0 = problem.upsilon0
    d0 = problem.d0
    ups = ups0 + state.delta
    m_t = ups @ ups + 4.0 * (state.d @ state.d.conj().T)
    m_0 = ups0 @ ups0 + 4.0 * (d0 @ d0.conj().T)
    return float(np.linalg.norm(m_t - m_0))


@dataclass(frozen=True)
class EllipseParams:
    """Parameters (gamma, beta, alpha) of the unconventional ellipse."""

    gamma: float
    beta: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.gamma == 0.0 or self.beta == 0.0:
            raise ValueError("gamma and beta must be nonzero")


def _shifted_term(x: np.ndarray, y: np.ndarray, p: EllipseParams) -> np.ndarray:
    lam = np.linalg.eigvalsh(linalg.hermitian_part(x))
    if float(np.min(np.abs(lam + p.gamma))) < 1e-10:
        raise GammaInSpectrum(
            f"spectrum of X^T not bounded away from {-p.gamma:g}"
        )
    m = x.T + p.gamma * np.eye(x.shape[0])
    return (p.gamma**2 / p.beta**2) * linalg.hermitian_part(
        y @ np.linalg.solve(m, y.conj().T)
    )


def ellipse_residual(x: np.ndarray, y: np.ndarray, p: EllipseParams, kind: str = "ellipse") -> float:
    """Distance of (X, Y) from the unconventional ellipse or hyperbola.

    ``||X - gamma 1 +/- (gamma^2/beta^2) Y (X^T + gamma 1)^{-1} Y*||_2`` with
    ``+`` for the ellipse and ``-`` for the hyperbola.
    """
    x = linalg.as_matrix(x, "X")
    y = linalg.as_matrix(y, "Y")
    term = _shifted_term(x, y, p)
    base = x - p.gamma * np.eye(x.shape[0])
    if kind == "ellipse":
        m = base + term
    elif kind == "hyperbola":
        m = base - term
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return float(np.linalg.norm(m))


def elliptic_boundedness(x: np.ndarray, y: np.ndarray, p: EllipseParams) -> dict:
    """One-sided operator bounds relative to the unconventional ellipse.

    ``above`` holds when ``lambda_max(X - gamma 1 + term) <= alpha^2``,
    ``below`` when ``lambda_min >= alpha^2``; the extremal eigenvalues are
    returned as witnesses.
    """
    x = linalg.as_matrix(x, "X")
    y = linalg.as_matrix(y, "Y")
    m = linalg.hermitian_part(
        x - p.gamma * np.eye(x.shape[0]) + _shifted_term(x, y, p)
    )
    lam = np.linalg.eigvalsh(m)
    lam_min, lam_max = float(lam[0]), float(lam[-1])
    return {
        "above": lam_max <= p.alpha**2,
        "below": lam_min >= p.alpha**2,
        "witness": (lam_max, lam_min),
    }


@dataclass(frozen=True)
class InvariantReport:
    """Sampled invariant values plus monotonicity verdicts."""

    samples: tuple
    verdicts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"samples": list(self.samples), "verdicts": dict(self.verdicts)}

    @property
    def all_asserted_hold(self) -> bool:
        v = self.verdicts
        checks = [
            v["motion_drift"] <= 1e-8,
            v["zeta_monotone"],
            v["frakD_norm_decreasing"],
        ]
        if v["frakB_trace_decreasing"] is not None:
            checks.append(v["frakB_trace_decreasing"])
        if v.get("hs_budget_holds") is not None:
            checks.append(v["hs_budget_holds"])
        return all(bool(c) for c in checks)


def _monotone(values: np.ndarray, direction: str, tol: float) -> bool:
    diffs = np.diff(values)
    if direction == "increasing":
        return bool(np.all(diffs >= -tol))
    return bool(np.all(diffs <= tol))


def audit(traj: Trajectory, n_samples: int = 200, transport_pairs: int | None = None) -> InvariantReport:
    """Evaluate every invariant of the flow on a uniform sample grid.

    Monotonicity verdicts use absolute tolerance 1e-7 on comparisons between
    samples.  The trace-norm decrease of the interaction budget and the
    cumulative Hilbert-Schmidt budget are only asserted when the initial
    ellipticity functional is PSD; otherwise their verdicts are ``None``.
    ``K_residual`` holds the transported-commutator residual over the
    preceding sample interval (propagated with the evolution operator).
    """
    problem = traj.problem
    grid = sample_grid(traj, n_samples)
    sign = int(problem.symmetry)
    if transport_pairs is None:
        transport_pairs = len(grid) - 1
    transport_every = max(1, (len(grid) - 1) // max(transport_pairs, 1))

    rows = []
    zetas = np.empty(len(grid))
    d_ops = np.empty(len(grid))
    b_traces = np.empty(len(grid))
    budget = np.empty(len(grid))
    k_prev = None
    t_prev = None
    cum = 0.0
    for i, t in enumerate(grid):
        st = dense_eval(traj, float(t))
        fd = frakD(st, problem)
        fb = frakB(st, problem)
        z = linalg.min_eigenvalue(fd)
        k_here = K_matrix(st, problem)
        if i == 0 or (i % transport_every and i != len(grid) - 1):
            k_res = 0.0
        else:
            w = evolve_W(traj, t_prev, float(t)).w
            k_res = float(np.linalg.norm(k_here - w @ k_prev @ w.T))
        if i > 0:
            cum += hs_norm_sq_integral(traj, float(grid[i - 1]), float(t))
        d_nrm = float(np.linalg.norm(st.d))
        sym_res = (
            float(np.linalg.norm(st.d.T - sign * st.d)) / d_nrm if d_nrm > 0 else 0.0
        )
        zetas[i] = z
        d_ops[i] = linalg.norm(fd, "operator")
        b_traces[i] = linalg.norm(fb, "trace")
        budget[i] = 16.0 * cum + 4.0 * b_traces[i]
        rows.append(
            {
                "t": float(t),
                "tr_motion": motion_trace(st, problem),
                "zeta": z,
                "frakD_op_norm": float(d_ops[i]),
                "frakB_trace_norm": float(b_traces[i]),
                "K_residual": k_res,
                "symmetry_residual": sym_res,
            }
        )
        if i % transport_every == 0 or i == len(grid) - 1:
            k_prev = k_here
            t_prev = float(t)

    motions = np.array([r["tr_motion"] for r in rows])
    drift = float(np.max(np.abs(motions - motions[0])) / (1.0 + abs(motions[0])))

    frakD0_psd = zetas[0] >= -1e-10
    if zetas[0] >= 0.0:
        direction = "decreasing"
        zeta_ok = _monotone(zetas, "decreasing", MONOTONE_TOL) and bool(
            np.all(zetas >= -MONOTONE_TOL)
        )
    else:
        direction = "increasing"
        zeta_ok = _monotone(zetas, "increasing", MONOTONE_TOL) and bool(
            np.all(zetas <= MONOTONE_TOL)
        )

    if frakD0_psd:
        running_min = np.minimum.accumulate(budget)
        hs_budget_ok = bool(np.all(budget - running_min <= MONOTONE_TOL))
        frakB_ok = _monotone(b_traces, "decreasing", MONOTONE_TOL)
    else:
        hs_budget_ok = None
        frakB_ok = None

    verdicts = {
        "motion_drift": drift,
        "zeta_monotone": zeta_ok,
        "zeta_direction": direction,
        "frakD_norm_decreasing": _monotone(d_ops, "decreasing", MONOTONE_TOL),
        "frakB_trace_decreasing": frakB_ok,
        "hs_budget_holds": hs_budget_ok,
        "frakD0_psd": bool(frakD0_psd),
    }
    return InvariantReport(samples=tuple(rows), verdicts=verdicts)
