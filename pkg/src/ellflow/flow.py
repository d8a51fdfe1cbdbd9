"""Adaptive integration of the quadratic matrix flow.

The coupled system is ``delta' = 16 D D*`` and ``D' = -2 (Ups D + D Ups^T)``
with ``Ups = Ups0 + delta``.  Integration uses an embedded Dormand-Prince
5(4) pair with PI step control, re-projects the state onto its structure
manifold (Hermitian delta, ``D^T = sign*D``) after every accepted step and
stores quartic dense-output coefficients for post-hoc evaluation.
"""

from __future__ import annotations

import math

import numpy as np

from . import linalg
from ._dopri5 import D as DENSE_D
from ._dopri5 import StepController, error_norm, solve_linear_ode
from .backend import get_backend
from .errors import DimensionMismatch, OutOfRange, ShiftNotInvertible
from .problem import (
    EvolutionOperator,
    FlowProblem,
    FlowState,
    IntegratorConfig,
    Trajectory,
    default_config,
)

# 5-point Gauss-Legendre rule on [-1, 1]; exact for the squared dense-output
# polynomial of the stepper (degree 8).
_GL_X = np.array(
    [
        -0.906179845938663992797626878299,
        -0.538469310105683091036314420700,
        0.0,
        0.538469310105683091036314420700,
        0.906179845938663992797626878299,
    ]
)
_GL_W = np.array(
    [
        0.236926885056189087514264040720,
        0.478628670499366468041291514836,
        0.568888888888888888888888888889,
        0.478628670499366468041291514836,
        0.236926885056189087514264040720,
    ]
)


def rhs(state: FlowState, problem: FlowProblem):
    """Time derivative (ddelta, dd) of the flow at ``state``.

    ``ddelta = 16 D D*`` is Hermitian PSD by construction.
    """
    n = problem.dim
    if state.delta.shape != (n, n) or state.d.shape != (n, n):
        raise DimensionMismatch(
            f"state matrices {state.delta.shape} do not match problem dim {n}"
        )
    be = get_backend()
    ddelta = np.empty((n, n), dtype=np.complex128)
    dd = np.empty((n, n), dtype=np.complex128)
    be.flow_rhs(
        np.array(problem.upsilon0),
        np.array(state.delta),
        np.array(state.d),
        ddelta,
        dd,
    )
    return ddelta, dd


def _eval_rcont(rcont: np.ndarray, theta: float) -> np.ndarray:
    th1 = 1.0 - theta
    return rcont[0] + theta * (
        rcont[1] + th1 * (rcont[2] + theta * (rcont[3] + th1 * rcont[4]))
    )


def _constant_trajectory(problem: FlowProblem, cfg: IntegratorConfig) -> Trajectory:
    n = problem.dim
    y0 = np.zeros((2, n, n), dtype=np.complex128)
    y0[1] = problem.d0
    rcont = np.zeros((1, 5, 2, n, n), dtype=np.complex128)
    rcont[0, 0] = y0
    ts = np.array([0.0, cfg.t_max])
    rcont.flags.writeable = False
    ts.flags.writeable = False
    sample_times = np.arange(0.0, cfg.t_max + 0.5 * cfg.sample_stride, cfg.sample_stride)
    if sample_times[-1] < cfg.t_max:
        sample_times = np.append(sample_times, cfg.t_max)
    states = tuple(FlowState(t, y0[0], y0[1]) for t in sample_times)
    stats = {
        "steps": 0,
        "rejected_steps": 0,
        "reached_stop": True,
        "final_d_hs_norm": 0.0,
        "max_symmetry_drift": 0.0,
        "max_growth_excess": 0.0,
        "backend": get_backend().NAME,
    }
    return Trajectory(problem, states, ts, rcont, stats)


def integrate(problem: FlowProblem, config: IntegratorConfig | None = None) -> Trajectory:
    """Integrate the flow until ``||D||_2 < stop_tol`` or ``t_max``.

    Per accepted step the state is re-projected onto its structure manifold;
    the pre-projection symmetry drift and the worst per-step violation of the
    a-priori growth bound ``||D_t||_op <= exp(4 mu h) ||D_s||_op`` are
    tracked in ``stats``.  Step size obeys both the embedded error estimate
    and the stiffness cap ``h <= 0.5 / (||Ups0||_op + ||delta||)``.
    """
    cfg = config if config is not None else default_config(problem)
    n = problem.dim
    if problem.is_constant:
        return _constant_trajectory(problem, cfg)

    be = get_backend()
    ups0 = np.array(problem.upsilon0)
    sign = int(problem.symmetry)
    mu = problem.mu

    y = np.zeros((2, n, n), dtype=np.complex128)
    y[1] = problem.d0
    k = np.empty((7, 2, n, n), dtype=np.complex128)
    y5 = np.empty_like(y)
    yerr = np.empty_like(y)
    ytmp = np.empty_like(y)
    upsw = np.empty((n, n), dtype=np.complex128)
    be.flow_rhs(ups0, y[0], y[1], k[0, 0], k[0, 1])

    ups0_op = linalg.norm(ups0, "operator")
    cap = 0.5 / max(ups0_op, 1e-12)
    floor = 1e-14 * cfg.t_max
    ctrl = StepController(min(cfg.h_init, cap), cfg.h_max, floor)

    sample_times = np.arange(0.0, cfg.t_max + 0.5 * cfg.sample_stride, cfg.sample_stride)
    states = [FlowState(0.0, y[0], y[1])]
    next_sample = 1  # index into sample_times; 0 already emitted

    ts_list = [0.0]
    rcont_list = []
    steps = 0
    rejected = 0
    reached_stop = False
    max_sym_drift = 0.0
    max_growth_excess = 0.0
    d_op_prev = linalg.norm(problem.d0, "operator")
    t = 0.0

    while True:
        if cfg.t_max - t <= floor:
            break
        h = ctrl.clamp(cfg.t_max - t, cap)
        be.flow_step(ups0, y, h, k, y5, yerr, ytmp, upsw)
        err = error_norm(yerr, y, y5, cfg.rtol, cfg.atol)
        if not err <= 1.0:
            rejected += 1
            ctrl.update(err, accepted=False)
            continue

        steps += 1
        t_new = t + h
        if cfg.t_max - t_new <= 1e-12 * cfg.t_max:
            t_new = cfg.t_max

        d_hs = float(np.linalg.norm(y5[1]))
        if d_hs > 0.0:
            drift = float(np.linalg.norm(y5[1].T - sign * y5[1])) / d_hs
            max_sym_drift = max(max_sym_drift, drift)
        y5[0] = 0.5 * (y5[0] + y5[0].conj().T)
        y5[1] = 0.5 * (y5[1] + sign * y5[1].T)

        rcont = np.empty((5, 2, n, n), dtype=np.complex128)
        rcont[0] = y
        rcont[1] = y5 - y
        rcont[2] = h * k[0] - rcont[1]
        rcont[3] = rcont[1] - h * k[6] - rcont[2]
        rcont[4] = h * np.tensordot(DENSE_D, k, axes=(0, 0))
        rcont_list.append(rcont)
        ts_list.append(t_new)

        # theta must be formed from the stored boundaries so that dense_eval
        # reproduces sampled states bitwise
        h_eff = t_new - t
        while next_sample < len(sample_times) and sample_times[next_sample] <= t_new:
            st = sample_times[next_sample]
            ys = _eval_rcont(rcont, (st - t) / h_eff)
            states.append(FlowState(st, ys[0], ys[1]))
            next_sample += 1

        d_op_new = linalg.norm(y5[1], "operator")
        bound = math.exp(4.0 * mu * h) * d_op_prev
        if bound > 0.0:
            max_growth_excess = max(max_growth_excess, d_op_new / bound - 1.0)
        d_op_prev = d_op_new

        y[...] = y5
        k[0] = k[6]
        t = t_new
        ctrl.update(err, accepted=True)
        cap = 0.5 / max(ups0_op + float(np.linalg.norm(y[0])), 1e-12)

        if float(np.linalg.norm(y[1])) < cfg.stop_tol:
            reached_stop = True
            break
        if t >= cfg.t_max:
            break

    if not states or states[-1].t < t:
        ys = _eval_rcont(rcont_list[-1], 1.0)
        states.append(FlowState(t, ys[0], ys[1]))

    stats = {
        "steps": steps,
        "rejected_steps": rejected,
        "reached_stop": reached_stop,
        "final_d_hs_norm": float(np.linalg.norm(y[1])),
        "max_symmetry_drift": max_sym_drift,
        "max_growth_excess": max_growth_excess,
        "backend": be.NAME,
    }
    dense_ts = np.array(ts_list)
    dense_rcont = np.array(rcont_list)
    dense_ts.flags.writeable = False
    dense_rcont.flags.writeable = False
    return Trajectory(problem, tuple(states), dense_ts, dense_rcont, stats)


def _step_index(traj: Trajectory, t: float) -> int:
    ts = traj.dense_ts
    if t < ts[0] or t > ts[-1]:
        raise OutOfRange(f"t = {t:g} outside [0, {ts[-1]:g}]")
    i = int(np.searchsorted(ts, t, side="right")) - 1
    return min(max(i, 0), len(ts) - 2)


def _dense_y(traj: Trajectory, t: float) -> np.ndarray:
    i = _step_index(traj, t)
    h = traj.dense_ts[i + 1] - traj.dense_ts[i]
    theta = (t - traj.dense_ts[i]) / h
    return _eval_rcont(traj.dense_rcont[i], theta)


def dense_eval(traj: Trajectory, t: float) -> FlowState:
    """Interpolated state at time ``t``; exact at stored sample times."""
    y = _dense_y(traj, float(t))
    return FlowState(float(t), y[0], y[1])


def sample_grid(traj: Trajectory, n_min: int = 200) -> np.ndarray:
    """Uniform audit grid over [0, t_end] with at least ``n_min`` points."""
    n_pts = max(int(n_min), len(traj.states))
    return np.linspace(0.0, traj.t_end, n_pts)


def hs_norm_sq_integral(traj: Trajectory, s: float, t: float) -> float:
    """Quadrature of ``||D_tau||_2^2`` over [s, t] from the dense output.

    Five-point Gauss-Legendre per step segment integrates the squared dense
    polynomial exactly, so the result carries integrator-level accuracy.
    """
    if t < s:
        raise OutOfRange("need t >= s")
    ts = traj.dense_ts
    total = 0.0
    i0 = _step_index(traj, s)
    i1 = _step_index(traj, t)
    for i in range(i0, i1 + 1):
        lo = max(float(ts[i]), s)
        hi = min(float(ts[i + 1]), t)
        if hi <= lo:
            continue
        h = float(ts[i + 1] - ts[i])
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        rcont = traj.dense_rcont[i]
        for x, w in zip(_GL_X, _GL_W):
            tau = mid + half * x
            d = _eval_rcont(rcont, (tau - float(ts[i])) / h)[1]
            total += w * half * float(np.linalg.norm(d)) ** 2
    return total


def _shifted_inverse_budget(delta: np.ndarray, d: np.ndarray, ups0: np.ndarray, mu: float) -> np.ndarray:
    """Hermitian PSD matrix ``D (Ups^T + mu)^{-1} D*`` (no margin checks)."""
    m = (ups0 + delta).T + mu * np.eye(ups0.shape[0])
    x = np.linalg.solve(m, d.conj().T)
    return linalg.hermitian_part(d @ x)


def _shift_margin(delta: np.ndarray, d: np.ndarray, problem: FlowProblem) -> float:
    ups = problem.upsilon0 + delta
    return linalg.min_eigenvalue(ups.T + problem.mu * np.eye(problem.dim))


def evolve_W(traj: Trajectory, s: float, t: float, config: IntegratorConfig | None = None) -> EvolutionOperator:
    """Evolution operator generated by ``-2 Ups_tau`` between s and t.

    Solves the linear non-autonomous system driven by the dense output;
    satisfies the cocycle property and ``||W||_op <= exp(2 mu (t-s))`` up to
    integration tolerance.
    """
    cfg = config if config is not None else default_config(traj.problem)
    s = float(s)
    t = float(t)
    if not (0.0 <= s <= t <= traj.t_end):
        raise OutOfRange(f"need 0 <= s <= t <= {traj.t_end:g}")
    n = traj.problem.dim
    ups0 = np.array(traj.problem.upsilon0)

    def f(tau, w):
        ups = ups0 + _dense_y(traj, min(tau, traj.t_end))[0]
        return -2.0 * (ups @ w)

    w0 = np.eye(n, dtype=np.complex128)
    if t == s:
        return EvolutionOperator(s, t, w0)
    w = solve_linear_ode(f, s, t, w0, cfg.rtol, cfg.atol)
    return EvolutionOperator(s, t, w)


def evolve_V(traj: Trajectory, s: float, t: float, config: IntegratorConfig | None = None) -> EvolutionOperator:
    """Evolution operator generated by ``-8 B_tau`` between s and t.

    ``B_tau = D (Ups^T + mu)^{-1} D*`` is evaluated from the dense output.
    The result is a contraction: ``V V* <= 1`` up to integration tolerance.
    Raises ShiftNotInvertible when the shifted operator loses its margin.
    """
    cfg = config if config is not None else default_config(traj.problem)
    s = float(s)
    t = float(t)
    if not (0.0 <= s <= t <= traj.t_end):
        raise OutOfRange(f"need 0 <= s <= t <= {traj.t_end:g}")
    problem = traj.problem
    n = problem.dim
    for tau in np.linspace(s, t, 5):
        y = _dense_y(traj, float(tau))
        if _shift_margin(y[0], y[1], problem) < 0.5 * problem.epsilon:
            raise ShiftNotInvertible(
                f"lambda_min(Ups^T + mu) < epsilon/2 at t = {tau:g}"
            )
    v0 = np.eye(n, dtype=np.complex128)
    if t == s:
        return EvolutionOperator(s, t, v0)
    ups0 = np.array(problem.upsilon0)

    def f(tau, v):
        y = _dense_y(traj, min(tau, traj.t_end))
        b = _shifted_inverse_budget(y[0], y[1], ups0, problem.mu)
        return -8.0 * (b @ v)

    v = solve_linear_ode(f, s, t, v0, cfg.rtol, cfg.atol)
    return EvolutionOperator(s, t, v)
