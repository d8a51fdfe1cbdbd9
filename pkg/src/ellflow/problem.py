"""Problem data, integrator configuration and trajectory containers."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import linalg
from .errors import DimensionMismatch

HYPOTHESIS_TOL = 1e-10


class Symmetry(IntEnum):
    """Sign s in the constraint ``D^T = s * D``."""

    SYMMETRIC = 1
    ANTISYMMETRIC = -1


def _detect_symmetry(d0: np.ndarray) -> Symmetry:
    rs = linalg.symmetry_residual(d0, +1)
    ra = linalg.symmetry_residual(d0, -1)
    return Symmetry.SYMMETRIC if rs <= ra else Symmetry.ANTISYMMETRIC


@dataclass(frozen=True)
class FlowProblem:
    """Initial data (upsilon0, d0, mu, epsilon, e0) for the matrix flow.

    Hypotheses enforced at construction:
      * upsilon0 is Hermitian (relative tolerance 1e-10),
      * d0 lies in its symmetry class ``D^T = sign*D``,
      * ``lambda_min(upsilon0) >= -(mu - epsilon)`` with ``epsilon > 0``.

    ``d0 = 0`` is accepted but flagged: the flow is then constant.
    """

    upsilon0: np.ndarray
    d0: np.ndarray
    mu: float
    epsilon: float
    e0: float = 0.0
    symmetry: Symmetry | None = None

    def __post_init__(self):
        ups = linalg.as_matrix(self.upsilon0, "upsilon0")
        d = linalg.as_matrix(self.d0, "d0")
        if ups.shape != d.shape:
            raise DimensionMismatch(
                f"upsilon0 is {ups.shape} but d0 is {d.shape}"
            )
        if linalg.hermiticity_residual(ups) > HYPOTHESIS_TOL:
            raise ValueError("upsilon0 = upsilon0* violated")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be strictly positive")
        sym = self.symmetry
        if sym is None:
            sym = _detect_symmetry(d)
        else:
            sym = Symmetry(sym)
        if linalg.symmetry_residual(d, int(sym)) > HYPOTHESIS_TOL:
            raise ValueError(f"d0^T = {int(sym):+d}*d0 violated")
        lam_min = linalg.min_eigenvalue(ups)
        bound = -(self.mu - self.epsilon)
        scale = max(1.0, float(np.linalg.norm(ups)))
        if lam_min < bound - HYPOTHESIS_TOL * scale:
            raise ValueError(
                "upsilon0 >= -(mu - epsilon)1 violated: "
                f"lambda_min = {lam_min:g} < {bound:g}"
            )
        ups.flags.writeable = False
        d.flags.writeable = False
        object.__setattr__(self, "upsilon0", ups)
        object.__setattr__(self, "d0", d)
        object.__setattr__(self, "symmetry", sym)
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "e0", float(self.e0))

    @property
    def dim(self) -> int:
        return self.upsilon0.shape[0]

    @property
    def is_constant(self) -> bool:
        """True when d0 = 0, in which case the flow never moves."""
        return float(np.linalg.norm(self.d0)) == 0.0

    def to_json(self) -> dict:
        return {
            "upsilon0": linalg.matrix_to_json(self.upsilon0),
            "d0": linalg.matrix_to_json(self.d0),
            "mu": self.mu,
            "epsilon": self.epsilon,
            "e0": self.e0,
            "symmetry": int(self.symmetry),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FlowProblem":
        return cls(
            upsilon0=linalg.matrix_from_json(obj["upsilon0"]),
            d0=linalg.matrix_from_json(obj["d0"]),
            mu=float(obj["mu"]),
            epsilon=float(obj["epsilon"]),
            e0=float(obj.get("e0", 0.0)),
            symmetry=Symmetry(obj["symmetry"]) if "symmetry" in obj else None,
        )


@dataclass(frozen=True)
class IntegratorConfig:
    """Adaptive step control knobs for a single integration."""

    rtol: float = 1e-9
    atol: float = 1e-12
    h_init: float = 1e-3
    h_max: float = 50.0
    t_max: float = 50.0
    stop_tol: float = 1e-10
    sample_stride: float = 0.2

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0 or self.stop_tol <= 0:
            raise ValueError("rtol, atol and stop_tol must be positive")
        if not (0.0 < self.h_init <= self.h_max <= self.t_max):
            raise ValueError("need 0 < h_init <= h_max <= t_max")
        if self.sample_stride <= 0:
            raise ValueError("sample_stride must be positive")


def default_config(problem: FlowProblem, **overrides) -> IntegratorConfig:
    """Config defaults tied to the problem scale.

    ``t_max = 50 / max(epsilon, 0.1)`` and the sample stride yields at least
    250 stored samples when the run goes the full distance.
    """
    t_max = float(overrides.pop("t_max", 50.0 / max(problem.epsilon, 0.1)))
    values = dict(
        rtol=1e-9,
        atol=1e-12,
        h_init=min(1e-3, t_max / 100.0),
        h_max=t_max,
        t_max=t_max,
        stop_tol=1e-10,
        sample_stride=t_max / 250.0,
    )
    values.update(overrides)
    values["h_init"] = min(values["h_init"], values["h_max"])
    return IntegratorConfig(**values)


@dataclass(frozen=True)
class FlowState:
    """Time-stamped pair (delta, d) along the flow."""

    t: float
    delta: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        for name in ("delta", "d"):
            a = np.asarray(getattr(self, name), dtype=np.complex128)
            if a.flags.writeable:
                a = a.copy()
                a.flags.writeable = False
            object.__setattr__(self, name, a)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "delta": linalg.matrix_to_json(self.delta),
            "d": linalg.matrix_to_json(self.d),
        }


@dataclass(frozen=True)
class Trajectory:
    """Integration output: stride samples plus per-step dense coefficients.

    ``dense_ts`` holds the K+1 accepted-step boundaries and ``dense_rcont``
    the (K, 5, 2, n, n) interpolation coefficients; together they give a
    continuous extension of the solution of the same order as the stepper.
    """

    problem: FlowProblem
    states: tuple
    dense_ts: np.ndarray
    dense_rcont: np.ndarray
    stats: dict = field(default_factory=dict)

    @property
    def t_end(self) -> float:
        return float(self.dense_ts[-1])

    @property
    def reached_stop(self) -> bool:
        return bool(self.stats.get("reached_stop", False))


@dataclass(frozen=True)
class EvolutionOperator:
    """Two-parameter linear evolution operator on [s, t]."""

    s: float
    t: float
    w: np.ndarray

    def __post_init__(self):
        if self.t < self.s:
            raise ValueError("need t >= s")
