"""Shared fixtures: reference trajectories are integrated once per session."""

from __future__ import annotations

import numpy as np
import pytest

import ellflow as ef

# regime cycle for the 50-instance corpus; every entry keeps D0 = +/- D0^T
CORPUS_REGIMES = [
    {"bounded"},
    {"gap_positive"},
    {"nonpositive_frakD0_psd"},
    {"commuting", "gap_positive"},
    {"gap_positive", "fermionic_antisymmetric"},
    {"bounded", "fermionic_antisymmetric"},
    {"commuting", "gap_positive", "fermionic_antisymmetric"},
]


def corpus_scenarios(count: int = 50):
    """Deterministic mixed-regime corpus with dims cycling over 2..8."""
    out = []
    seed = 0
    while len(out) < count:
        regime = CORPUS_REGIMES[len(out) % len(CORPUS_REGIMES)]
        dim = 2 + (len(out) % 7)
        if "commuting" in regime and "fermionic_antisymmetric" in regime and dim % 2:
            dim += 1
        out.append(ef.generate(seed, regime, dim))
        seed += 1
    return out


@pytest.fixture(scope="session")
def scalar_fixture():
    """Fig-style scalar instance alpha=0.99, beta=0.07 with its trajectory."""
    scn = ef.generate(0, {"scalar"}, 1)
    traj = ef.integrate(scn.problem)
    return scn.problem, traj


@pytest.fixture(scope="session")
def gap_instance():
    """A 4x4 spectral-gap instance with a converged trajectory."""
    scn = ef.generate(3, {"gap_positive"}, 4)
    traj = ef.integrate(scn.problem)
    assert traj.reached_stop
    return scn.problem, traj


@pytest.fixture(scope="session")
def diag_commuting():
    """Ups0 = diag(3,5), D0 = diag(2i,0): closed-form limit diag(5,5)."""
    ups0 = np.diag([3.0, 5.0]).astype(np.complex128)
    d0 = np.diag([2j, 0.0]).astype(np.complex128)
    problem = ef.FlowProblem(ups0, d0, mu=-2.9, epsilon=0.1)
    traj = ef.integrate(problem)
    assert traj.reached_stop
    return problem, traj


@pytest.fixture(scope="session")
def corpus():
    """The 50-instance acceptance corpus with trajectories, integrated once."""
    pairs = []
    for scn in corpus_scenarios(50):
        traj = ef.integrate(scn.problem)
        pairs.append((scn, traj))
    return pairs
