"""Fermionic quadratic Hamiltonians on a small Fock space.

Builds the canonical anticommutation operators by the Jordan-Wigner
construction, assembles the quadratic Hamiltonian
``H = sum Ups_{kl} a_k^* a_l + D_{kl} a_k^* a_l^* + conj(D)_{kl} a_l a_k + E0``
and checks that its spectrum matches the number-conserving form built from
the flow's limit operator and energy shift.  The unitary realizing the
equivalence is never constructed; spectra are compared directly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .asymptotics import AsymptoticsResult
from .errors import DimensionMismatch, NotAntisymmetric, TooManyModes
from .problem import FlowProblem

MAX_MODES = 12  # 2^12 = 4096 keeps exact diagonalization desk-scale

_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def jordan_wigner(n: int) -> list:
    """Annihilators a_1..a_n on the 2^n-dimensional Fock space.

    Mode k carries the sign string on modes 1..k-1 (mode 1 is the leftmost
    tensor factor), so the canonical anticommutation relations hold exactly.
    """
    if not 1 <= n <= MAX_MODES:
        raise TooManyModes(f"need 1 <= n <= {MAX_MODES}, got {n}")
    ops = []
    for k in range(n):
        factors = [_SZ] * k + [_LOWER] + [_I2] * (n - k - 1)
        a = factors[0]
        for f in factors[1:]:
            a = np.kron(a, f)
        ops.append(a)
    return ops


def number_operator(ops: list) -> np.ndarray:
    """Total particle number ``N = sum a_k^* a_k``."""
    dim = ops[0].shape[0]
    n_op = np.zeros((dim, dim), dtype=np.complex128)
    for a in ops:
        n_op += a.conj().T @ a
    return n_op


def build_h0(upsilon: np.ndarray, d: np.ndarray, e0: float, ops: list) -> np.ndarray:
    """Quadratic Hamiltonian for one-particle data (upsilon, d, e0).

    Requires ``d^T = -d``; with ``d = 0`` the result commutes with the
    number operator (plain second quantization of upsilon).
    """
    upsilon = linalg.as_matrix(upsilon, "upsilon")
    d = linalg.as_matrix(d, "d")
    n = len(ops)
    if upsilon.shape != (n, n) or d.shape != (n, n):
        raise DimensionMismatch(
            f"coefficient matrices must be {n}x{n} for {n} modes"
        )
    if linalg.symmetry_residual(d, -1) > 1e-10:
        raise NotAntisymmetric("d^T = -d violated")
    dim = ops[0].shape[0]
    h = float(e0) * np.eye(dim, dtype=np.complex128)
    adag = [a.conj().T for a in ops]
    for k in range(n):
        # group the l-sums first: 3n products instead of 3n^2
        hop = sum(upsilon[k, l] * ops[l] for l in range(n))
        pair = sum(d[k, l] * adag[l] for l in range(n))
        down = sum(np.conj(d[k, l]) * ops[l] for l in range(n))
        h += adag[k] @ hop + adag[k] @ pair + down @ ops[k]
    return linalg.hermitian_part(h)


def second_quantize_diagonal(upsilon_inf: np.ndarray, e_inf: float, ops: list) -> np.ndarray:
    """Number-conserving Hamiltonian ``sum Ups_{kl} a_k^* a_l + e_inf``.

    Its spectrum is the set of occupation sums of the eigenvalues of
    ``upsilon_inf`` shifted by ``e_inf``.
    """
    upsilon_inf = linalg.as_matrix(upsilon_inf, "upsilon_inf")
    n = len(ops)
    if upsilon_inf.shape != (n, n):
        raise DimensionMismatch(
            f"upsilon_inf must be {n}x{n} for {n} modes"
        )
    dim = ops[0].shape[0]
    h = float(e_inf) * np.eye(dim, dtype=np.complex128)
    adag = [a.conj().T for a in ops]
    for k in range(n):
        hop = sum(upsilon_inf[k, l] * ops[l] for l in range(n))
        h += adag[k] @ hop
    return linalg.hermitian_part(h)


@dataclass(frozen=True)
class FockModel:
    """Jordan-Wigner operator set plus the assembled Hamiltonian."""

    modes: int
    annihilators: tuple
    number_op: np.ndarray
    h0: np.ndarray


def make_model(upsilon: np.ndarray, d: np.ndarray, e0: float = 0.0) -> FockModel:
    """Assemble the full Fock model for one-particle data (upsilon, d, e0)."""
    n = np.asarray(upsilon).shape[0]
    ops = jordan_wigner(n)
    return FockModel(
        modes=n,
        annihilators=tuple(ops),
        number_op=number_operator(ops),
        h0=build_h0(upsilon, d, e0, ops),
    )


@dataclass(frozen=True)
class SpectralComparison:
    """Sorted spectra of the two Hamiltonians and their elementwise gap."""

    spec_h0: np.ndarray
    spec_diag: np.ndarray
    max_abs_gap: float
    n_commutator_norm: float

    def to_json(self) -> dict:
        return {
            "spec_h0": [float(x) for x in self.spec_h0],
            "spec_diag": [float(x) for x in self.spec_diag],
            "max_abs_gap": self.max_abs_gap,
            "n_commutator_norm": self.n_commutator_norm,
        }


def validate(problem: FlowProblem, asym: AsymptoticsResult, ops: list) -> SpectralComparison:
    """Spectral check of the flow endpoint against exact diagonalization.

    Compares the full spectrum (as a sorted multiset) of the quadratic
    Hamiltonian built from the initial data with the number-conserving form
    built from the limit operator and the shifted constant
    ``e0 - energy_shift``.
    """
    if linalg.symmetry_residual(problem.d0, -1) > 1e-10:
        raise NotAntisymmetric("problem.d0 must satisfy d0^T = -d0")
    h0 = build_h0(problem.upsilon0, problem.d0, problem.e0, ops)
    h_diag = second_quantize_diagonal(
        asym.upsilon_inf, problem.e0 - asym.energy_shift, ops
    )
    spec_h0 = np.sort(np.linalg.eigvalsh(h0))
    spec_diag = np.sort(np.linalg.eigvalsh(h_diag))
    n_op = number_operator(ops)
    comm = h0 @ n_op - n_op @ h0
    return SpectralComparison(
        spec_h0=spec_h0,
        spec_diag=spec_diag,
        max_abs_gap=float(np.max(np.abs(spec_h0 - spec_diag))),
        n_commutator_norm=float(np.linalg.norm(comm)),
    )
