"""Deterministic instance generators for every hypothesis regime.

``generate`` is a pure function of (seed, regime tags, dim); each emitted
scenario is checked against the hypotheses its tags claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .asymptotics import scan_max_mu
from .errors import InconsistentRegime
from .problem import FlowProblem, Symmetry

REGIME_TAGS = (
    "bounded",
    "gap_positive",
    "nonpositive_frakD0_psd",
    "commuting",
    "scalar",
    "fermionic_antisymmetric",
    "trivial_D0",
)
_TAG_ID = {tag: i for i, tag in enumerate(REGIME_TAGS)}

SCALAR_FIXTURE = {"alpha": 0.99, "beta": 0.07, "mu": 1.0, "epsilon": 0.01}


@dataclass(frozen=True)
class Scenario:
    name: str
    problem: FlowProblem
    regime_tags: frozenset
    expected: dict | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "regime_tags": sorted(self.regime_tags),
            "problem": self.problem.to_json(),
            "expected": self.expected,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        return cls(
            name=str(obj["name"]),
            problem=FlowProblem.from_json(obj["problem"]),
            regime_tags=frozenset(obj.get("regime_tags", [])),
            expected=obj.get("expected"),
        )


def _rng(seed: int, tags: frozenset, dim: int) -> np.random.Generator:
    tag_key = sum(2 ** _TAG_ID[t] for t in tags)
    return np.random.default_rng([int(seed), int(dim), tag_key, 0x5EED])


def _random_hermitian(rng, n, lam_min, lam_max):
    """Hermitian matrix with spectrum rescaled exactly onto [lam_min, lam_max]."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = linalg.hermitian_part(a)
    vals, vecs = np.linalg.eigh(h)
    span = vals[-1] - vals[0]
    if span < 1e-12 or n == 1:
        new_vals = np.full(n, 0.5 * (lam_min + lam_max))
    else:
        new_vals = lam_min + (vals - vals[0]) * (lam_max - lam_min) / span
        new_vals[0] = lam_min
    return linalg.hermitian_part((vecs * new_vals) @ vecs.conj().T)


def _random_in_symmetry_class(rng, n, sign, scale):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    d = 0.5 * (a + sign * a.T)
    nrm = float(np.linalg.norm(d))
    if nrm == 0.0:
        raise InconsistentRegime(f"cannot draw a nonzero matrix with sign {sign}")
    return d * (scale / nrm)


def _random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def _commuting_pair(rng, n, sign, u_lo, u_hi, d_scale):
    """(Ups0, D0) simultaneously reduced in a random real-orthogonal frame."""
    o = _random_orthogonal(rng, n)
    if sign == -1:
        if n % 2:
            raise InconsistentRegime(
                "commuting antisymmetric data needs an even dimension"
            )
        u_pairs = np.sort(rng.uniform(u_lo, u_hi, size=n // 2))
        u = np.repeat(u_pairs, 2)
        d = np.zeros((n, n), dtype=np.complex128)
        for j in range(n // 2):
            w = (rng.normal() + 1j * rng.normal()) * d_scale / np.sqrt(n)
            d[2 * j, 2 * j + 1] = w
            d[2 * j + 1, 2 * j] = -w
    else:
        u = np.sort(rng.uniform(u_lo, u_hi, size=n))
        u[0] = u_lo
        d = np.diag(rng.normal(size=n) + 1j * rng.normal(size=n)).astype(np.complex128)
        d *= d_scale / max(float(np.linalg.norm(d)), 1e-12)
    ups0 = linalg.hermitian_part(o @ np.diag(u) @ o.T)
    d0 = o @ d @ o.T
    return ups0, d0


def _check_tags(scn: Scenario) -> None:
    tol = 1e-10
    p = scn.problem
    tags = scn.regime_tags
    if "scalar" in tags and p.dim != 1:
        raise InconsistentRegime("scalar scenario must have dim 1")
    if "trivial_D0" in tags and not p.is_constant:
        raise InconsistentRegime("trivial_D0 scenario must have d0 = 0")
    if "fermionic_antisymmetric" in tags and p.symmetry != Symmetry.ANTISYMMETRIC:
        raise InconsistentRegime("fermionic scenario must be antisymmetric")
    if "commuting" in tags:
        k0 = p.upsilon0 @ p.d0 - p.d0 @ p.upsilon0.T
        if float(np.linalg.norm(k0)) > 1e-12 * max(
            1.0, float(np.linalg.norm(p.upsilon0) * np.linalg.norm(p.d0))
        ):
            raise InconsistentRegime("commuting scenario has K0 != 0")
    if "gap_positive" in tags:
        if linalg.min_eigenvalue(p.upsilon0) < 2.0 * p.mu - tol:
            raise InconsistentRegime("gap scenario violates Ups0 >= alpha with mu = alpha/2")
    if "nonpositive_frakD0_psd" in tags:
        if p.mu == 0.0:
            raise InconsistentRegime("regime needs mu != 0")
        if linalg.min_eigenvalue(p.upsilon0) >= 0.0:
            raise InconsistentRegime("regime needs a negative part in Ups0")
    if "nonpositive_frakD0_psd" in tags or "gap_positive" in tags:
        eye = np.eye(p.dim)
        m = p.upsilon0.T + p.mu * eye
        b = linalg.hermitian_part(p.d0 @ np.linalg.solve(m, p.d0.conj().T))
        frak_d0 = p.upsilon0 - p.mu * eye + 4.0 * b
        if linalg.min_eigenvalue(frak_d0) < -tol:
            raise InconsistentRegime("initial ellipticity functional is not PSD")


def generate(seed: int, regime, dim: int) -> Scenario:
    """Deterministic scenario for the given regime tag set and dimension."""
    tags = frozenset(regime)
    unknown = tags - set(REGIME_TAGS)
    if unknown:
        raise InconsistentRegime(f"unknown regime tags {sorted(unknown)}")
    if dim < 1:
        raise InconsistentRegime("dim must be >= 1")
    if "scalar" in tags and dim != 1:
        raise InconsistentRegime("scalar regime forces dim = 1")
    if "fermionic_antisymmetric" in tags and dim < 2 and "trivial_D0" not in tags:
        raise InconsistentRegime("antisymmetric nonzero d0 needs dim >= 2")

    rng = _rng(seed, tags, dim)
    sign = -1 if "fermionic_antisymmetric" in tags else +1
    expected: dict | None = None

    if "scalar" in tags:
        if seed == 0:
            alpha, beta = SCALAR_FIXTURE["alpha"], SCALAR_FIXTURE["beta"]
            mu, epsilon = SCALAR_FIXTURE["mu"], SCALAR_FIXTURE["epsilon"]
        else:
            alpha = float(rng.uniform(-1.0, 1.0))
            beta = float(rng.uniform(0.05, 0.4))
            mu = abs(alpha) + 0.5
            epsilon = 0.25
        ups0 = np.array([[-alpha]], dtype=np.complex128)
        d0 = np.array([[1j * beta]], dtype=np.complex128)
        if "trivial_D0" in tags:
            d0 = np.zeros((1, 1), dtype=np.complex128)
            expected = {"constant": True}
        else:
            expected = {
                "alpha": alpha,
                "beta": beta,
                "c": float(np.hypot(alpha, 2.0 * beta)),
            }
        problem = FlowProblem(ups0, d0, mu=mu, epsilon=epsilon, symmetry=Symmetry(1))
        scn = Scenario(_name(tags, seed, dim), problem, tags, expected)
        _check_tags(scn)
        return scn

    d_scale = float(rng.uniform(0.3, 0.8))

    if "gap_positive" in tags:
        alpha_gap = float(rng.uniform(0.6, 1.4))
        lam_lo, lam_hi = alpha_gap, alpha_gap + 2.0
        mu = 0.5 * alpha_gap
        epsilon = alpha_gap
    elif "nonpositive_frakD0_psd" in tags:
        lam_lo = -float(rng.uniform(0.2, 0.5))
        lam_hi = lam_lo + float(rng.uniform(1.5, 2.5))
        mu = epsilon = None  # fixed after the mu scan below
    else:
        lam_lo = float(rng.uniform(-0.8, 0.5))
        lam_hi = lam_lo + float(rng.uniform(1.0, 2.5))
        mu = max(0.0, -lam_lo) + 0.6
        epsilon = 0.5 * (mu + lam_lo)

    if "commuting" in tags:
        ups0, d0 = _commuting_pair(rng, dim, sign, lam_lo, lam_hi, d_scale)
    else:
        ups0 = _random_hermitian(rng, dim, lam_lo, lam_hi)
        d0 = _random_in_symmetry_class(rng, dim, sign, d_scale)

    if "trivial_D0" in tags:
        d0 = np.zeros((dim, dim), dtype=np.complex128)
        expected = {"constant": True}

    if "nonpositive_frakD0_psd" in tags:
        # Scaling D up widens the admissible mu window, but a kernel vector
        # of a singular draw (odd-dimensional antisymmetric D is always
        # singular) can block it entirely; redraw to rotate the kernel and
        # give each draw a full doubling ladder.
        # the conjugate-kernel Rayleigh quotient of a singular draw is
        # scale-invariant, so redraws (not the ladder) clear blocked kernels
        mu = None
        for draw in range(24):
            d_try = (
                d0
                if draw == 0 or "commuting" in tags
                else _random_in_symmetry_class(rng, dim, sign, d_scale)
            )
            for _ in range(8):
                cand = scan_max_mu(ups0, d_try)
                if cand is not None and cand + lam_lo > 1e-3:
                    mu, d0 = cand, d_try
                    break
                d_try = d_try * 2.0
            if mu is not None:
                break
        if mu is None:
            raise InconsistentRegime(
                "no positive mu keeps the initial ellipticity functional PSD"
            )
        epsilon = 0.5 * (mu + lam_lo)

    problem = FlowProblem(ups0, d0, mu=float(mu), epsilon=float(epsilon), symmetry=Symmetry(sign))
    if "commuting" in tags and expected is None and (
        "gap_positive" in tags or "nonpositive_frakD0_psd" in tags
    ):
        arg = linalg.hermitian_part(ups0 @ ups0 + 4.0 * (d0 @ d0.conj().T))
        expected = {
            "upsilon_inf": linalg.matrix_to_json(
                linalg.psd_sqrt(arg, tol=1e-10 * max(1.0, float(np.linalg.norm(arg))))
            )
        }
    scn = Scenario(_name(tags, seed, dim), problem, tags, expected)
    _check_tags(scn)
    return scn


def _name(tags: frozenset, seed: int, dim: int) -> str:
    return f"{'+'.join(sorted(tags))}-s{seed}-d{dim}"


def negative_cases(seed: int) -> list:
    """Instances whose initial ellipticity functional stays indefinite.

    They exercise the non-asserting audit paths: no gap claim is made and
    convergence within t_max is not guaranteed by the implemented bounds.
    """
    cases = []
    ups0 = np.array([[-0.5]], dtype=np.complex128)
    d0 = np.array([[0.01j]], dtype=np.complex128)
    cases.append(
        Scenario(
            name=f"negative-scalar-small-coupling-s{seed}",
            problem=FlowProblem(ups0, d0, mu=0.6, epsilon=0.1, symmetry=Symmetry(1)),
            regime_tags=frozenset({"scalar"}),
            expected={"alpha": 0.5, "beta": 0.01, "c": float(np.hypot(0.5, 0.02))},
        )
    )
    ups0 = np.diag([-0.5, 2.0]).astype(np.complex128)
    d0 = np.diag([0.0, 0.4j]).astype(np.complex128)
    cases.append(
        Scenario(
            name=f"negative-commuting-constant-subspace-s{seed}",
            problem=FlowProblem(ups0, d0, mu=0.7, epsilon=0.15, symmetry=Symmetry(1)),
            regime_tags=frozenset({"commuting"}),
            expected=None,
        )
    )
    cases.append(generate(seed, {"trivial_D0"}, 2))
    for scn in cases[:2]:
        # both engineered instances must really violate PSD-ness at their mu
        p = scn.problem
        eye = np.eye(p.dim)
        m = p.upsilon0.T + p.mu * eye
        b = linalg.hermitian_part(p.d0 @ np.linalg.solve(m, p.d0.conj().T))
        frak_d0 = p.upsilon0 - p.mu * eye + 4.0 * b
        assert linalg.min_eigenvalue(frak_d0) < 0.0
    return cases
