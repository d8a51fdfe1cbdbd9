"""Dense complex matrix algebra with a fixed conjugation convention.

The complex conjugation is entrywise conjugation in the canonical basis, so
``transpose`` is the ordinary matrix transpose, ``conjugate`` the entrywise
conjugate and ``adjoint(M) == conjugate(transpose(M))`` exactly.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotPSD

HERMITICITY_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and return a square, finite, complex128 copy of ``m``."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def transpose(m: np.ndarray) -> np.ndarray:
    """Ordinary matrix transpose."""
    return np.array(m).T.copy()


def conjugate(m: np.ndarray) -> np.ndarray:
    """Entrywise complex conjugate."""
    return np.conj(m)


def adjoint(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.array(m).T)


def hermitian_part(m: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto Hermitian matrices."""
    return 0.5 * (m + adjoint(m))


def hermiticity_residual(m: np.ndarray) -> float:
    """Relative Frobenius distance of ``m`` from its Hermitian part."""
    nrm = np.linalg.norm(m)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(m - adjoint(m)) / nrm)


def symmetry_residual(m: np.ndarray, sign: int) -> float:
    """Relative Frobenius distance of ``m`` from its ``M^T = sign*M`` class."""
    nrm = np.linalg.norm(m)
    if nrm == 0.0:
        return 0.0
    return float(np.linalg.norm(m.T - sign * m) / nrm)


def symmetry_project(m: np.ndarray, sign: int) -> np.ndarray:
    """Orthogonal projection onto matrices with ``M^T = sign*M``."""
    return 0.5 * (m + sign * m.T)


def hermitian_eigen(m: np.ndarray, tol: float = HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Eigenvalues are ascending; each eigenvector is rescaled so that its first
    component above the noise floor is real and positive, which makes the
    decomposition reproducible across runs.

    Raises NotHermitian if ``||m - m*|| > tol * ||m||``.
    """
    a = as_matrix(m)
    if hermiticity_residual(a) > tol:
        raise NotHermitian(
            f"matrix is not Hermitian to relative tolerance {tol:g}"
        )
    vals, vecs = np.linalg.eigh(hermitian_part(a))
    scale = np.max(np.abs(vecs), axis=0)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = np.argmax(np.abs(col) > 1e-12 * scale[k])
        phase = col[idx] / abs(col[idx])
        vecs[:, k] = col * np.conj(phase)
    return vals, vecs


def psd_sqrt(m: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Hermitian PSD square root of a Hermitian PSD matrix.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; quadrature noise on
    otherwise PSD inputs must not abort the computation.  Raises NotPSD when
    the smallest eigenvalue is below ``-tol``.
    """
    vals, vecs = hermitian_eigen(m, tol=tol)
    lam_min = float(vals[0])
    if lam_min < -tol:
        raise NotPSD(f"smallest eigenvalue {lam_min:g} < -{tol:g}")
    vals = np.clip(vals, 0.0, None)
    root = (vecs * np.sqrt(vals)) @ adjoint(vecs)
    return hermitian_part(root)


def norm(m: np.ndarray, kind: str = "operator") -> float:
    """Matrix norm: ``operator`` (largest singular value), ``hilbert_schmidt``
    (Frobenius) or ``trace`` (sum of singular values)."""
    a = np.asarray(m, dtype=np.complex128)
    if kind == "operator":
        if a.shape[0] == 1:
            return float(abs(a[0, 0]))
        return float(np.linalg.norm(a, 2))
    if kind == "hilbert_schmidt":
        return float(np.linalg.norm(a))
    if kind == "trace":
        return float(np.sum(np.linalg.svd(a, compute_uv=False)))
    raise ValueError(f"unknown norm kind {kind!r}")


def min_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(hermitian_part(np.asarray(m)))[0])


def max_eigenvalue(m: np.ndarray) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    return float(np.linalg.eigvalsh(hermitian_part(np.asarray(m)))[-1])


def matrix_to_json(m: np.ndarray) -> dict:
    """Shared JSON encoding: ``{"n": int, "re": rows, "im": rows}``."""
    a = as_matrix(m)
    return {
        "n": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    """Decode the shared matrix JSON encoding."""
    try:
        n = int(obj["n"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(
            f"matrix object claims n={n} but arrays have shapes "
            f"{re.shape} and {im.shape}"
        )
    return as_matrix(re + 1j * im)
