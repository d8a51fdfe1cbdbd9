"""Tests for the matrix algebra layer and its conjugation conventions."""

import numpy as np
import pytest

from ellflow import linalg
from ellflow.errors import NotHermitian, NotPSD

RNG = np.random.default_rng(7)


def random_complex(n):
    return RNG.normal(size=(n, n)) + 1j * RNG.normal(size=(n, n))


def random_hermitian(n):
    return linalg.hermitian_part(random_complex(n))


class TestTranspose:
    def test_identity(self):
        eye = np.eye(3, dtype=complex)
        np.testing.assert_array_equal(linalg.transpose(eye), eye)

    def test_pauli_like(self):
        m = np.array([[0, 1j], [-1j, 0]])
        expected = np.array([[0, -1j], [1j, 0]])
        np.testing.assert_array_equal(linalg.transpose(m), expected)

    def test_involution(self):
        m = random_complex(5)
        np.testing.assert_array_equal(linalg.transpose(linalg.transpose(m)), m)

    def test_adjoint_is_conj_transpose(self):
        """adjoint(M) = conj(transpose(M)) exactly, entry by entry."""
        m = random_complex(5)
        np.testing.assert_array_equal(
            linalg.adjoint(m), np.conj(linalg.transpose(m))
        )

    def test_transpose_preserves_positivity(self):
        """lambda_min(M^T) = lambda_min(M) for Hermitian PSD M, to 1e-12."""
        a = random_complex(6)
        m = a @ a.conj().T
        lam_m = linalg.min_eigenvalue(m)
        lam_mt = np.linalg.eigvalsh(linalg.hermitian_part(m.T))[0]
        assert abs(lam_m - lam_mt) <= 1e-12 * max(1.0, abs(lam_m))


class TestHermitianEigen:
    def test_diagonal_sorted(self):
        vals, _ = linalg.hermitian_eigen(np.diag([3.0, 1.0, 2.0]).astype(complex))
        np.testing.assert_allclose(vals, [1.0, 2.0, 3.0], rtol=0, atol=1e-14)

    def test_pauli_x(self):
        vals, _ = linalg.hermitian_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(vals, [-1.0, 1.0], atol=1e-14)

    def test_reconstruction(self):
        m = random_hermitian(6)
        vals, vecs = linalg.hermitian_eigen(m)
        rec = (vecs * vals) @ vecs.conj().T
        np.testing.assert_allclose(rec, m, atol=1e-12)

    def test_unitary_eigenvectors(self):
        _, vecs = linalg.hermitian_eigen(random_hermitian(5))
        np.testing.assert_allclose(
            vecs.conj().T @ vecs, np.eye(5), atol=1e-12
        )

    def test_deterministic_phases(self):
        """Repeated calls give identical eigenvectors, first pivot real > 0."""
        m = random_hermitian(5)
        _, v1 = linalg.hermitian_eigen(m)
        _, v2 = linalg.hermitian_eigen(m)
        np.testing.assert_array_equal(v1, v2)
        for k in range(5):
            col = v1[:, k]
            idx = np.argmax(np.abs(col) > 1e-12 * np.max(np.abs(col)))
            assert col[idx].real > 0
            assert abs(col[idx].imag) <= 1e-12 * abs(col[idx])

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            linalg.hermitian_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPsdSqrt:
    def test_diagonal(self):
        s = linalg.psd_sqrt(np.diag([4.0, 9.0]).astype(complex))
        np.testing.assert_allclose(s, np.diag([2.0, 3.0]), atol=1e-14)

    def test_identity(self):
        np.testing.assert_allclose(
            linalg.psd_sqrt(np.eye(4, dtype=complex)), np.eye(4), atol=1e-14
        )

    def test_square_recovers_input(self):
        """Construct PSD M = A A*, then psd_sqrt(M)^2 = M to 1e-10."""
        a = random_complex(5)
        m = a @ a.conj().T
        s = linalg.psd_sqrt(m)
        np.testing.assert_allclose(s @ s, m, atol=1e-10 * np.linalg.norm(m))

    def test_commutes_with_input(self):
        a = random_complex(5)
        m = a @ a.conj().T
        s = linalg.psd_sqrt(m)
        assert np.linalg.norm(s @ m - m @ s) <= 1e-10 * np.linalg.norm(m) ** 1.5

    def test_clamps_tiny_negative(self):
        m = np.diag([1.0, -1e-12]).astype(complex)
        s = linalg.psd_sqrt(m, tol=1e-10)
        assert linalg.min_eigenvalue(s) >= 0.0

    def test_rejects_indefinite(self):
        with pytest.raises(NotPSD):
            linalg.psd_sqrt(np.diag([1.0, -1.0]).astype(complex))


class TestNorms:
    def test_diagonal_values(self):
        m = np.diag([1.0, -2.0]).astype(complex)
        assert linalg.norm(m, "operator") == pytest.approx(2.0)
        assert linalg.norm(m, "hilbert_schmidt") == pytest.approx(np.sqrt(5.0))
        assert linalg.norm(m, "trace") == pytest.approx(3.0)

    def test_zero_matrix(self):
        z = np.zeros((3, 3), dtype=complex)
        for kind in ("operator", "hilbert_schmidt", "trace"):
            assert linalg.norm(z, kind) == 0.0

    def test_norm_ordering(self):
        """||M||_op <= ||M||_2 <= ||M||_1 on 1000 random matrices."""
        for _ in range(1000):
            n = int(RNG.integers(1, 7))
            m = RNG.normal(size=(n, n)) + 1j * RNG.normal(size=(n, n))
            op = linalg.norm(m, "operator")
            hs = linalg.norm(m, "hilbert_schmidt")
            tr = linalg.norm(m, "trace")
            assert op <= hs * (1 + 1e-12)
            assert hs <= tr * (1 + 1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            linalg.norm(np.eye(2), "nuclear")


class TestJson:
    def test_round_trip(self):
        m = random_complex(4)
        obj = linalg.matrix_to_json(m)
        assert obj["n"] == 4
        np.testing.assert_array_equal(linalg.matrix_from_json(obj), m)

    def test_malformed(self):
        with pytest.raises(ValueError):
            linalg.matrix_from_json({"n": 2, "re": [[1.0]], "im": [[0.0]]})
        with pytest.raises(ValueError):
            linalg.matrix_from_json({"re": [[1.0]]})
