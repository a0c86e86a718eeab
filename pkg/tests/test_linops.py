import numpy as np
import pytest

from qig_kit.core.errors import DomainError, RankError
from qig_kit.geometry.linops import (
    central_diff,
    eigh_hermitian2,
    eigh_sym,
    mixed_diff,
    pinv_on_support,
    scalar_derivative,
    second_diff,
)


class TestEighHermitian2:
    """Closed-form 2x2 eigendecomposition"""

    def test_diagonal(self):
        """A diagonal matrix returns its diagonal in descending order"""
        vals, vecs = eigh_hermitian2(np.diag([0.2, 0.8]))
        np.testing.assert_allclose(vals, [0.8, 0.2])
        np.testing.assert_allclose(np.abs(vecs), [[0, 1], [1, 0]])

    def test_degenerate_returns_basis(self):
        """A multiple of the identity returns an orthonormal basis"""
        vals, vecs = eigh_hermitian2(0.5 * np.eye(2))
        np.testing.assert_allclose(vals, [0.5, 0.5])
        np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(2), atol=1e-15)

    def test_matches_numpy(self, rng):
        """Eigenpairs agree with numpy on random Hermitian matrices"""
        for _ in range(200):
            a, d = rng.normal(size=2)
            b = complex(*rng.normal(size=2))
            H = np.array([[a, b], [np.conj(b), d]])
            vals, vecs = eigh_hermitian2(H)
            np.testing.assert_allclose(vals, np.linalg.eigvalsh(H)[::-1], atol=1e-12)
            np.testing.assert_allclose(H @ vecs, vecs * vals, atol=1e-12)
            np.testing.assert_allclose(vecs.conj().T @ vecs, np.eye(2), atol=1e-12)

    def test_rejects_non_hermitian(self):
        """Non-Hermitian input raises DomainError"""
        with pytest.raises(DomainError):
            eigh_hermitian2([[1.0, 2.0], [0.0, 1.0]])


class TestEighSym:
    def test_descending_and_sign_fixed(self, rng):
        """Eigenvalues descend and each eigenvector's largest entry is positive"""
        M = rng.normal(size=(4, 4))
        split = eigh_sym(M + M.T)
        assert np.all(np.diff(split.eigenvalues) <= 0)
        assert split.active_count is None
        for k in range(4):
            col = split.eigenvectors[:, k]
            assert col[np.argmax(np.abs(col))] > 0


class TestPinvOnSupport:
    """Support-restricted ridge pseudoinverse"""

    def test_projects_out_null_direction(self):
        """diag(4, 0) with one active direction inverts only that direction"""
        split = eigh_sym(np.diag([4.0, 0.0])).with_active(1)
        M = pinv_on_support(np.diag([4.0, 0.0]), split)
        np.testing.assert_allclose(M, [[0.25, 0.0], [0.0, 0.0]])

    def test_ridge(self):
        """The ridge shifts the active eigenvalues"""
        split = eigh_sym(np.diag([4.0, 0.0])).with_active(1)
        M = pinv_on_support(np.diag([4.0, 0.0]), split, ridge=1.0)
        np.testing.assert_allclose(M, [[0.2, 0.0], [0.0, 0.0]])

    def test_requires_active_set(self):
        """A split without active_count is rejected"""
        with pytest.raises(DomainError):
            pinv_on_support(np.eye(2), eigh_sym(np.eye(2)))

    def test_nonpositive_active_eigenvalue(self):
        """An active eigenvalue <= 0 raises RankError"""
        split = eigh_sym(np.diag([1.0, -1.0])).with_active(2)
        with pytest.raises(RankError, match="nonpositive active eigenvalue"):
            pinv_on_support(np.diag([1.0, -1.0]), split)

    def test_negative_ridge(self):
        split = eigh_sym(np.eye(2)).with_active(2)
        with pytest.raises(DomainError):
            pinv_on_support(np.eye(2), split, ridge=-1.0)


class TestFiniteDifferences:
    def test_central_and_second(self):
        """Centered stencils on sin agree with cos and -sin"""
        phi = lambda t: np.sin(t[0]) * np.cos(t[1])  # noqa: E731
        theta = np.array([0.3, 0.4])
        assert central_diff(phi, theta, 0, 1e-5) == pytest.approx(np.cos(0.3) * np.cos(0.4), abs=1e-9)
        assert second_diff(phi, theta, 0, 1e-3) == pytest.approx(-np.sin(0.3) * np.cos(0.4), abs=1e-6)
        assert mixed_diff(phi, theta, 0, 1, 1e-3) == pytest.approx(-np.cos(0.3) * np.sin(0.4), abs=1e-6)

    def test_scalar_derivative(self):
        assert scalar_derivative(np.exp, 0.0, 1e-5) == pytest.approx(1.0, abs=1e-9)
        assert scalar_derivative(np.exp, 0.0, 1e-3, order=2) == pytest.approx(1.0, abs=1e-6)
        with pytest.raises(DomainError):
            scalar_derivative(np.exp, 0.0, 1e-3, order=3)
