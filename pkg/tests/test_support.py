import numpy as np
import pytest

from qig_kit.core.config import Guards
from qig_kit.core.errors import GapGuardError
from qig_kit.geometry.support import (
    projected_metric,
    projected_metric_derivative,
    projector_derivative,
    regularity,
    split_spectrum,
    support_of,
)


def _family(rng):
    """F(t) = J(t)^T J(t), rank 2 in four dimensions."""
    J0, J1 = rng.normal(size=(2, 2, 4))

    def F(t):
        J = J0 + t * J1
        return J.T @ J

    dF = J1.T @ J0 + J0.T @ J1
    return F, dF


class TestSupportSplit:
    def test_rank_two_diagonal(self):
        """diag(4, 4, 0, 0) splits into a rank-2 support with gap 4"""
        split = support_of(np.diag([4.0, 4.0, 0.0, 0.0]))
        assert split.rank == 2
        assert split.gap == pytest.approx(4.0)
        assert split.tau_used == pytest.approx(4e-12)
        assert not split.straddles
        np.testing.assert_allclose(split.projector, np.diag([1.0, 1.0, 0.0, 0.0]), atol=1e-15)

    def test_zero_matrix(self):
        split = support_of(np.zeros((4, 4)))
        assert split.rank == 0
        assert split.gap == float("inf")
        assert not split.straddles
        np.testing.assert_allclose(split.projector, 0.0)

    def test_full_rank(self):
        split = support_of(np.eye(3))
        assert split.rank == 3
        assert split.gap == float("inf")

    def test_threshold_follows_guards(self):
        """A larger kappa moves a small eigenvalue out of the support"""
        F = np.diag([1.0, 5e-11, 0.0])
        assert support_of(F).rank == 2
        assert support_of(F, Guards(tau_kappa=1e-10)).rank == 1

    def test_straddle_flag(self):
        split = split_spectrum(np.diag([1.0, 1e-6]), tau=1e-6)
        assert split.straddles

    def test_projector_is_idempotent(self, rng):
        F, _ = _family(rng)
        P = support_of(F(0.0)).projector
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(P, P.T)


class TestProjectorDerivative:
    def test_matches_finite_difference(self, rng):
        """dP equals the centered difference of the projector along the family"""
        F, dF = _family(rng)
        split = support_of(F(0.0))
        h = 1e-6
        fd = (support_of(F(h)).projector - support_of(F(-h)).projector) / (2 * h)
        np.testing.assert_allclose(projector_derivative(F(0.0), dF, split), fd, atol=1e-6)

    def test_gap_bound(self, rng):
        """||dP||_F <= sqrt(2) ||dF||_F / gap"""
        for _ in range(20):
            F, dF = _family(rng)
            split = support_of(F(0.0))
            dP = projector_derivative(F(0.0), dF, split)
            assert np.linalg.norm(dP) <= np.sqrt(2.0) * np.linalg.norm(dF) / split.gap + 1e-12

    def test_trivial_support(self):
        split = support_of(np.eye(2))
        np.testing.assert_allclose(projector_derivative(np.eye(2), np.ones((2, 2)), split), 0.0)

    def test_gap_guard(self):
        """A gap below gap_min raises instead of dividing by it"""
        F = np.diag([1.0, 1e-9, 0.0, 0.0])
        split = support_of(F)
        assert split.rank == 2
        with pytest.raises(GapGuardError):
            projector_derivative(F, np.eye(4), split, gap_min=1e-8)
        assert not regularity(split, 1e-8).regular


class TestProjectedMetric:
    def test_removes_null_directions(self):
        F = np.diag([4.0, 4.0, 0.0, 0.0])
        F[0, 3] = F[3, 0] = 1e-16
        g = projected_metric(F, support_of(F))
        np.testing.assert_allclose(g, np.diag([4.0, 4.0, 0.0, 0.0]), atol=1e-15)

    def test_derivative_matches_finite_difference(self, rng):
        F, dF = _family(rng)
        split = support_of(F(0.0))
        h = 1e-6

        def g(t):
            return projected_metric(F(t), support_of(F(t)))

        fd = (g(h) - g(-h)) / (2 * h)
        np.testing.assert_allclose(projected_metric_derivative(F(0.0), dF, split), fd, atol=1e-6)

    def test_regular_flags(self):
        split = support_of(np.diag([4.0, 4.0, 0.0, 0.0]))
        flags = regularity(split, 1e-8)
        assert flags.regular and flags.rank == 2
        assert not regularity(split, 1e-8, brioschi_ok=False).regular
