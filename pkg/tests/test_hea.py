import numpy as np
import pytest

from qig_kit.core.errors import NormalizationError, ParameterCountError
from qig_kit.geometry.hea import (
    HEA1,
    CircuitSpec,
    HeaParams,
    ReducedQubitState,
    amplitudes,
    berry_curvature,
    bloch_derivatives,
    bloch_jet_from_rho,
    circuit_jet,
    concurrence_entropy,
    partial_trace,
    pure_state_qfim,
    reduce,
    reduced_state_jacobian,
    statevector_jacobian,
    statevector_oracle,
    von_neumann_entropy,
)
from qig_kit.geometry.linops import central_diff

DEEP = CircuitSpec(depth=2, entanglers=("zz", "xx"))


class TestAmplitudes:
    def test_theta_star(self, theta_star):
        """Closed-form amplitudes at the reference point"""
        amp = amplitudes(HeaParams.from_sequence(theta_star)).as_vector()
        np.testing.assert_allclose(amp, [-0.610065, -0.505083, -0.300875, -0.531212], atol=1e-5)

    def test_singular_point(self, theta_singular):
        np.testing.assert_allclose(amplitudes(theta_singular).as_vector(), [0.5, -0.5, 0.5, 0.5], atol=1e-15)

    def test_closed_form_matches_gates(self, rng):
        """The closed form equals the gate-level statevector of the depth-1 circuit"""
        for _ in range(100):
            theta = rng.uniform(-np.pi, np.pi, size=4)
            psi = statevector_oracle(HEA1, theta)
            np.testing.assert_allclose(psi, amplitudes(theta).as_vector(), atol=1e-12)

    def test_parameter_count(self):
        with pytest.raises(ParameterCountError):
            HeaParams.from_sequence([0.1, 0.2])
        with pytest.raises(ParameterCountError):
            statevector_oracle(DEEP, np.zeros(4))


class TestReduce:
    """Reduced state of qubit A"""

    def test_theta_star_bundle(self, theta_star):
        """rho_A, its spectrum and C at the reference point"""
        s = reduce(statevector_oracle(HEA1, theta_star))
        np.testing.assert_allclose(s.rho().real, [[0.6275, 0.4516], [0.4516, 0.3725]], atol=5e-4)
        np.testing.assert_allclose(s.eigenvalues(), [0.9693, 0.0307], atol=5e-4)
        assert s.x == pytest.approx(0.627288, abs=1e-6)
        assert s.z.real == pytest.approx(-0.451859, abs=1e-6)
        assert s.concurrence == pytest.approx(0.344214, abs=1e-6)

    def test_singular_point_maximally_entangled(self, theta_singular):
        s = reduce(statevector_oracle(HEA1, theta_singular))
        C, S = concurrence_entropy(s)
        assert C == pytest.approx(1.0, abs=1e-12)
        assert S == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        """|00> has C = 0, S = 0 and Delta = 0"""
        s = reduce(statevector_oracle(HEA1, np.zeros(4)))
        assert s.delta == pytest.approx(0.0, abs=1e-15)
        assert concurrence_entropy(s) == (0.0, 0.0)

    def test_rho_matches_partial_trace(self, rng):
        """The (x, z) bookkeeping reproduces Tr_B |psi><psi|"""
        for _ in range(50):
            psi = statevector_oracle(DEEP, rng.uniform(0, np.pi, size=DEEP.n_params))
            s = reduce(psi)
            np.testing.assert_allclose(s.rho(), partial_trace(np.outer(psi, psi.conj())), atol=1e-12)

    def test_from_rho_round_trip(self):
        s = ReducedQubitState(0.3, 0.1 - 0.2j)
        assert ReducedQubitState.from_rho(s.rho()) == s

    def test_normalization(self):
        with pytest.raises(NormalizationError):
            reduce([1.0, 1.0, 0.0, 0.0])


class TestEntropy:
    @pytest.mark.parametrize(
        "theta, S, purity",
        [
            ((0.6, 0.7, 0.8, 0.9), 0.055217, 0.987452),
            ((np.pi / 5, np.pi / 6, np.pi / 7, np.pi / 5), 0.328039, 0.886936),
            ((1.755, 1.720, 5.417, 4.126), 0.197165, 0.940758),
        ],
    )
    def test_concurrence_and_spectrum_routes(self, theta, S, purity):
        """S(C) and -sum lambda log2 lambda agree; values in bits"""
        psi = statevector_oracle(HEA1, theta)
        s = reduce(psi)
        _, S_closed = concurrence_entropy(s)
        assert S_closed == pytest.approx(S, abs=1e-5)
        assert von_neumann_entropy(s.rho()) == pytest.approx(S_closed, abs=1e-10)
        rho_B = partial_trace(np.outer(psi, psi.conj()), keep="B")
        assert np.trace(rho_B @ rho_B).real == pytest.approx(s.purity, abs=1e-12)
        assert s.purity == pytest.approx(purity, abs=1e-5)


class TestDerivatives:
    def test_first_order_matches_fd(self, theta_star):
        """Analytic (x, z) derivatives agree with centered differences"""
        jet = bloch_derivatives(theta_star)

        def xz(t):
            s = reduce(statevector_oracle(HEA1, t))
            return np.array([s.x, s.z.real])

        for i in range(4):
            fd = central_diff(xz, theta_star, i, 1e-6)
            np.testing.assert_allclose([jet.dx[i], jet.dz[i].real], fd, atol=1e-8)

    def test_second_order_matches_fd(self, theta_star):
        jet2 = bloch_derivatives(theta_star, order=2)
        for i in range(4):
            fd = central_diff(lambda t: bloch_derivatives(t).dx, theta_star, i, 1e-6)
            np.testing.assert_allclose(jet2.ddx[i], fd, atol=1e-7)
            fdz = central_diff(lambda t: bloch_derivatives(t).dz.real, theta_star, i, 1e-6)
            np.testing.assert_allclose(jet2.ddz[i].real, fdz, atol=1e-7)

    def test_gate_jacobian_matches_fd(self, rng):
        """Exact state derivatives of an entangled depth-2 circuit"""
        params = rng.uniform(0, np.pi, size=DEEP.n_params)
        _, dpsi = statevector_jacobian(DEEP, params)
        for i in range(DEEP.n_params):
            fd = central_diff(lambda t: statevector_oracle(DEEP, t), params, i, 1e-6)
            np.testing.assert_allclose(dpsi[i], fd, atol=1e-8)

    def test_closed_form_jet_matches_generic(self, theta_star):
        """The depth-1 shortcut equals the density-matrix route"""
        fast = circuit_jet(HEA1, theta_star)
        slow = bloch_jet_from_rho(*reduced_state_jacobian(HEA1, theta_star))
        assert fast.x == pytest.approx(slow.x, abs=1e-12)
        assert abs(fast.z - slow.z) < 1e-12
        np.testing.assert_allclose(fast.dx, slow.dx, atol=1e-12)
        np.testing.assert_allclose(fast.dz, slow.dz, atol=1e-12)


class TestPureStateGeometry:
    def test_qfim_is_psd(self, rng):
        F = pure_state_qfim(DEEP, rng.uniform(0, np.pi, size=DEEP.n_params))
        np.testing.assert_allclose(F, F.T)
        assert np.min(np.linalg.eigvalsh(F)) > -1e-12

    def test_berry_curvature_vanishes_for_real_circuit(self, theta_star):
        """Real amplitudes carry no Berry curvature"""
        np.testing.assert_allclose(berry_curvature(HEA1, theta_star), 0.0, atol=1e-14)

    def test_berry_curvature_antisymmetric(self, rng):
        Omega = berry_curvature(DEEP, rng.uniform(0, np.pi, size=DEEP.n_params))
        np.testing.assert_allclose(Omega, -Omega.T, atol=1e-14)
