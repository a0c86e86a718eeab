import numpy as np
import pytest
from pydantic import ValidationError

from qig_kit.geometry.hea import CircuitSpec
from qig_kit.geometry.support import support_of
from qig_kit.vqe.hamiltonians import (
    PauliSumHamiltonian,
    PauliTerm,
    exact_ground,
    h2_hamiltonian,
    spectrum,
    toy_hamiltonian,
)
from qig_kit.vqe.natgrad import (
    ArmijoConfig,
    OptimizerConfig,
    active_mask,
    armijo_backtrack,
    energy_and_gradient,
    gradient_adjoint,
    gradient_fd,
    metrics,
    natgrad_step,
    run,
)

DEEP = CircuitSpec(depth=2, entanglers=("zz", "xx"))
HEA2 = CircuitSpec(depth=2)


class TestHamiltonians:
    @pytest.mark.parametrize("pauli", ["ZZ", "XI"])
    def test_single_pauli_ground(self, pauli):
        E, _ = exact_ground(PauliSumHamiltonian.from_pairs([(1.0, pauli)]))
        assert E == pytest.approx(-1.0)

    def test_h2_ground_energy(self):
        E, vec = exact_ground(h2_hamiltonian())
        assert E == pytest.approx(-1.857275030, abs=1e-6)
        assert np.linalg.norm(vec) == pytest.approx(1.0)

    def test_spectrum_sorted(self):
        vals = spectrum(toy_hamiltonian())
        assert np.all(np.diff(vals) >= 0)
        assert vals[0] == pytest.approx(exact_ground(toy_hamiltonian())[0])

    def test_pauli_validation(self):
        assert PauliTerm(coefficient=1.0, pauli="xz").pauli == "XZ"
        with pytest.raises(ValidationError):
            PauliTerm(coefficient=1.0, pauli="XQ")
        with pytest.raises(ValidationError):
            PauliTerm(coefficient=1.0, pauli="XYZ")

    def test_from_json(self, tmp_path):
        path = tmp_path / "h.json"
        path.write_text(toy_hamiltonian().model_dump_json())
        assert PauliSumHamiltonian.from_json(path) == toy_hamiltonian()


class TestGradients:
    def test_identity_hamiltonian(self, rng):
        """H = II gives E = 1 and a zero gradient everywhere"""
        H = PauliSumHamiltonian.from_pairs([(1.0, "II")])
        E, grad = energy_and_gradient(HEA2, rng.uniform(0, np.pi, size=HEA2.n_params), H)
        assert E == pytest.approx(1.0)
        np.testing.assert_allclose(grad, 0.0, atol=1e-12)

    @pytest.mark.parametrize("spec", [HEA2, DEEP], ids=["ry-cnot", "zz-xx"])
    def test_parameter_shift_matches_fd_and_adjoint(self, spec, rng):
        params = rng.uniform(0, np.pi, size=spec.n_params)
        _, grad = energy_and_gradient(spec, params, h2_hamiltonian())
        np.testing.assert_allclose(grad, gradient_fd(spec, params, h2_hamiltonian()), atol=1e-8)
        np.testing.assert_allclose(grad, gradient_adjoint(spec, params, h2_hamiltonian()), atol=1e-12)


class TestNatgradStep:
    """Support-projected preconditioned step"""

    @pytest.mark.parametrize("ridge, expected", [(0.0, [-1.0, 0.0]), (0.25, [-0.8, 0.0])])
    def test_rank_one_examples(self, ridge, expected):
        F = np.diag([1.0, 0.0])
        cfg = OptimizerConfig(step=1.0, ridge=ridge)
        step = natgrad_step([1.0, 5.0], F, support_of(F), cfg)
        np.testing.assert_allclose(step, expected, atol=1e-15)

    def test_identity_metric_is_euclidean(self, rng):
        g = rng.normal(size=4)
        cfg = OptimizerConfig(step=0.1, ridge=0.0)
        np.testing.assert_array_equal(natgrad_step(g, np.eye(4), support_of(np.eye(4)), cfg), -0.1 * g)

    def test_identity_metric_keeps_caps(self, rng):
        g = 10.0 * rng.normal(size=4)
        cfg = OptimizerConfig(step=0.1, ridge=0.0, tr_radius=0.05)
        step = natgrad_step(g, np.eye(4), support_of(np.eye(4)), cfg)
        assert np.linalg.norm(step) == pytest.approx(0.05)
        np.testing.assert_allclose(step / np.linalg.norm(step), -g / np.linalg.norm(g))

    def test_descent_and_support(self, rng):
        """The step is a descent direction and has no component off Im P"""
        cfg = OptimizerConfig(step=0.1)
        for _ in range(20):
            J = rng.normal(size=(2, 4))
            F = J.T @ J
            split = support_of(F)
            g = rng.normal(size=4)
            step = natgrad_step(g, F, split, cfg)
            assert g @ step < 0
            assert np.linalg.norm(step - split.projector @ step) <= 1e-12

    def test_null_space_mixing(self, rng):
        F = np.diag([1.0, 0.0])
        cfg = OptimizerConfig(step=1.0, ridge=0.0, null_space_mixing=0.5)
        np.testing.assert_allclose(natgrad_step([1.0, 2.0], F, support_of(F), cfg), [-1.0, -1.0])

    def test_caps(self):
        F = np.diag([1.0, 1.0])
        capped = natgrad_step([10.0, 0.0], F, support_of(F), OptimizerConfig(step=1.0, ridge=0.0, gnorm_cap=2.0))
        assert np.sqrt(capped @ F @ capped) == pytest.approx(2.0)
        trust = natgrad_step([10.0, 0.0], F, support_of(F), OptimizerConfig(step=1.0, ridge=0.0, tr_radius=0.5))
        assert np.linalg.norm(trust) == pytest.approx(0.5)

    def test_zero_rank_falls_back(self):
        F = np.zeros((2, 2))
        step = natgrad_step([1.0, -2.0], F, support_of(F), OptimizerConfig(step=0.5))
        np.testing.assert_allclose(step, [-0.5, 1.0])


class TestArmijo:
    def test_backtracks_to_decrease(self):
        f = lambda t: float(t @ t)  # noqa: E731
        theta = np.array([1.0, 1.0])
        grad = 2.0 * theta
        step, E_new, backtracks, accepted = armijo_backtrack(f, theta, f(theta), grad, -10.0 * grad, ArmijoConfig())
        assert accepted and backtracks > 0
        assert E_new <= f(theta)
        assert E_new == pytest.approx(f(theta + step))

    def test_ascent_direction_rejected(self):
        f = lambda t: float(t @ t)  # noqa: E731
        theta = np.array([1.0, 1.0])
        step, E_new, _, accepted = armijo_backtrack(f, theta, 2.0, 2.0 * theta, theta, ArmijoConfig())
        assert not accepted
        np.testing.assert_array_equal(step, 0.0)
        assert E_new == 2.0

    def test_disabled(self):
        f = lambda t: float(t @ t)  # noqa: E731
        step, _, backtracks, accepted = armijo_backtrack(
            f, np.zeros(2), 0.0, np.zeros(2), np.ones(2), ArmijoConfig(enabled=False)
        )
        assert accepted and backtracks == 0
        np.testing.assert_array_equal(step, 1.0)


class TestRun:
    @pytest.mark.parametrize("method", ["euclidean", "natgrad"])
    def test_monotone_with_armijo(self, method):
        trace = run(HEA2, toy_hamiltonian(), OptimizerConfig(method=method), max_iters=30)
        assert len(trace.records) == 31
        assert np.all(np.diff(trace.energies) <= 1e-12)
        assert np.all(trace.energies >= trace.E_star - 1e-12)

    def test_deterministic(self):
        cfg = OptimizerConfig(method="natgrad", seed=3)
        a = run(HEA2, h2_hamiltonian(), cfg, max_iters=15)
        b = run(HEA2, h2_hamiltonian(), cfg, max_iters=15)
        np.testing.assert_array_equal(a.energies, b.energies)
        np.testing.assert_array_equal(a.params, b.params)

    def test_pure_metric_source(self):
        cfg = OptimizerConfig(metric_source="pure", partial_fisher=True, ema_decay=0.5)
        trace = run(HEA2, toy_hamiltonian(), cfg, max_iters=10)
        assert trace.energies[-1] <= trace.energies[0]

    def test_trace_frame(self):
        trace = run(HEA2, toy_hamiltonian(), OptimizerConfig(method="euclidean"), max_iters=5)
        frame = trace.to_frame()
        assert list(frame.columns[:3]) == ["iteration", "energy", "error"]
        assert len(frame) == 6


class TestMetrics:
    def test_linear_trace(self):
        """A linear descent from 1 to 0 over 20 points reaches 95% at k = 19"""
        auc, hit95 = metrics(np.linspace(1.0, 0.0, 20), E_star=0.0)
        assert auc == pytest.approx(9.5)
        assert hit95 == 19

    def test_no_progress(self):
        auc, hit95 = metrics(np.ones(5), E_star=0.0)
        assert auc == pytest.approx(4.0)
        assert hit95 is None

    def test_empty(self):
        with pytest.raises(ValueError):
            metrics(np.array([]), E_star=0.0)


class TestConfig:
    def test_active_mask(self):
        np.testing.assert_array_equal(active_mask(DEEP, 0, None), np.ones(10, dtype=bool))
        mask = active_mask(DEEP, 0, grow_every=5)
        assert mask.sum() == 6
        assert mask[:4].all() and mask[6:8].all()
        assert active_mask(DEEP, 5, grow_every=5).all()

    @pytest.mark.parametrize(
        "kwargs",
        [{"step": 0.0}, {"method": "adam"}, {"shrinkage": 1.5}, {"ema_decay": 1.0}, {"grow_every": 0}],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValidationError):
            OptimizerConfig(**kwargs)
