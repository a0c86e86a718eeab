import pytest
from pydantic import ValidationError

from qig_kit.core.config import Guards, Settings, tau_spec
from qig_kit.core.errors import BrioschiSingularityError, GapGuardError, QigError, RankError, guard_cause


class TestSettings:
    def test_defaults(self):
        s = Settings(_env_file=None)
        assert s.SEED == 42
        assert s.METRIC_SCALE == 1.0
        assert s.FD_STEPS == [1e-2, 1e-3, 1e-4, 1e-5]

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("QIG_SEED", "7")
        monkeypatch.setenv("QIG_METRIC", "bkm")
        s = Settings(_env_file=None)
        assert s.SEED == 7
        assert s.METRIC == "bkm"

    def test_guards_from_settings(self, monkeypatch):
        monkeypatch.setenv("QIG_GAP_MIN", "1e-6")
        guards = Guards.from_settings(Settings(_env_file=None))
        assert guards.gap_min == 1e-6

    def test_numeric_knobs_reach_guards(self, monkeypatch):
        monkeypatch.setenv("QIG_SLD_DELTA_MIN", "1e-10")
        monkeypatch.setenv("QIG_FD_STEPS", "[1e-3, 1e-4]")
        monkeypatch.setenv("QIG_FD_NOISE_CAP", "0.5")
        guards = Guards.from_settings(Settings(_env_file=None))
        assert guards.sld_delta_min == 1e-10
        assert guards.fd_steps == (1e-3, 1e-4)
        assert guards.fd_noise_cap == 0.5


class TestGuards:
    @pytest.mark.parametrize("kappa", [1e-15, 1e-9])
    def test_kappa_bounds(self, kappa):
        with pytest.raises(ValidationError):
            Guards(tau_kappa=kappa)

    def test_scale_must_be_positive_and_finite(self):
        with pytest.raises(ValidationError):
            Guards(metric_scale=0.0)
        with pytest.raises(ValidationError):
            Guards(metric_scale=float("inf"))

    def test_fd_steps_must_be_positive(self):
        with pytest.raises(ValidationError):
            Guards(fd_steps=())
        with pytest.raises(ValidationError):
            Guards(fd_steps=(1e-3, 0.0))

    def test_tau_spec(self):
        assert tau_spec(4.0) == pytest.approx(4e-12)
        assert tau_spec(0.0) == 1e-15
        assert tau_spec(1.0, Guards(tau_kappa=1e-10)) == pytest.approx(1e-10)


class TestErrors:
    def test_hierarchy(self):
        assert issubclass(QigError, ValueError)
        assert issubclass(GapGuardError, QigError)

    def test_guard_cause(self):
        assert guard_cause(BrioschiSingularityError("x")) == "brioschi"
        assert guard_cause(GapGuardError("x")) == "gap"
        assert guard_cause(RankError("x")) == "gap"
