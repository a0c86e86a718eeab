from pydantic import BaseModel, ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "qig-kit"
    API_V1_STR: str = "/api/v1"
    CORS_ORIGINS: list[str] = ["*"]

    SEED: int = 42
    METRIC: str = "sld"
    METRIC_SCALE: float = 1.0

    # spectral split: tau_spec = max(KAPPA * lambda_max, FLOOR)
    TAU_SPEC_KAPPA: float = 1e-12
    TAU_SPEC_FLOOR: float = 1e-15
    GAP_MIN: float = 1e-8
    BRIOSCHI_ETA: float = 1e-10
    SCAN_DET_MIN: float = 1e-12
    SLD_DELTA_MIN: float = 1e-14

    FD_STEP: float = 1e-3
    FD_STEPS: list[float] = [1e-2, 1e-3, 1e-4, 1e-5]
    FD_NOISE_CAP: float = 1e-2

    SCAN_GRID: int = 100
    BOOTSTRAP_RESAMPLES: int = 1000
    BOOTSTRAP_LEVEL: float = 0.95
    MAX_WORKERS: int = 1

    LOG_LEVEL: str = "INFO"
    OUTPUT_DIR: str = "results"

    model_config = SettingsConfigDict(env_file=".env", env_prefix="QIG_", extra="ignore")


settings = Settings()


class Guards(BaseModel):
    """Numerical thresholds used by one computation."""

    model_config = ConfigDict(frozen=True)

    tau_kappa: float = Field(1e-12, ge=1e-14, le=1e-10)
    tau_floor: float = Field(1e-15, gt=0)
    gap_min: float = Field(1e-8, gt=0)
    brioschi_eta: float = Field(1e-10, gt=0)
    sld_delta_min: float = Field(1e-14, ge=0)
    metric_scale: float = Field(1.0, gt=0)
    fd_step: float = Field(1e-3, gt=0)
    fd_steps: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5)
    fd_noise_cap: float = Field(1e-2, gt=0)

    @field_validator("metric_scale")
    @classmethod
    def _finite_scale(cls, v: float) -> float:
        if v != v or v == float("inf"):
            raise ValueError("metric_scale must be finite")
        return v

    @field_validator("fd_steps")
    @classmethod
    def _positive_steps(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not v or min(v) <= 0:
            raise ValueError("fd_steps must be a nonempty set of positive steps")
        return v

    @classmethod
    def from_settings(cls, s: Settings | None = None) -> "Guards":
        s = s or settings
        return cls(
            tau_kappa=s.TAU_SPEC_KAPPA,
            tau_floor=s.TAU_SPEC_FLOOR,
            gap_min=s.GAP_MIN,
            brioschi_eta=s.BRIOSCHI_ETA,
            sld_delta_min=s.SLD_DELTA_MIN,
            metric_scale=s.METRIC_SCALE,
            fd_step=s.FD_STEP,
            fd_steps=tuple(s.FD_STEPS),
            fd_noise_cap=s.FD_NOISE_CAP,
        )


def tau_spec(lambda_max: float, guards: Guards | None = None) -> float:
    guards = guards or Guards()
    return max(guards.tau_kappa * max(lambda_max, 0.0), guards.tau_floor)
