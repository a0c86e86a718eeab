from itertools import combinations

from pydantic import BaseModel, Field, model_validator

from qig_kit.core.config import settings
from qig_kit.geometry.hea import HEA1
from qig_kit.geometry.noise import NoiseSpec
from qig_kit.models.geometry_models import THETA_STAR

ALL_PAIRS = list(combinations(range(4), 2))


class ScanConfig(BaseModel):
    pairs: list[tuple[int, int]] = Field(default_factory=lambda: list(ALL_PAIRS))
    grid: int = Field(default_factory=lambda: settings.SCAN_GRID, ge=3)
    half_width: float = Field(0.5, ge=0)
    centers: list[list[float]] | None = None
    n_centers: int = Field(1, ge=1)
    gap_min: float = Field(default_factory=lambda: settings.GAP_MIN, gt=0)
    brioschi_min: float = Field(default_factory=lambda: settings.SCAN_DET_MIN, gt=0)
    tau_kappa: float = Field(default_factory=lambda: settings.TAU_SPEC_KAPPA, ge=1e-14, le=1e-10)
    h: float = Field(default_factory=lambda: settings.FD_STEP, gt=0)
    seed: int = Field(default_factory=lambda: settings.SEED)
    metric: str = Field(default_factory=lambda: settings.METRIC)
    metric_scale: float = Field(default_factory=lambda: settings.METRIC_SCALE, gt=0)
    max_workers: int = Field(default_factory=lambda: settings.MAX_WORKERS, ge=1)

    @model_validator(mode="after")
    def _pairs_in_range(self):
        m = HEA1.n_params
        for i, j in self.pairs:
            if i == j or not (0 <= i < m and 0 <= j < m):
                raise ValueError(f"invalid parameter pair ({i}, {j})")
        return self


SCAN_COLUMNS = ["pair", "t0", "t1", "t2", "t3", "lambda_max", "S", "K", "r", "C", "Phi"]


class ScanRow(BaseModel):
    pair: str
    t0: float
    t1: float
    t2: float
    t3: float
    lambda_max: float
    S: float
    K: float
    r: float
    C: float
    Phi: float | None = None
    center: int = 0
    u: float = 0.0
    v: float = 0.0
    h: float = 1e-3
    metric_scale: float = 1.0


class PairCounts(BaseModel):
    pair: str
    attempted: int = 0
    valid: int = 0
    gap_rejected: int = 0
    brioschi_rejected: int = 0


class ScanSummary(BaseModel):
    counts: list[PairCounts]
    attempted: int
    valid: int
    gap_rejected: int
    brioschi_rejected: int
    means: dict[str, float | None]
    correlations: dict[str, dict[str, float | None]]
    K_positive: int = 0
    K_negative: int = 0


class NoiseSweepRequest(BaseModel):
    theta: list[float] = Field(default_factory=lambda: list(THETA_STAR))
    levels: list[NoiseSpec] = Field(
        default_factory=lambda: [
            NoiseSpec(channel="depolarizing", level=0.01),
            NoiseSpec(channel="depolarizing", level=0.05),
            NoiseSpec(channel="amplitude_damping", level=0.02, qubit="B"),
            NoiseSpec(channel="amplitude_damping", level=0.10, qubit="B"),
            NoiseSpec(channel="amplitude_damping", level=0.02, qubit="A"),
            NoiseSpec(channel="amplitude_damping", level=0.10, qubit="A"),
        ]
    )
    metric: str = "sld"
    h: float | None = Field(None, gt=0)


class SuiteRequest(BaseModel):
    theta: list[float] = Field(default_factory=lambda: list(THETA_STAR))
    seed: int = 42
    n_random: int = Field(4, ge=0)
    n_samples: int = Field(16, ge=2)
    sigma: float = Field(1e-3, gt=0)
    resamples: int = Field(1000, ge=10)
    level: float = Field(0.95, gt=0, lt=1)
    metric: str = "sld"
