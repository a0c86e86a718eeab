from pydantic import BaseModel, Field

from qig_kit.geometry.curvature import CurvatureReport
from qig_kit.geometry.hea import HEA1, CircuitSpec

THETA_STAR = (1.755, 1.720, 5.417, 4.126)
THETA_SINGULAR = (0.7853981633974483, 0.0, 0.7853981633974483, 0.0)


class PointRequest(BaseModel):
    theta: list[float] = Field(default_factory=lambda: list(THETA_STAR))
    metric: str = "sld"
    metric_scale: float | None = Field(None, gt=0)
    circuit: CircuitSpec = HEA1
    h: float | None = Field(None, gt=0)


class PointReport(BaseModel):
    theta: list[float]
    metric: str
    rho_A: list[list[float]] = Field(description="real parts of the physical reduced state")
    rho_A_imag: list[list[float]]
    eigenvalues: list[float]
    x: float
    z: tuple[float, float]
    delta: float
    concurrence: float
    entropy_bits: float
    entropy_nats: float
    purity_A: float
    purity_B: float
    F: list[list[float]] | None = None
    spectrum: list[float] | None = None
    rank: int = 0
    gap: float | None = None
    tau_spec: float | None = None
    curvature: CurvatureReport | None = None
    kskd: float | None = None
    kskd_sign_differs: bool | None = None
    regular: bool = False
    boundary: bool = False


class CalibrationRequest(BaseModel):
    theta: list[float] = Field(default_factory=lambda: list(THETA_STAR))
    target_R: float = -0.69
    tolerance: float = Field(0.05, gt=0)
    scales: list[float] = [1.0, 0.25]
    metric: str = "sld"
    strict: bool = False


class CalibrationResult(BaseModel):
    target_R: float
    tolerance: float
    R_by_scale: dict[str, float | None]
    matches: list[float]
    chosen: float | None
    configured_scale: float
    message: str
