from fastapi import APIRouter, HTTPException

from qig_kit.core.config import settings
from qig_kit.geometry.curvature import kskd
from qig_kit.models.geometry_models import CalibrationRequest, CalibrationResult, PointReport, PointRequest
from qig_kit.services import report_service

router = APIRouter()


@router.post("/point", response_model=PointReport)
def point(req: PointRequest):
    """
    Full report (state, Petz tensor, support split, curvature, KSKD) at one point.
    """
    overrides = {} if req.metric_scale is None else {"metric_scale": req.metric_scale}
    try:
        return report_service.point_report(
            req.theta,
            metric=req.metric,
            guards=report_service.default_guards(**overrides),
            circuit=req.circuit,
            h=req.h,
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/calibrate", response_model=CalibrationResult)
def calibrate(req: CalibrationRequest):
    try:
        return report_service.calibrate_metric_scale(
            req.theta, req.target_R, req.tolerance, req.scales, req.metric, req.strict
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/kskd")
def kskd_value(C: float):
    try:
        return {"C": C, "kskd": kskd(C)}
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.get("/settings")
def current_settings():
    return {"metric": settings.METRIC, "metric_scale": settings.METRIC_SCALE, "seed": settings.SEED}
