from fastapi import APIRouter, HTTPException

from qig_kit.models.scan_models import NoiseSweepRequest, ScanConfig, SuiteRequest
from qig_kit.services import scan_service, suite_service
from qig_kit.services.tables import records

router = APIRouter()


@router.post("/slice")
def slice_scan(cfg: ScanConfig, include_rows: bool = False):
    """
    Runs a guarded slice scan; rows are only returned on request.
    """
    try:
        frame, summary = scan_service.slice_scan(cfg)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"summary": summary.model_dump(), "rows": records(frame) if include_rows else []}


@router.post("/counterexamples")
def counterexamples(req: SuiteRequest):
    try:
        frame, verdict = suite_service.counterexample_suite(req.seed, req.n_random, req.metric)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"verdict": verdict, "rows": records(frame)}


@router.post("/noise")
def noise(req: NoiseSweepRequest):
    try:
        frame = suite_service.noise_sweep(req.theta, req.levels, req.metric, h=req.h)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"rows": records(frame)}


@router.post("/ablations")
def ablations(req: SuiteRequest):
    try:
        frame = suite_service.ablation_suite(
            req.theta, req.seed, req.n_samples, req.sigma, req.resamples, req.level, req.metric
        )
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"rows": records(frame)}
