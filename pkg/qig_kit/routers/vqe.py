from fastapi import APIRouter, HTTPException

from qig_kit.models.vqe_models import RunConfig
from qig_kit.services import vqe_service
from qig_kit.services.tables import records
from qig_kit.vqe.hamiltonians import BUILTIN, exact_ground

router = APIRouter()


@router.post("/run")
def run(config: RunConfig, include_trace: bool = False):
    """
    Runs one optimizer and returns its summary (AUC, Hit@95%, final error).
    """
    try:
        trace, summary = vqe_service.run_vqe(config)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"summary": summary.model_dump(), "trace": records(trace.to_frame()) if include_trace else []}


@router.post("/compare")
def compare(config: RunConfig):
    try:
        frame, _ = vqe_service.compare_optimizers(config)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {"rows": records(frame)}


@router.get("/hamiltonians")
def hamiltonians():
    out = []
    for name, build in BUILTIN.items():
        H = build()
        E_star, _ = exact_ground(H)
        out.append({"name": name, "terms": [t.model_dump() for t in H.terms], "E_star": E_star})
    return out
