import logging
import pandas as pd
from joblib import Parallel, delayed

from qig_kit.core.config import settings
from qig_kit.models.vqe_models import RunConfig, RunSummary
from qig_kit.services.report_service import default_guards
from qig_kit.vqe.natgrad import VqeTrace, metrics, run

logger = logging.getLogger(__name__)


def summarize(trace: VqeTrace, hamiltonian: str) -> RunSummary:
    auc, hit95 = metrics(trace)
    last = trace.records[-1]
    return RunSummary(
        method=trace.method,
        hamiltonian=hamiltonian,
        E_star=trace.E_star,
        final_energy=last.energy,
        final_error=last.error,
        auc=auc,
        hit95=hit95,
        iterations=len(trace.records) - 1,
        accepted=sum(r.accepted for r in trace.records),
        params=trace.params.tolist(),
    )


def run_vqe(config: RunConfig) -> tuple[VqeTrace, RunSummary]:
    """
    Runs one optimizer from the circuit's seeded initial parameters.
    """
    H = config.resolve_hamiltonian()
    theta0 = config.circuit.model_copy(update={"seed": config.seed}).initial_params()
    trace = run(config.circuit, H, config.optimizer_for(), config.max_iters, theta0=theta0, guards=default_guards())
    summary = summarize(trace, H.name)
    logger.info(
        "%s on %s: E=%.10f (E*=%.10f), AUC=%.4f, hit95=%s",
        summary.method, H.name, summary.final_energy, summary.E_star, summary.auc, summary.hit95,
    )
    return trace, summary


def compare_optimizers(config: RunConfig) -> tuple[pd.DataFrame, dict[str, VqeTrace]]:
    """
    Euclidean and natural-gradient runs from the same start, each at its own step size; one summary row per method.
    """
    methods = ("euclidean", "natgrad")
    configs = [config.model_copy(update={"optimizer": config.optimizer_for(m)}) for m in methods]
    results = Parallel(n_jobs=settings.MAX_WORKERS, prefer="threads")(delayed(run_vqe)(c) for c in configs)
    rows = [summary.model_dump(exclude={"params"}) for _, summary in results]
    return pd.DataFrame(rows), {m: trace for m, (trace, _) in zip(methods, results)}
