import logging
from pathlib import Path

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from qig_kit.core.config import Guards, settings
from qig_kit.core.errors import QigError, guard_cause
from qig_kit.geometry.curvature import SliceChart, brioschi_K, slice_first_form
from qig_kit.geometry.hea import HEA1, concurrence_entropy, reduce, statevector_oracle
from qig_kit.geometry.metric_source import MetricSource
from qig_kit.geometry.support import support_of
from qig_kit.models.scan_models import SCAN_COLUMNS, PairCounts, ScanConfig, ScanRow, ScanSummary

logger = logging.getLogger(__name__)

STAT_COLUMNS = ["K", "S", "r", "C"]
MEAN_COLUMNS = ["lambda_max", "S", "K", "r", "C"]


def scan_guards(cfg: ScanConfig) -> Guards:
    """Settings-derived guards with the scan's own thresholds on top."""
    return Guards.from_settings(settings).model_copy(
        update={
            "tau_kappa": cfg.tau_kappa,
            "gap_min": cfg.gap_min,
            "brioschi_eta": cfg.brioschi_min,
            "metric_scale": cfg.metric_scale,
            "fd_step": cfg.h,
        }
    )


def scan_centers(cfg: ScanConfig) -> np.ndarray:
    """
    Explicit centers, or n_centers draws from U[0, pi)^4 seeded by cfg.seed.
    """
    if cfg.centers is not None:
        return np.array([HEA1.check(c) for c in cfg.centers])
    rng = np.random.default_rng(cfg.seed)
    return rng.uniform(0.0, np.pi, size=(cfg.n_centers, HEA1.n_params))


def _evaluate(task) -> tuple[str, ScanRow | None]:
    cfg, guards, source, center_index, chart, pair, u, v = task
    try:
        form = slice_first_form(chart, source, guards)
        K = brioschi_K(form, u, v, cfg.h, guards.brioschi_eta)
        theta = chart.point(u, v)
        F = source.tensor(theta)
        state = reduce(statevector_oracle(HEA1, theta))
    except QigError as exc:
        logger.debug("pair %s at (%.4f, %.4f) rejected: %s", pair, u, v, exc)
        return guard_cause(exc), None
    C, S = concurrence_entropy(state)
    row = ScanRow(
        pair=pair,
        t0=theta[0],
        t1=theta[1],
        t2=theta[2],
        t3=theta[3],
        lambda_max=support_of(F, guards).lambda_max,
        S=S,
        K=K,
        r=state.radius,
        C=C,
        center=center_index,
        u=u,
        v=v,
        h=cfg.h,
        metric_scale=cfg.metric_scale,
    )
    return "valid", row


def _tasks(cfg: ScanConfig, guards: Guards, source: MetricSource):
    axis = np.linspace(-cfg.half_width, cfg.half_width, cfg.grid)
    for c, center in enumerate(scan_centers(cfg)):
        for i, j in cfg.pairs:
            chart = SliceChart.coordinate_pair(center, i, j)
            for u in axis:
                for v in axis:
                    yield cfg, guards, source, c, chart, f"({i},{j})", float(u), float(v)


def _pearson(frame: pd.DataFrame) -> dict[str, dict[str, float | None]]:
    if len(frame) < 2:
        return {a: {b: None for b in STAT_COLUMNS} for a in STAT_COLUMNS}
    corr = frame[STAT_COLUMNS].corr(method="pearson")
    return {a: {b: (None if pd.isna(corr.loc[a, b]) else float(corr.loc[a, b])) for b in STAT_COLUMNS} for a in STAT_COLUMNS}


def slice_scan(cfg: ScanConfig) -> tuple[pd.DataFrame, ScanSummary]:
    """
    Brioschi K over grid x grid points of every (center, pair) slice.
    Rows come back in task order whatever the worker count, so outputs are schedule-independent.
    """
    guards = scan_guards(cfg)
    source = MetricSource.named(cfg.metric, guards=guards)
    tasks = list(_tasks(cfg, guards, source))
    logger.info("slice scan: %d points over %d pairs", len(tasks), len(cfg.pairs))

    results = Parallel(n_jobs=cfg.max_workers, prefer="threads")(delayed(_evaluate)(task) for task in tasks)

    counts = {f"({i},{j})": PairCounts(pair=f"({i},{j})") for i, j in cfg.pairs}
    rows = []
    for task, (outcome, row) in zip(tasks, results):
        c = counts[task[5]]
        c.attempted += 1
        if outcome == "valid":
            c.valid += 1
            rows.append(row.model_dump())
        elif outcome == "brioschi":
            c.brioschi_rejected += 1
        else:
            c.gap_rejected += 1

    frame = pd.DataFrame(rows, columns=SCAN_COLUMNS + ["center", "u", "v", "h", "metric_scale"])
    means = {col: (float(frame[col].mean()) if len(frame) else None) for col in MEAN_COLUMNS}
    summary = ScanSummary(
        counts=list(counts.values()),
        attempted=sum(c.attempted for c in counts.values()),
        valid=sum(c.valid for c in counts.values()),
        gap_rejected=sum(c.gap_rejected for c in counts.values()),
        brioschi_rejected=sum(c.brioschi_rejected for c in counts.values()),
        means=means,
        correlations=_pearson(frame),
        K_positive=int((frame["K"] > 0).sum()) if len(frame) else 0,
        K_negative=int((frame["K"] < 0).sum()) if len(frame) else 0,
    )
    logger.info(
        "slice scan: %d valid, %d gap-rejected, %d Brioschi-rejected",
        summary.valid, summary.gap_rejected, summary.brioschi_rejected,
    )
    return frame, summary


def write_plot_data(frame: pd.DataFrame, out_dir) -> list[Path]:
    """
    One whitespace-separated `u v K` file per (center, pair), blank line between u rows.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for (center, pair), group in frame.groupby(["center", "pair"], sort=True):
        label = pair.strip("()").replace(",", "")
        path = out_dir / f"K_c{center}_p{label}.dat"
        with open(path, "w") as fh:
            fh.write(f"# center {center} pair {pair}: u v K\n")
            for _, block in group.sort_values(["u", "v"]).groupby("u", sort=True):
                for u, v, K in block[["u", "v", "K"]].itertuples(index=False):
                    fh.write(f"{u:.8f} {v:.8f} {K:.10e}\n")
                fh.write("\n")
        written.append(path)
    return written
