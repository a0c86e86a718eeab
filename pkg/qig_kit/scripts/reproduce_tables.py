"""Writes every table (point report, counterexamples, noise, ablations, scan, VQE) to OUTPUT_DIR.

    python -m qig_kit.scripts.reproduce_tables [--quick]
"""
import argparse
import json
from pathlib import Path

from qig_kit.core.config import settings
from qig_kit.core.logging import configure_logging
from qig_kit.models.geometry_models import THETA_STAR
from qig_kit.models.scan_models import NoiseSweepRequest, ScanConfig
from qig_kit.models.vqe_models import RunConfig
from qig_kit.services import report_service, scan_service, suite_service, vqe_service
from qig_kit.services.tables import write_table


def reproduce(out_dir: Path, quick: bool = False):
    out_dir.mkdir(parents=True, exist_ok=True)

    print("Point report at theta*...")
    report = report_service.point_report(THETA_STAR)
    (out_dir / "point_theta_star.json").write_text(json.dumps(report.model_dump(), indent=2))

    print("Metric-scale calibration...")
    calibration = report_service.calibrate_metric_scale()
    (out_dir / "calibration.json").write_text(calibration.model_dump_json(indent=2))

    print("Counterexample suite...")
    frame, verdict = suite_service.counterexample_suite(settings.SEED)
    write_table(frame, out_dir / "counterexamples.csv")
    (out_dir / "counterexamples_verdict.json").write_text(json.dumps(verdict, indent=2))

    print("Noise sweep...")
    write_table(suite_service.noise_sweep(THETA_STAR, NoiseSweepRequest().levels), out_dir / "noise.csv")

    print("Ablations...")
    n_samples = 8 if quick else 32
    write_table(suite_service.ablation_suite(THETA_STAR, settings.SEED, n_samples), out_dir / "ablations.csv")

    print("Slice scan...")
    cfg = ScanConfig(grid=11 if quick else settings.SCAN_GRID, n_centers=1 if quick else 4, max_workers=settings.MAX_WORKERS)
    frame, summary = scan_service.slice_scan(cfg)
    write_table(frame, out_dir / "scan.csv")
    (out_dir / "scan_summary.json").write_text(summary.model_dump_json(indent=2))
    scan_service.write_plot_data(frame, out_dir / "plot_data")

    print("VQE comparisons...")
    for name, iters in (("toy", 400), ("h2", 800)):
        frame, traces = vqe_service.compare_optimizers(
            RunConfig(hamiltonian=name, max_iters=100 if quick else iters)
        )
        write_table(frame, out_dir / f"vqe_{name}.csv")
        for method, trace in traces.items():
            trace.to_csv(out_dir / f"vqe_{name}_{method}_trace.csv")

    print(f"Done. Tables in {out_dir}")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default=settings.OUTPUT_DIR)
    parser.add_argument("--quick", action="store_true", help="small grids and short runs")
    args = parser.parse_args()
    configure_logging()
    reproduce(Path(args.out), args.quick)
