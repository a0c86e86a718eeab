"""Command-line entry point: `python -m qig_kit <command> ...`."""
import argparse
import json
import sys
from pathlib import Path

from qig_kit.core.config import settings
from qig_kit.core.logging import configure_logging
from qig_kit.geometry.noise import NoiseSpec
from qig_kit.models.geometry_models import THETA_STAR
from qig_kit.models.scan_models import NoiseSweepRequest, ScanConfig
from qig_kit.models.vqe_models import RunConfig
from qig_kit.services import report_service, scan_service, suite_service, vqe_service
from qig_kit.services.tables import write_table


def parse_theta(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated angles, got '{text}'") from None


def parse_levels(text: str) -> list[NoiseSpec]:
    """'depolarizing:0.01,amplitude_damping:0.1:A' -> NoiseSpec list."""
    specs = []
    for item in filter(None, text.split(",")):
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"bad noise level '{item}'")
        fields = {"channel": parts[0], "level": float(parts[1])}
        if len(parts) == 3:
            fields["qubit"] = parts[2]
        specs.append(NoiseSpec(**fields))
    return specs


def _emit_table(frame, out: str | None) -> None:
    if out:
        write_table(frame, out)
        print(f"wrote {out}")
    else:
        frame.to_csv(sys.stdout, index=False, float_format="%.10g")


def _emit_json(payload) -> None:
    print(json.dumps(payload, indent=2, default=str))


def cmd_point(args) -> None:
    overrides = {} if args.scale is None else {"metric_scale": args.scale}
    report = report_service.point_report(
        args.theta, metric=args.metric, guards=report_service.default_guards(**overrides), h=args.h
    )
    _emit_json(report.model_dump())


def cmd_scan(args) -> None:
    cfg = ScanConfig.model_validate_json(Path(args.config).read_text()) if args.config else ScanConfig()
    frame, summary = scan_service.slice_scan(cfg)
    _emit_table(frame, args.out or str(Path(settings.OUTPUT_DIR) / "scan.csv"))
    if args.plot_data:
        scan_service.write_plot_data(frame, args.plot_data)
    _emit_json(summary.model_dump())


def cmd_counterexamples(args) -> None:
    frame, verdict = suite_service.counterexample_suite(args.seed, args.n_random, args.metric)
    _emit_table(frame, args.out)
    _emit_json(verdict)


def cmd_noise(args) -> None:
    levels = args.levels if args.levels is not None else NoiseSweepRequest().levels
    _emit_table(suite_service.noise_sweep(args.theta, levels, args.metric, h=args.h), args.out)


def cmd_ablations(args) -> None:
    frame = suite_service.ablation_suite(
        args.theta, args.seed, args.samples, args.sigma, args.resamples, settings.BOOTSTRAP_LEVEL, args.metric
    )
    _emit_table(frame, args.out)


def cmd_vqe(args) -> None:
    config = RunConfig.model_validate_json(Path(args.config).read_text()) if args.config else RunConfig()
    if args.compare:
        frame, traces = vqe_service.compare_optimizers(config)
        if args.trace:
            for method, trace in traces.items():
                trace.to_csv(Path(args.trace).with_suffix(f".{method}.csv"))
        _emit_table(frame, args.out)
        return
    trace, summary = vqe_service.run_vqe(config)
    if args.trace:
        trace.to_csv(args.trace)
    _emit_json(summary.model_dump())


def cmd_calibrate(args) -> None:
    result = report_service.calibrate_metric_scale(
        args.theta, args.target, args.tolerance, args.scales, args.metric, args.strict
    )
    _emit_json(result.model_dump())


def cmd_serve(args) -> None:
    import uvicorn

    uvicorn.run("qig_kit.main:app", host=args.host, port=args.port, reload=False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qig_kit", description="Petz-metric geometry of two-qubit circuits")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    theta_default = ",".join(str(t) for t in THETA_STAR)

    p = sub.add_parser("point", help="full report at one parameter point")
    p.add_argument("--theta", type=parse_theta, default=parse_theta(theta_default))
    p.add_argument("--metric", choices=["sld", "wy", "bkm"], default=settings.METRIC)
    p.add_argument("--scale", type=float, default=None, help="metric scale override")
    p.add_argument("--h", type=float, default=None, help="fixed FD step (adaptive when omitted)")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("scan", help="guarded slice scan")
    p.add_argument("--config", help="ScanConfig JSON")
    p.add_argument("--out", help="CSV path")
    p.add_argument("--plot-data", dest="plot_data", help="directory for u v K grid files")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("counterexamples", help="entropy-curvature counterexample table")
    p.add_argument("--seed", type=int, default=settings.SEED)
    p.add_argument("--n-random", dest="n_random", type=int, default=4)
    p.add_argument("--metric", choices=["sld", "wy", "bkm"], default=settings.METRIC)
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexamples)

    p = sub.add_parser("noise", help="scalar curvature under noise channels")
    p.add_argument("--theta", type=parse_theta, default=parse_theta(theta_default))
    p.add_argument("--levels", type=parse_levels, default=None, help="channel:level[:qubit],...")
    p.add_argument("--metric", choices=["sld", "wy", "bkm"], default=settings.METRIC)
    p.add_argument("--h", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("ablations", help="A1-A4 ablations with bootstrap CIs")
    p.add_argument("--theta", type=parse_theta, default=parse_theta(theta_default))
    p.add_argument("--seed", type=int, default=settings.SEED)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--sigma", type=float, default=1e-3)
    p.add_argument("--resamples", type=int, default=settings.BOOTSTRAP_RESAMPLES)
    p.add_argument("--metric", choices=["sld", "wy", "bkm"], default=settings.METRIC)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ablations)

    p = sub.add_parser("vqe", help="Euclidean / natural-gradient VQE")
    p.add_argument("--config", help="RunConfig JSON")
    p.add_argument("--compare", action="store_true", help="run both optimizers from the same start")
    p.add_argument("--trace", help="per-iteration CSV path")
    p.add_argument("--out")
    p.set_defaults(func=cmd_vqe)

    p = sub.add_parser("calibrate", help="check which metric scale reproduces a target R")
    p.add_argument("--theta", type=parse_theta, default=parse_theta(theta_default))
    p.add_argument("--target", type=float, default=-0.69)
    p.add_argument("--tolerance", type=float, default=0.05)
    p.add_argument("--scales", type=parse_theta, default=[1.0, 0.25])
    p.add_argument("--metric", choices=["sld", "wy", "bkm"], default=settings.METRIC)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        args.func(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0
