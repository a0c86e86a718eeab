import logging
import math

import numpy as np

from qig_kit.core.config import Guards, settings, tau_spec
from qig_kit.core.errors import BoundaryError, CalibrationError, QigError
from qig_kit.geometry.curvature import curvature_report, intrinsic_scalar_curvature, kskd
from qig_kit.geometry.hea import (
    HEA1,
    CircuitSpec,
    concurrence_entropy,
    partial_trace,
    reduce,
    statevector_oracle,
)
from qig_kit.geometry.metric_source import MetricSource
from qig_kit.geometry.support import support_of
from qig_kit.models.geometry_models import THETA_STAR, CalibrationResult, PointReport

logger = logging.getLogger(__name__)


def default_guards(**overrides) -> Guards:
    """Guards from the settings, with per-call overrides."""
    return Guards.from_settings(settings).model_copy(update=overrides)


def reduced_states(theta, circuit: CircuitSpec = HEA1):
    """
    Returns (reduced state of A, rho_B) of the circuit output.
    """
    psi = statevector_oracle(circuit, theta)
    rho4 = np.outer(psi, psi.conj())
    return reduce(psi), partial_trace(rho4, keep="B")


def point_report(
    theta,
    metric: str = "sld",
    guards: Guards | None = None,
    circuit: CircuitSpec = HEA1,
    h: float | None = None,
) -> PointReport:
    """
    Full geometry bundle at one parameter point.
    Boundary points (pure reduction) get the state block only and are flagged.
    """
    guards = guards or default_guards()
    theta = circuit.check(theta)
    state, rho_B = reduced_states(theta, circuit)
    rho_A = state.rho()
    C, S = concurrence_entropy(state)

    report = dict(
        theta=theta.tolist(),
        metric=metric,
        rho_A=rho_A.real.tolist(),
        rho_A_imag=rho_A.imag.tolist(),
        eigenvalues=state.eigenvalues().tolist(),
        x=state.x,
        z=(state.z.real, state.z.imag),
        delta=state.delta,
        concurrence=C,
        entropy_bits=S,
        entropy_nats=S * math.log(2.0),
        purity_A=state.purity,
        purity_B=float(np.real(np.trace(rho_B @ rho_B))),
    )
    if C < 1.0:
        report["kskd"] = kskd(C)

    source = MetricSource.named(metric, guards=guards, circuit=circuit)
    try:
        F = source.tensor(theta)
    except BoundaryError as exc:
        logger.info("boundary point %s: %s", np.round(theta, 6).tolist(), exc)
        return PointReport(**report, boundary=True)

    split = support_of(F, guards)
    curvature = curvature_report(theta, source, guards, h=h)
    report.update(
        F=F.tolist(),
        spectrum=split.eigen.eigenvalues.tolist(),
        rank=split.rank,
        gap=split.gap if math.isfinite(split.gap) else None,
        tau_spec=split.tau_used,
        curvature=curvature,
        regular=curvature.regular,
    )
    if curvature.R is not None and report.get("kskd") is not None:
        report["kskd_sign_differs"] = bool(np.sign(curvature.R) != np.sign(report["kskd"]))
    return PointReport(**report)


def calibrate_metric_scale(
    theta=THETA_STAR,
    target_R: float = -0.69,
    tolerance: float = 0.05,
    scales=(1.0, 0.25),
    metric: str = "sld",
    strict: bool = False,
    h: float | None = None,
) -> CalibrationResult:
    """
    Evaluates R(theta) at each candidate metric scale and reports which one hits target_R.
    Never changes the configured scale; strict mode raises when no single scale matches.
    """
    source = MetricSource.named(metric, guards=default_guards())
    R_by_scale: dict[str, float | None] = {}
    matches = []
    for scale in scales:
        try:
            R, _ = intrinsic_scalar_curvature(theta, source, h=h, guards=default_guards(metric_scale=scale))
        except QigError as exc:
            logger.warning("calibration at scale %g failed: %s", scale, exc)
            R_by_scale[f"{scale:g}"] = None
            continue
        R_by_scale[f"{scale:g}"] = R
        if abs(R - target_R) <= tolerance:
            matches.append(scale)

    chosen = matches[0] if len(matches) == 1 else None
    if chosen is None:
        computed = ", ".join(f"R={v:.4f} at scale {k}" for k, v in R_by_scale.items() if v is not None)
        message = f"no unique scale reproduces R={target_R:g}±{tolerance:g} ({computed}); keeping the configured scale"
        if strict:
            raise CalibrationError(message)
        logger.warning(message)
    else:
        message = f"scale {chosen:g} reproduces R={target_R:g}±{tolerance:g}"
        logger.info(message)
    return CalibrationResult(
        target_R=target_R,
        tolerance=tolerance,
        R_by_scale=R_by_scale,
        matches=matches,
        chosen=chosen,
        configured_scale=settings.METRIC_SCALE,
        message=message,
    )
