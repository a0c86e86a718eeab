"""Euclidean and support-projected Petz natural-gradient VQE on two-qubit circuits."""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid

from qig_kit.core.config import Guards
from qig_kit.core.errors import QigError
from qig_kit.geometry.hea import CircuitSpec, pure_state_qfim, statevector_jacobian, statevector_oracle
from qig_kit.geometry.linops import FloatArray, pinv_on_support, symmetrize
from qig_kit.geometry.metric_source import MetricSource
from qig_kit.geometry.support import SupportSplit, support_of
from qig_kit.vqe.hamiltonians import PauliSumHamiltonian, exact_ground

logger = logging.getLogger(__name__)

SHIFT = np.pi / 4.0


class ArmijoConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    enabled: bool = True
    c1: float = Field(1e-4, gt=0.0, lt=1.0)
    backtrack: float = Field(0.5, gt=0.0, lt=1.0)
    max_backtracks: int = Field(20, ge=0)


class OptimizerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: Literal["euclidean", "natgrad"] = "natgrad"
    step: float = Field(0.1, gt=0.0)
    ridge: float = Field(1e-3, ge=0.0)
    shrinkage: float = Field(0.0, ge=0.0, le=1.0)
    gnorm_cap: float | None = Field(None, gt=0.0)
    tr_radius: float | None = Field(None, gt=0.0)
    armijo: ArmijoConfig = ArmijoConfig()
    partial_fisher: bool = False
    ema_decay: float = Field(0.0, ge=0.0, lt=1.0)
    metric: str = "sld"
    metric_source: Literal["reduced", "pure"] = "reduced"
    null_space_mixing: float = Field(0.0, ge=0.0)
    grow_every: int | None = Field(None, ge=1)
    seed: int = 42


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    energy: float
    error: float
    grad_norm: float
    grad_gnorm: float
    rank: int
    gap: float
    drift: float
    step_norm: float
    accepted: bool
    backtracks: int


@dataclass
class VqeTrace:
    method: str
    E_star: float
    records: list[IterationRecord] = field(default_factory=list)
    params: FloatArray | None = None

    @property
    def energies(self) -> FloatArray:
        return np.array([r.energy for r in self.records])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.__dict__ for r in self.records])

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)


def energy(spec: CircuitSpec, params, H: PauliSumHamiltonian | np.ndarray) -> float:
    Hm = H.dense() if isinstance(H, PauliSumHamiltonian) else np.asarray(H)
    psi = statevector_oracle(spec, params)
    return float(np.real(np.vdot(psi, Hm @ psi)))


def energy_and_gradient(spec: CircuitSpec, params, H) -> tuple[float, FloatArray]:
    """Energy and its gradient by the parameter-shift rule.

    Every gate is exp(-i t G) with G^2 = I, so dE/dt = E(t + pi/4) - E(t - pi/4).
    """
    params = spec.check(params)
    Hm = H.dense() if isinstance(H, PauliSumHamiltonian) else np.asarray(H)
    E = energy(spec, params, Hm)
    grad = np.zeros(spec.n_params)
    for i in range(spec.n_params):
        shifted = params.copy()
        shifted[i] += SHIFT
        up = energy(spec, shifted, Hm)
        shifted[i] -= 2 * SHIFT
        grad[i] = up - energy(spec, shifted, Hm)
    return E, grad


def gradient_fd(spec: CircuitSpec, params, H, h: float = 1e-6) -> FloatArray:
    params = spec.check(params)
    grad = np.zeros(spec.n_params)
    for i in range(spec.n_params):
        e = np.zeros(spec.n_params)
        e[i] = h
        grad[i] = (energy(spec, params + e, H) - energy(spec, params - e, H)) / (2 * h)
    return grad


def gradient_adjoint(spec: CircuitSpec, params, H) -> FloatArray:
    """2 Re <d_i psi|H|psi> from the exact state derivatives."""
    Hm = H.dense() if isinstance(H, PauliSumHamiltonian) else np.asarray(H)
    psi, dpsi = statevector_jacobian(spec, params)
    return 2.0 * np.real(dpsi.conj() @ (Hm @ psi))


def _shrink(split: SupportSplit, s: float) -> SupportSplit:
    if s == 0.0 or split.rank == 0:
        return split
    lam = split.eigen.eigenvalues.copy()
    active = lam[: split.rank]
    lam[: split.rank] = (1.0 - s) * active + s * active.mean()
    return replace(split, eigen=replace(split.eigen, eigenvalues=lam))


def _clip(step: FloatArray, F, cfg: OptimizerConfig) -> FloatArray:
    if cfg.gnorm_cap is not None:
        gnorm = math.sqrt(max(float(step @ F @ step), 0.0))
        if gnorm > cfg.gnorm_cap:
            step = step * (cfg.gnorm_cap / gnorm)
    if cfg.tr_radius is not None:
        norm = float(np.linalg.norm(step))
        if norm > cfg.tr_radius:
            step = step * (cfg.tr_radius / norm)
    return step


def natgrad_step(grad, F_petz, split: SupportSplit, cfg: OptimizerConfig) -> FloatArray:
    """-eta Pi (F + ridge)^+ Pi grad on the active support, then norm caps.

    F = I with no ridge or shrinkage returns the Euclidean step bit for bit.
    """
    grad = np.asarray(grad, dtype=np.float64)
    if split.rank == 0:
        logger.warning("zero active rank; falling back to a Euclidean step")
        return _clip(-cfg.step * grad, np.eye(len(grad)), cfg)
    if cfg.ridge == 0.0 and cfg.shrinkage == 0.0 and np.array_equal(F_petz, np.eye(len(grad))):
        return _clip(-cfg.step * grad, F_petz, cfg)
    shrunk = _shrink(split, cfg.shrinkage)
    P = split.projector
    M = pinv_on_support(F_petz, shrunk.eigen, cfg.ridge)
    step = -cfg.step * (P @ (M @ (P @ grad)))
    if cfg.null_space_mixing:
        step = step - cfg.step * cfg.null_space_mixing * (grad - P @ grad)
    return _clip(step, F_petz, cfg)


def armijo_backtrack(
    energy_fn: Callable[[FloatArray], float], theta: FloatArray, E0: float, grad: FloatArray, step: FloatArray,
    armijo: ArmijoConfig,
) -> tuple[FloatArray, float, int, bool]:
    """Shrink `step` until E(theta + step) <= E0 + c1 grad.step; a failed search returns a zero step."""
    if not armijo.enabled:
        return step, energy_fn(theta + step), 0, True
    for k in range(armijo.max_backtracks + 1):
        slope = float(grad @ step)
        if slope <= 0.0:
            E_new = energy_fn(theta + step)
            if E_new <= E0 + armijo.c1 * slope:
                return step, E_new, k, True
        step = step * armijo.backtrack
    return np.zeros_like(step), E0, armijo.max_backtracks, False


def active_mask(spec: CircuitSpec, iteration: int, grow_every: int | None) -> np.ndarray:
    """Parameters unfrozen at `iteration` under layer-wise growth (all when growth is off)."""
    mask = np.ones(spec.n_params, dtype=bool)
    if grow_every is None:
        return mask
    blocks = min(spec.depth, 1 + iteration // grow_every)
    mask[:] = False
    mask[: 2 * (blocks + 1)] = True
    n_ent = len(spec.entanglers)
    mask[spec.n_rotations : spec.n_rotations + blocks * n_ent] = True
    return mask


@dataclass
class _Preconditioner:
    cfg: OptimizerConfig
    source: MetricSource
    guards: Guards
    ema: FloatArray | None = None

    def __call__(self, spec: CircuitSpec, theta: FloatArray) -> FloatArray:
        if self.cfg.metric_source == "pure":
            # factor 4 matches the SLD normalization of pure states
            F = 4.0 * pure_state_qfim(spec, theta)
        else:
            F = self.source.tensor(theta)
        if self.cfg.ema_decay and self.ema is not None:
            F = (1.0 - self.cfg.ema_decay) * F + self.cfg.ema_decay * self.ema
        self.ema = F
        return symmetrize(F)


def run(
    spec: CircuitSpec,
    H: PauliSumHamiltonian,
    cfg: OptimizerConfig,
    max_iters: int = 400,
    theta0=None,
    guards: Guards | None = None,
) -> VqeTrace:
    guards = guards or Guards()
    E_star, _ = exact_ground(H)
    Hm = H.dense()
    theta = (
        spec.check(theta0).copy()
        if theta0 is not None
        else np.random.default_rng(cfg.seed).uniform(0.0, np.pi, size=spec.n_params)
    )
    channels = ("population", "concurrence") if cfg.partial_fisher else ("population", "coherence", "concurrence")
    source = MetricSource.named(cfg.metric, guards=guards, circuit=spec, channels=channels)
    precond = _Preconditioner(cfg, source, guards)
    energy_fn = lambda t: energy(spec, t, Hm)  # noqa: E731

    trace = VqeTrace(method=cfg.method, E_star=E_star)
    P_prev = None
    E, grad = energy_and_gradient(spec, theta, Hm)
    for k in range(max_iters + 1):
        mask = active_mask(spec, k, cfg.grow_every)
        g = np.where(mask, grad, 0.0)
        rank, gap, drift, gnorm = 0, float("nan"), 0.0, float(np.linalg.norm(g))
        if cfg.method == "natgrad":
            try:
                F = precond(spec, theta)
                F = F * np.outer(mask, mask)
                split = support_of(F, guards)
                step = natgrad_step(g, F, split, cfg)
                rank, gap = split.rank, split.gap
                if P_prev is not None:
                    drift = float(np.linalg.norm(split.projector - P_prev))
                P_prev = split.projector
                M = pinv_on_support(F, split.eigen, cfg.ridge) if rank else np.zeros_like(F)
                gnorm = math.sqrt(max(float(g @ M @ g), 0.0))
            except QigError as exc:
                logger.warning("metric unavailable at iteration %d (%s); Euclidean step", k, exc)
                step = _clip(-cfg.step * g, np.eye(len(g)), cfg)
        else:
            step = _clip(-cfg.step * g, np.eye(len(g)), cfg)

        if k == max_iters:
            trace.records.append(
                IterationRecord(k, E, E - E_star, float(np.linalg.norm(g)), gnorm, rank, gap, drift, 0.0, False, 0)
            )
            break
        step, E_new, backtracks, accepted = armijo_backtrack(energy_fn, theta, E, g, step, cfg.armijo)
        trace.records.append(
            IterationRecord(
                k, E, E - E_star, float(np.linalg.norm(g)), gnorm, rank, gap, drift,
                float(np.linalg.norm(step)), accepted, backtracks,
            )
        )
        if not np.isfinite(E_new):
            logger.warning("energy diverged at iteration %d", k)
            break
        if accepted and np.any(step):
            theta = theta + step
            E, grad = energy_and_gradient(spec, theta, Hm)

    trace.params = theta
    return trace


def metrics(trace: VqeTrace | np.ndarray, E_star: float | None = None) -> tuple[float, int | None]:
    """AUC of max(E_k - E*, 0) over iterations and the first k reaching 95% of the possible descent."""
    if isinstance(trace, VqeTrace):
        energies, E_star = trace.energies, trace.E_star if E_star is None else E_star
    else:
        energies = np.asarray(trace, dtype=np.float64)
    if energies.size == 0 or E_star is None:
        raise ValueError("metrics need a nonempty trace and E*")
    excess = np.maximum(energies - E_star, 0.0)
    auc = float(trapezoid(excess)) if energies.size > 1 else 0.0
    total = energies[0] - E_star
    gained = energies[0] - energies
    hits = np.nonzero(gained >= 0.95 * total - 1e-12 * abs(total))[0]
    return auc, (int(hits[0]) if hits.size else None)
