"""Curvature of the support-projected metric.

Two independent routes are provided:

* slices: a 2D chart (u, v) -> first fundamental form (E, F, G) -> Brioschi K;
* the ambient manifold (Im P, g): a frozen-frame chart theta(w) = theta0 + U_a w,
  finite-difference derivatives of g, Christoffel symbols, Riemann, Ricci and the
  scalar curvature R.

The Gauss correction Xi ties them together: K_ambient = K_slice - Xi.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from qig_kit.core.config import Guards
from qig_kit.core.errors import (
    BrioschiSingularityError,
    DomainError,
    GaugeUndefinedError,
    QigError,
    RankError,
    StepSelectionError,
)
from qig_kit.geometry.linops import FloatArray, symmetrize
from qig_kit.geometry.metric_source import MetricSource
from qig_kit.geometry.support import SupportSplit, check_gap, projected_metric, support_of

logger = logging.getLogger(__name__)

TRANSVERSALITY_MIN = 0.5


# --------------------------------------------------------------------------- slices


@dataclass(frozen=True)
class SliceChart:
    center: FloatArray
    e_u: FloatArray
    e_v: FloatArray

    def __post_init__(self):
        for name in ("center", "e_u", "e_v"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if abs(np.linalg.norm(self.e_u) - 1) > 1e-10 or abs(np.linalg.norm(self.e_v) - 1) > 1e-10:
            raise DomainError("slice directions must be unit vectors")
        if abs(self.e_u @ self.e_v) > 1e-10:
            raise DomainError("slice directions must be orthogonal")

    @classmethod
    def coordinate_pair(cls, center, i: int, j: int) -> "SliceChart":
        """Slice with x = (t_i + t_j)/sqrt2, y = (t_i - t_j)/sqrt2."""
        m = len(center)
        e_u, e_v = np.zeros(m), np.zeros(m)
        e_u[[i, j]] = 1.0 / np.sqrt(2.0)
        e_v[i], e_v[j] = 1.0 / np.sqrt(2.0), -1.0 / np.sqrt(2.0)
        return cls(center=center, e_u=e_u, e_v=e_v)

    @classmethod
    def axes(cls, center, i: int, j: int) -> "SliceChart":
        m = len(center)
        return cls(center=center, e_u=np.eye(m)[i], e_v=np.eye(m)[j])

    def point(self, u: float, v: float) -> FloatArray:
        return self.center + u * self.e_u + v * self.e_v

    def rotated(self, angle: float) -> "SliceChart":
        c, s = np.cos(angle), np.sin(angle)
        return SliceChart(self.center, c * self.e_u + s * self.e_v, -s * self.e_u + c * self.e_v)


@dataclass(frozen=True)
class FirstFundamentalForm:
    """E, F, G of a 2D chart; `metric(u, v)` returns the 2x2 Gram matrix."""

    metric: Callable[[float, float], FloatArray]

    def at(self, u: float = 0.0, v: float = 0.0) -> tuple[float, float, float]:
        g = self.metric(u, v)
        return float(g[0, 0]), float(g[0, 1]), float(g[1, 1])

    def grid(self, us: Sequence[float], vs: Sequence[float]) -> FloatArray:
        return np.array([[self.at(u, v) for v in vs] for u in us])


def slice_first_form(chart: SliceChart, source: MetricSource, guards: Guards | None = None) -> FirstFundamentalForm:
    guards = guards or Guards()
    basis = np.column_stack([chart.e_u, chart.e_v])

    def metric(u: float, v: float) -> FloatArray:
        F = source.tensor(chart.point(u, v))
        split = support_of(F, guards)
        check_gap(split, guards.gap_min)
        return guards.metric_scale * symmetrize(basis.T @ projected_metric(F, split) @ basis)

    return FirstFundamentalForm(metric)


def _form_jet(form: FirstFundamentalForm, u: float, v: float, h: float):
    vals = {}
    for du in (-1, 0, 1):
        for dv in (-1, 0, 1):
            vals[du, dv] = np.array(form.at(u + du * h, v + dv * h))
    c = vals[0, 0]
    d_u = (vals[1, 0] - vals[-1, 0]) / (2 * h)
    d_v = (vals[0, 1] - vals[0, -1]) / (2 * h)
    d_uu = (vals[1, 0] - 2 * c + vals[-1, 0]) / h**2
    d_vv = (vals[0, 1] - 2 * c + vals[0, -1]) / h**2
    d_uv = (vals[1, 1] - vals[1, -1] - vals[-1, 1] + vals[-1, -1]) / (4 * h * h)
    return c, d_u, d_v, d_uu, d_vv, d_uv


def brioschi_guard(E: float, F: float, G: float, eta: float) -> float:
    W = E * G - F * F
    if abs(W) / max(E, G, 1.0) < eta or W <= 0:
        raise BrioschiSingularityError(f"Brioschi singularity: EG - F^2 = {W:.3e}")
    return W


def brioschi_K(
    form: FirstFundamentalForm,
    u: float = 0.0,
    v: float = 0.0,
    h: float = 1e-3,
    eta: float = 1e-10,
    variant: str = "determinant",
) -> float:
    """Gaussian curvature from E, F, G and their centered differences.

    ``variant="orthogonal"`` evaluates the two-term divergence form, which is
    exact only for charts with F = 0.
    """
    (E, F, G), d_u, d_v, d_uu, d_vv, d_uv = _form_jet(form, u, v, h)
    W = brioschi_guard(E, F, G, eta)
    E_u, F_u, G_u = d_u
    E_v, F_v, G_v = d_v
    E_vv, G_uu, F_uv = d_vv[0], d_uu[2], d_uv[1]

    if variant == "orthogonal":
        return _brioschi_divergence(form, u, v, h, W)
    if variant != "determinant":
        raise DomainError(f"unknown Brioschi variant '{variant}'")

    m1 = np.array(
        [
            [-0.5 * E_vv + F_uv - 0.5 * G_uu, 0.5 * E_u, F_u - 0.5 * E_v],
            [F_v - 0.5 * G_u, E, F],
            [0.5 * G_v, F, G],
        ]
    )
    m2 = np.array([[0.0, 0.5 * E_v, 0.5 * G_u], [0.5 * E_v, E, F], [0.5 * G_u, F, G]])
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / W**2)


def _brioschi_divergence(form: FirstFundamentalForm, u: float, v: float, h: float, W: float) -> float:
    def flux(uu: float, vv: float) -> tuple[float, float]:
        (E, F, G), d_u, d_v, *_ = _form_jet(form, uu, vv, h)
        root = np.sqrt(E * G - F * F)
        return (d_u[2] - d_v[1]) / root, (d_v[0] - d_u[1]) / root

    du_term = (flux(u + h, v)[0] - flux(u - h, v)[0]) / (2 * h)
    dv_term = (flux(u, v + h)[1] - flux(u, v - h)[1]) / (2 * h)
    return float(-(du_term + dv_term) / (2.0 * np.sqrt(W)))


# --------------------------------------------------------------------------- ambient chart


@dataclass
class SupportChart:
    """Frozen-frame coordinates w on Im P around theta0: theta(w) = theta0 + U_a(theta0) w."""

    source: MetricSource
    theta0: FloatArray
    guards: Guards = field(default_factory=Guards)
    ridge: float = 0.0
    split0: SupportSplit = field(init=False)

    def __post_init__(self):
        self.theta0 = np.asarray(self.theta0, dtype=np.float64)
        F0 = self.source.tensor(self.theta0)
        self.split0 = support_of(F0, self.guards)
        check_gap(self.split0, self.guards.gap_min)
        if self.split0.rank < 2:
            raise RankError(f"no 2-plane: active rank {self.split0.rank}")

    @property
    def rank(self) -> int:
        return self.split0.rank

    @property
    def frame(self) -> FloatArray:
        return self.split0.U_a

    def theta(self, w) -> FloatArray:
        return self.theta0 + self.frame @ np.asarray(w, dtype=np.float64)

    def metric(self, w) -> FloatArray:
        U = self.frame
        F = self.source.tensor(self.theta(w))
        split = support_of(F, self.guards)
        check_gap(split, self.guards.gap_min)
        P = split.projector
        if np.min(np.linalg.eigvalsh(U.T @ P @ U)) <= TRANSVERSALITY_MIN:
            raise RankError("frozen frame is no longer transversal to Im P")
        g = projected_metric(F, split)
        if self.ridge:
            g = g + self.ridge * self.split0.projector
        return self.guards.metric_scale * symmetrize(U.T @ g @ U)

    def jet(self, h: float) -> tuple[FloatArray, FloatArray, FloatArray]:
        """g, dg[m] and ddg[m, n] at w = 0 by centered differences."""
        r = self.rank
        eye = np.eye(r)
        g0 = self.metric(np.zeros(r))
        plus = [self.metric(h * eye[m]) for m in range(r)]
        minus = [self.metric(-h * eye[m]) for m in range(r)]
        dg = np.array([(plus[m] - minus[m]) / (2 * h) for m in range(r)])
        ddg = np.zeros((r, r, r, r))
        for m in range(r):
            ddg[m, m] = (plus[m] - 2 * g0 + minus[m]) / h**2
            for n in range(m + 1, r):
                pp = self.metric(h * (eye[m] + eye[n]))
                pm = self.metric(h * (eye[m] - eye[n]))
                mp = self.metric(h * (-eye[m] + eye[n]))
                mm = self.metric(-h * (eye[m] + eye[n]))
                ddg[m, n] = ddg[n, m] = (pp - pm - mp + mm) / (4 * h * h)
        return g0, dg, ddg


@dataclass(frozen=True)
class CurvatureTensors:
    g: FloatArray
    ginv: FloatArray
    christoffel: FloatArray
    riemann: FloatArray
    ricci: FloatArray
    scalar: float

    def sectional(self, X, Y) -> float:
        X, Y = np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64)
        lowered = np.einsum("ar,rscd->ascd", self.g, self.riemann)
        num = np.einsum("ascd,a,s,c,d->", lowered, X, Y, X, Y)
        den = (X @ self.g @ X) * (Y @ self.g @ Y) - (X @ self.g @ Y) ** 2
        if den <= 0:
            raise RankError("degenerate plane")
        return float(num / den)


def curvature_from_jet(g, dg, ddg, ginv=None) -> CurvatureTensors:
    """Christoffel, Riemann R^r_{s m n}, Ricci and scalar curvature from g and its derivatives."""
    g = np.asarray(g, dtype=np.float64)
    ginv = np.linalg.inv(g) if ginv is None else ginv
    # T[l, i, j] = d_i g_lj + d_j g_li - d_l g_ij
    T = np.einsum("ilj->lij", dg) + np.einsum("jli->lij", dg) - dg
    gamma = 0.5 * np.einsum("kl,lij->kij", ginv, T)
    dT = np.einsum("milj->mlij", ddg) + np.einsum("mjli->mlij", ddg) - ddg
    dginv = -np.einsum("ka,mab,bl->mkl", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("mkl,lij->mkij", dginv, T) + np.einsum("kl,mlij->mkij", ginv, dT))
    # R^r_{s m n} = d_m G^r_{ns} - d_n G^r_{ms} + G^r_{ml} G^l_{ns} - G^r_{nl} G^l_{ms}
    riemann = (
        np.einsum("mrns->rsmn", dgamma)
        - np.einsum("nrms->rsmn", dgamma)
        + np.einsum("rml,lns->rsmn", gamma, gamma)
        - np.einsum("rnl,lms->rsmn", gamma, gamma)
    )
    ricci = np.einsum("rsrn->sn", riemann)
    scalar = float(np.einsum("sn,sn->", ginv, ricci))
    return CurvatureTensors(g=g, ginv=ginv, christoffel=gamma, riemann=riemann, ricci=ricci, scalar=scalar)


def intrinsic_scalar_curvature(
    theta0, source: MetricSource, h: float | None = None, guards: Guards | None = None, ridge: float = 0.0
) -> tuple[float, int]:
    guards = guards or Guards()
    chart = SupportChart(source, theta0, guards, ridge=ridge)
    tensors = curvature_from_jet(*chart.jet(h or guards.fd_step))
    return tensors.scalar, chart.rank


def sectional_curvature(
    theta0, source: MetricSource, X=None, Y=None, h: float | None = None, guards: Guards | None = None
) -> float:
    """K(X, Y) for chart vectors X, Y on Im P; the two leading active directions by default."""
    guards = guards or Guards()
    chart = SupportChart(source, theta0, guards)
    tensors = curvature_from_jet(*chart.jet(h or guards.fd_step))
    eye = np.eye(chart.rank)
    return tensors.sectional(eye[0] if X is None else X, eye[1] if Y is None else Y)


def unprojected_scalar_curvature(theta0, source: MetricSource, h: float | None = None, guards: Guards | None = None) -> float:
    """Scalar curvature in the full parameter coordinates with a pseudoinverse of the singular F."""
    guards = guards or Guards()
    h = h or guards.fd_step
    theta0 = np.asarray(theta0, dtype=np.float64)
    m = len(theta0)
    eye = np.eye(m)

    def g(t):
        return guards.metric_scale * source.tensor(t)

    g0 = g(theta0)
    plus = [g(theta0 + h * eye[k]) for k in range(m)]
    minus = [g(theta0 - h * eye[k]) for k in range(m)]
    dg = np.array([(plus[k] - minus[k]) / (2 * h) for k in range(m)])
    ddg = np.zeros((m, m, m, m))
    for a in range(m):
        ddg[a, a] = (plus[a] - 2 * g0 + minus[a]) / h**2
        for b in range(a + 1, m):
            pp = g(theta0 + h * (eye[a] + eye[b]))
            pm = g(theta0 + h * (eye[a] - eye[b]))
            mp = g(theta0 + h * (-eye[a] + eye[b]))
            mm = g(theta0 - h * (eye[a] + eye[b]))
            ddg[a, b] = ddg[b, a] = (pp - pm - mp + mm) / (4 * h * h)
    return curvature_from_jet(g0, dg, ddg, ginv=np.linalg.pinv(g0, rcond=1e-15, hermitian=True)).scalar


# --------------------------------------------------------------------------- Gauss equation


@dataclass(frozen=True)
class ChartSlice:
    """Surface w(u, v) = u a + v b + (u^2 Qaa + 2 u v Qab + v^2 Qbb)/2 in a support chart."""

    a: FloatArray
    b: FloatArray
    Qaa: FloatArray
    Qab: FloatArray
    Qbb: FloatArray

    @classmethod
    def plane(cls, a, b) -> "ChartSlice":
        a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
        z = np.zeros_like(a)
        return cls(a, b, z, z, z)

    def point(self, u: float, v: float) -> FloatArray:
        return self.a * u + self.b * v + 0.5 * (u * u * self.Qaa + 2 * u * v * self.Qab + v * v * self.Qbb)

    def tangents(self, u: float, v: float) -> tuple[FloatArray, FloatArray]:
        return self.a + u * self.Qaa + v * self.Qab, self.b + u * self.Qab + v * self.Qbb

    def form(self, chart: SupportChart) -> FirstFundamentalForm:
        def metric(u: float, v: float) -> FloatArray:
            g = chart.metric(self.point(u, v))
            T = np.column_stack(self.tangents(u, v))
            return symmetrize(T.T @ g @ T)

        return FirstFundamentalForm(metric)


def geodesic_slice(tensors: CurvatureTensors, a, b) -> ChartSlice:
    """Second-order normal-coordinate surface spanned by a, b: its second fundamental form vanishes at 0."""
    G = tensors.christoffel
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    return ChartSlice(
        a=a,
        b=b,
        Qaa=-np.einsum("kij,i,j->k", G, a, a),
        Qab=-np.einsum("kij,i,j->k", G, a, b),
        Qbb=-np.einsum("kij,i,j->k", G, b, b),
    )


class GaussReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    K_slice: float
    Xi: float
    K_ambient: float
    K_sectional: float
    rank: int


def gauss_correction_in_chart(
    chart: SupportChart, surface: ChartSlice, h: float | None = None, tensors: CurvatureTensors | None = None
) -> GaussReport:
    guards = chart.guards
    h = h or guards.fd_step
    tensors = tensors or curvature_from_jet(*chart.jet(h))
    g, G = tensors.g, tensors.christoffel
    K_slice = brioschi_K(surface.form(chart), 0.0, 0.0, h, guards.brioschi_eta)

    Xu, Xv = surface.tangents(0.0, 0.0)
    K_sec = tensors.sectional(Xu, Xv)
    if chart.rank == 2:
        Xi = 0.0
    else:
        T = np.column_stack([Xu, Xv])
        gram = T.T @ g @ T
        # g-orthogonal projector onto the normal space of the slice inside Im P
        tangential = T @ np.linalg.solve(gram, T.T @ g)
        normal = np.eye(chart.rank) - tangential

        def second_form(q, x, y):
            return normal @ (q + np.einsum("kij,i,j->k", G, x, y))

        B_uu = second_form(surface.Qaa, Xu, Xu)
        B_uv = second_form(surface.Qab, Xu, Xv)
        B_vv = second_form(surface.Qbb, Xv, Xv)
        Xi = float((B_uu @ g @ B_vv - B_uv @ g @ B_uv) / np.linalg.det(gram))
    return GaussReport(K_slice=K_slice, Xi=Xi, K_ambient=K_slice - Xi, K_sectional=K_sec, rank=chart.rank)


def chart_plane(chart: SupportChart, slice_chart: SliceChart | None = None) -> ChartSlice:
    """Chart plane tangent to a parameter-space slice; the two leading active directions by default."""
    if slice_chart is None:
        eye = np.eye(chart.rank)
        return ChartSlice.plane(eye[0], eye[1])
    a = chart.frame.T @ slice_chart.e_u
    b = chart.frame.T @ slice_chart.e_v
    if abs(np.linalg.det(np.array([[a @ a, a @ b], [a @ b, b @ b]]))) < 1e-12:
        raise RankError("slice plane is degenerate on Im P")
    return ChartSlice.plane(a, b)


def gauss_correction(
    chart: SliceChart | None,
    theta0,
    source: MetricSource,
    guards: Guards | None = None,
    h: float | None = None,
    geodesic: bool = False,
) -> GaussReport:
    guards = guards or Guards()
    support = SupportChart(source, theta0, guards)
    h = h or guards.fd_step
    tensors = curvature_from_jet(*support.jet(h))
    plane = chart_plane(support, chart)
    surface = geodesic_slice(tensors, plane.a, plane.b) if geodesic else plane
    return gauss_correction_in_chart(support, surface, h, tensors)


# --------------------------------------------------------------------------- gauge, KSKD, step selection


def e_orth_gauge(theta0, chart: SliceChart, source: MetricSource) -> SliceChart:
    """Rotate the slice so e_u follows the in-plane gradient of C and C_v = 0 at theta0."""
    grad = source.jet(theta0).dC
    gu, gv = float(grad @ chart.e_u), float(grad @ chart.e_v)
    norm = np.hypot(gu, gv)
    if norm < 1e-12:
        raise GaugeUndefinedError("gauge undefined: C critical in this plane")
    e_u = (gu * chart.e_u + gv * chart.e_v) / norm
    e_v = (-gv * chart.e_u + gu * chart.e_v) / norm
    return SliceChart(center=chart.center, e_u=e_u, e_v=e_v)


def kskd(C: float) -> float:
    if C < 0:
        raise DomainError("concurrence must be nonnegative")
    if C >= 1:
        raise DomainError("KSKD pole at C = 1")
    return 2.0 * (6.0 * C * C - 5.0) / (C * C - 1.0)


@dataclass(frozen=True)
class StepCandidate:
    h: float
    R_h: float | None
    diff_half: float | None
    diff_double: float | None
    accepted: bool


@dataclass(frozen=True)
class AdaptiveStep:
    h_star: float
    R: float
    candidates: tuple[StepCandidate, ...]


def adaptive_h(
    evaluate: Callable[[float], float],
    steps: Sequence[float] | None = None,
    noise_cap: float | None = None,
    guards: Guards | None = None,
) -> AdaptiveStep:
    """Pick h minimizing |R_{h/2} - R_h| among steps passing |R_h - R_{2h}| <= noise_cap.

    The step ladder and noise cap default to `guards.fd_steps` and `guards.fd_noise_cap`.
    """
    guards = guards or Guards()
    steps = guards.fd_steps if steps is None else steps
    noise_cap = guards.fd_noise_cap if noise_cap is None else noise_cap
    cache: dict[float, float | None] = {}

    def R(h: float) -> float | None:
        if h not in cache:
            try:
                value = float(evaluate(h))
                cache[h] = value if np.isfinite(value) else None
            except QigError as exc:
                logger.debug("step %.1e rejected: %s", h, exc)
                cache[h] = None
        return cache[h]

    candidates = []
    for h in steps:
        r_h, r_half, r_double = R(h), R(h / 2), R(2 * h)
        if None in (r_h, r_half, r_double):
            candidates.append(StepCandidate(h, r_h, None, None, False))
            continue
        diff_half, diff_double = abs(r_half - r_h), abs(r_h - r_double)
        candidates.append(StepCandidate(h, r_h, diff_half, diff_double, diff_double <= noise_cap))

    accepted = [c for c in candidates if c.accepted]
    if not accepted:
        raise StepSelectionError("no stable step")
    best = min(c.diff_half for c in accepted)
    h_star = min(c.h for c in accepted if c.diff_half == best)
    return AdaptiveStep(h_star=h_star, R=cache[h_star], candidates=tuple(candidates))


def richardson_slope(evaluate: Callable[[float], float], steps: Sequence[float] = (1e-2, 5e-3, 2.5e-3)) -> float:
    """Log-log slope of |R_h - R_{h/2}| against h."""
    hs, diffs = [], []
    for h in steps:
        d = abs(evaluate(h / 2) - evaluate(h))
        if d > 0:
            hs.append(h)
            diffs.append(d)
    if len(hs) < 2:
        raise StepSelectionError("not enough nonzero differences for a slope")
    return float(np.polyfit(np.log(hs), np.log(diffs), 1)[0])


# --------------------------------------------------------------------------- reports


class CurvatureReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    K_slice: float | None = None
    Xi: float | None = None
    K_ambient: float | None = None
    K_sectional: float | None = None
    R: float | None = None
    rank: int = 0
    gap_ok: bool = False
    brioschi_ok: bool = False
    h_star: float | None = None
    metric: str = "sld"
    metric_scale: float = 1.0
    failure: str | None = None

    @property
    def regular(self) -> bool:
        return self.gap_ok and self.brioschi_ok and self.failure is None


def curvature_report(
    theta0,
    source: MetricSource,
    guards: Guards | None = None,
    h: float | None = None,
    steps: Sequence[float] | None = None,
    noise_cap: float | None = None,
) -> CurvatureReport:
    """R, K_slice, Xi and K_ambient on the leading active plane; h is chosen adaptively unless given."""
    guards = guards or Guards()
    common = dict(metric=source.metric.name, metric_scale=guards.metric_scale)
    try:
        chart = SupportChart(source, theta0, guards)
    except QigError as exc:
        logger.debug("point rejected: %s", exc)
        return CurvatureReport(failure=type(exc).__name__, **common)

    def scalar_at(step: float) -> float:
        return curvature_from_jet(*chart.jet(step)).scalar

    try:
        h_star = h if h is not None else adaptive_h(scalar_at, steps, noise_cap, guards).h_star
        tensors = curvature_from_jet(*chart.jet(h_star))
        gauss = gauss_correction_in_chart(chart, chart_plane(chart), h_star, tensors)
    except BrioschiSingularityError as exc:
        return CurvatureReport(rank=chart.rank, gap_ok=True, failure=type(exc).__name__, **common)
    except QigError as exc:
        return CurvatureReport(rank=chart.rank, failure=type(exc).__name__, **common)
    return CurvatureReport(
        K_slice=gauss.K_slice,
        Xi=gauss.Xi,
        K_ambient=gauss.K_ambient,
        K_sectional=gauss.K_sectional,
        R=tensors.scalar,
        rank=chart.rank,
        gap_ok=True,
        brioschi_ok=True,
        h_star=h_star,
        **common,
    )
