"""Petz monotone metrics on a qubit.

A metric is selected by an operator-monotone ``f`` with ``f(1) = 1`` and
``f(t) = t f(1/t)``.  Its Morozova-Chentsov kernel ``c_f(a, b) = 1 / (b f(a/b))``
weights the matrix elements of a tangent in the eigenbasis of rho.  For a qubit
with Bloch radius r the metric is

    F = A_f(r) dr.dr + B_f(r) (r.dr)^2

and on two-qubit pure states it splits into population, coherence and
concurrence channels.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from qig_kit.core.errors import BoundaryError, DomainError, RankError
from qig_kit.geometry.linops import FloatArray, as_hermitian2, eigh_hermitian2, scalar_derivative, symmetrize

SERIES_WINDOW = 1e-6
SMALL_RADIUS = 1e-4
SYMMETRY_TOL = 1e-8
SYMMETRY_GRID = np.logspace(-3, 3, 61)


class MetricName(str, Enum):
    SLD = "sld"
    WY = "wy"
    BKM = "bkm"
    CUSTOM = "custom"


def _f_sld(t: float) -> float:
    return 0.5 * (1.0 + t)


def _f_wy(t: float) -> float:
    return 0.25 * (1.0 + np.sqrt(t)) ** 2


def _f_bkm(t: float) -> float:
    s = t - 1.0
    if abs(s) < SERIES_WINDOW:
        return 1.0 + s / 2.0 - s * s / 12.0 + s**3 / 24.0
    return s / np.log(t)


@dataclass(frozen=True)
class OperatorMonotoneSpec:
    name: str
    f: Callable[[float], float] = field(repr=False)
    # f''(1); fixes the r -> 0 limit of B_f
    curvature_at_one: float = 0.0

    def __call__(self, t: float) -> float:
        return float(self.f(t))

    @classmethod
    def custom(cls, name: str, f: Callable[[float], float]) -> "OperatorMonotoneSpec":
        """Wrap a user-supplied f after checking normalization and the t f(1/t) symmetry."""
        if abs(f(1.0) - 1.0) > SYMMETRY_TOL:
            raise DomainError(f"{name}: f(1) must equal 1")
        violation = symmetry_violation(f)
        if violation > SYMMETRY_TOL:
            raise DomainError(f"{name}: symmetry f(t) = t f(1/t) violated by {violation:.3e}")
        f2 = scalar_derivative(f, 1.0, 1e-4, order=2)
        return cls(name=name, f=f, curvature_at_one=f2)


SLD = OperatorMonotoneSpec(MetricName.SLD.value, _f_sld, 0.0)
WIGNER_YANASE = OperatorMonotoneSpec(MetricName.WY.value, _f_wy, -1.0 / 8.0)
BKM = OperatorMonotoneSpec(MetricName.BKM.value, _f_bkm, -1.0 / 6.0)

_REGISTRY = {spec.name: spec for spec in (SLD, WIGNER_YANASE, BKM)}


def get_spec(name: "str | MetricName | OperatorMonotoneSpec") -> OperatorMonotoneSpec:
    if isinstance(name, OperatorMonotoneSpec):
        return name
    key = name.value if isinstance(name, MetricName) else str(name).lower()
    try:
        return _REGISTRY[key]
    except KeyError:
        raise DomainError(f"unknown metric '{name}', expected one of {sorted(_REGISTRY)}") from None


def symmetry_violation(f: Callable[[float], float], grid: Sequence[float] = SYMMETRY_GRID) -> float:
    """Largest relative violation of f(t) = t f(1/t) on a log-spaced grid."""
    worst = 0.0
    for t in grid:
        lhs, rhs = f(t), t * f(1.0 / t)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), 1.0))
    return worst


def mc_kernel(spec: OperatorMonotoneSpec, a: float, b: float) -> float:
    if a <= 0 or b <= 0:
        raise DomainError(f"kernel arguments must be positive, got ({a}, {b})")
    t = a / b
    if abs(t - 1.0) < SERIES_WINDOW:
        # c_f(a, b) around a = b, expanded in s = t - 1 with f(1) = 1, f'(1) = 1/2
        s = t - 1.0
        return (1.0 - s / 2.0 + (0.25 - 0.5 * spec.curvature_at_one) * s * s) / b
    return 1.0 / (b * spec(t))


@dataclass(frozen=True)
class BlochCoefficients:
    A_f: float
    B_f: float
    r: float

    @property
    def B_tilde(self) -> float:
        """Concurrence-channel weight B_f (1 - r^2)."""
        return self.B_f * (1.0 - self.r * self.r)


def bloch_coeffs(spec: OperatorMonotoneSpec, r: float) -> BlochCoefficients:
    if not 0.0 < r < 1.0:
        raise DomainError(f"Bloch radius must lie in (0, 1), got {r}")
    lp, lm = 0.5 * (1.0 + r), 0.5 * (1.0 - r)
    A = 0.5 * mc_kernel(spec, lp, lm)
    if r < SMALL_RADIUS:
        B = 1.0 + 2.0 * spec.curvature_at_one
    else:
        # 1/(1-r^2) is the radial weight fixed by c_f(l, l) = 1/l
        B = (1.0 / (1.0 - r * r) - A) / (r * r)
    return BlochCoefficients(A_f=A, B_f=B, r=r)


def qfim_bloch(spec: OperatorMonotoneSpec, r_vec, dr_list) -> FloatArray:
    r_vec = np.asarray(r_vec, dtype=np.float64)
    D = np.atleast_2d(np.asarray(dr_list, dtype=np.float64))
    r = float(np.linalg.norm(r_vec))
    if r >= 1.0:
        raise BoundaryError("pure-reduction stratum: |r| >= 1")
    if r == 0.0:
        # radial term drops out and A_f(0+) = c_f(1/2, 1/2) / 2 = 1
        return symmetrize(D @ D.T)
    co = bloch_coeffs(spec, r)
    radial = D @ r_vec
    return symmetrize(co.A_f * (D @ D.T) + co.B_f * np.outer(radial, radial))


def qfim_eigenbasis_oracle(spec: OperatorMonotoneSpec, rho, drho_list) -> FloatArray:
    rho = as_hermitian2(rho)
    lam, V = eigh_hermitian2(rho)
    if lam[-1] <= 1e-14:
        raise RankError("oracle requires full rank")
    K = np.array([[mc_kernel(spec, la, lb) for lb in lam] for la in lam])
    X = np.array([V.conj().T @ np.asarray(d, dtype=np.complex128) @ V for d in drho_list])
    F = np.einsum("ab,iab,jab->ij", K, X, X.conj()).real
    return symmetrize(F)


@dataclass(frozen=True)
class SliceDerivatives:
    x_u: float
    x_v: float
    z_u: complex
    z_v: complex
    C_u: float
    C_v: float

    def on_shell_residual(self, x: float, z: complex) -> float:
        """Residual of C C_mu = 2(1-2x) x_mu - 4 Re(conj(z) z_mu), worst of u and v."""
        C = concurrence_of(x, z)
        res = [
            C * c_mu - (2.0 * (1.0 - 2.0 * x) * x_mu - 4.0 * (np.conj(z) * z_mu).real)
            for x_mu, z_mu, c_mu in ((self.x_u, self.z_u, self.C_u), (self.x_v, self.z_v, self.C_v))
        ]
        return float(max(abs(v) for v in res))


def concurrence_of(x: float, z: complex) -> float:
    delta = x * (1.0 - x) - abs(z) ** 2
    return 2.0 * np.sqrt(max(delta, 0.0))


CHANNELS = ("population", "coherence", "concurrence")


def channel_tensor(spec: OperatorMonotoneSpec, x: float, z: complex, dx, dz, dC, channels=CHANNELS) -> FloatArray:
    """Three-channel Petz tensor over any number of tangent directions.

    ``channels`` selects which of population / coherence / concurrence terms
    enter; dropping "coherence" gives the partial-Fisher tensor.
    """
    unknown = set(channels) - set(CHANNELS)
    if unknown:
        raise DomainError(f"unknown channels {sorted(unknown)}")
    delta = x * (1.0 - x) - abs(z) ** 2
    if delta <= 0:
        raise BoundaryError("pure-reduction stratum: det rho_A <= 0")
    C = 2.0 * np.sqrt(delta)
    r = np.sqrt(max(1.0 - C * C, 0.0))
    if r > 0.0:
        co = bloch_coeffs(spec, r)
        A, B_tilde = co.A_f, co.B_tilde
    else:
        A, B_tilde = 1.0, 1.0 + 2.0 * spec.curvature_at_one

    dx = np.atleast_1d(np.asarray(dx, dtype=np.float64))
    dz = np.atleast_1d(np.asarray(dz, dtype=np.complex128))
    dC = np.atleast_1d(np.asarray(dC, dtype=np.float64))
    m = len(dx)
    F = np.zeros((m, m))
    if "population" in channels:
        F += 4.0 * A * np.outer(dx, dx)
    if "coherence" in channels:
        F += 4.0 * A * np.outer(dz, dz.conj()).real
    if "concurrence" in channels:
        F += B_tilde * np.outer(dC, dC)
    return symmetrize(F)


def three_channel(spec: OperatorMonotoneSpec, x: float, z: complex, d: SliceDerivatives) -> FloatArray:
    return channel_tensor(spec, x, z, [d.x_u, d.x_v], [d.z_u, d.z_v], [d.C_u, d.C_v])
