"""Closed-form symmetric logarithmic derivative for a qubit.

Inputs live in the frame rho = [[x, z], [conj(z), 1 - x]]; the physical
reduction differs by a constant sigma_z conjugation, which leaves the QFIM unchanged.
Writing L = [[p, w], [conj(w), q]], the Lyapunov equation d rho = (rho L + L rho)/2 gives
w = 2 dz - z (p + q) and the 2x2 system

    [[x - alpha, -alpha], [-alpha, 1 - x - alpha]] [p, q] = [dx - beta, -dx - beta]

with alpha = |z|^2, beta = 2 Re(dz conj(z)) and determinant Delta = x(1 - x) - alpha.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from qig_kit.core.errors import BoundaryError
from qig_kit.geometry.hea import BlochJet
from qig_kit.geometry.linops import ComplexArray, FloatArray, symmetrize

PIVOT_TOL = 1e-15


@dataclass(frozen=True)
class SldInputs:
    x: float
    z: complex
    dx: float
    dz: complex

    @property
    def alpha(self) -> float:
        return abs(self.z) ** 2

    @property
    def beta(self) -> float:
        return 2.0 * (self.dz * np.conj(self.z)).real

    @property
    def delta(self) -> float:
        return self.x * (1.0 - self.x) - self.alpha

    def rho(self) -> ComplexArray:
        return np.array([[self.x, self.z], [np.conj(self.z), 1.0 - self.x]], dtype=np.complex128)

    def drho(self) -> ComplexArray:
        return np.array([[self.dx, self.dz], [np.conj(self.dz), -self.dx]], dtype=np.complex128)


@dataclass(frozen=True)
class SldOperator:
    x_i: float
    y_i: float
    a_i: float
    b_i: float

    @property
    def trace(self) -> float:
        return self.x_i + self.y_i

    def matrix(self) -> ComplexArray:
        w = complex(self.a_i, self.b_i)
        return np.array([[self.x_i, w], [np.conj(w), self.y_i]], dtype=np.complex128)


def sld_closed_form(inputs: SldInputs, tau: float = 1e-14) -> SldOperator:
    delta = inputs.delta
    if delta < tau:
        raise BoundaryError("boundary stratum: use support-projected pseudoinverse")
    alpha, beta, x = inputs.alpha, inputs.beta, inputs.x
    system = np.array([[x - alpha, -alpha], [-alpha, 1.0 - x - alpha]])
    rhs = np.array([inputs.dx - beta, -inputs.dx - beta])
    try:
        factor = cho_factor(system, lower=True)
    except LinAlgError as exc:
        raise BoundaryError("boundary stratum: use support-projected pseudoinverse") from exc
    if np.min(np.abs(np.diag(factor[0]))) < PIVOT_TOL:
        raise BoundaryError("boundary stratum: use support-projected pseudoinverse")
    p, q = cho_solve(factor, rhs)
    w = 2.0 * inputs.dz - inputs.z * (p + q)
    return SldOperator(x_i=float(p), y_i=float(q), a_i=float(w.real), b_i=float(w.imag))


def lyapunov_residual(inputs: SldInputs, op: SldOperator) -> float:
    rho, L = inputs.rho(), op.matrix()
    return float(np.linalg.norm(inputs.drho() - 0.5 * (rho @ L + L @ rho)))


def sld_qfim(rho, L_list) -> FloatArray:
    """F_ij = Tr[rho (L_i L_j + L_j L_i)] / 2."""
    rho = np.asarray(rho, dtype=np.complex128)
    mats = [op.matrix() if isinstance(op, SldOperator) else np.asarray(op) for op in L_list]
    m = len(mats)
    F = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            F[i, j] = F[j, i] = 0.5 * np.trace(rho @ (mats[i] @ mats[j] + mats[j] @ mats[i])).real
    return symmetrize(F)


def sld_inputs_from_jet(jet: BlochJet) -> list[SldInputs]:
    return [SldInputs(jet.x, jet.z, float(dx), complex(dz)) for dx, dz in zip(jet.dx, jet.dz)]


def sld_qfim_from_jet(jet: BlochJet, tau: float = 1e-14) -> FloatArray:
    inputs = sld_inputs_from_jet(jet)
    ops = [sld_closed_form(item, tau) for item in inputs]
    return sld_qfim(inputs[0].rho(), ops)
