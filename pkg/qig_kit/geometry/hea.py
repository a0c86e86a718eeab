"""Two-qubit hardware-efficient ansatz.

Depth-1 closed form (phi+- = t1 +- t3):

    A = c0 c2 cos(phi+) - s0 s2 sin(phi-)
    B = c0 c2 sin(phi+) - s0 s2 cos(phi-)
    C = c0 s2 cos(phi+) + s0 c2 sin(phi-)
    D = s0 c2 cos(phi-) + c0 s2 sin(phi+)

which is the state (R_y(2 t2) x R_y(2 t3)) CNOT (R_y(2 t0) x R_y(2 t1)) |00>,
qubit A first, CNOT controlled on A.  This gate order (t0, t1 in the first
layer) is the one that reproduces the closed form above, which is authoritative
where it disagrees with the usual printed U(theta).  The reduction over B is tracked as
x = |psi0|^2 + |psi1|^2 and z = -(psi0 conj(psi2) + psi1 conj(psi3)).
"""
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import entr
from scipy.stats import entropy

from qig_kit.core.errors import NormalizationError, ParameterCountError
from qig_kit.geometry.linops import ComplexArray, FloatArray

Entangler = Literal["zz", "xx"]

I2 = np.eye(2, dtype=np.complex128)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)
ZZ = np.kron(PAULI["Z"], PAULI["Z"])
XX = np.kron(PAULI["X"], PAULI["X"])
KET00 = np.array([1, 0, 0, 0], dtype=np.complex128)


@dataclass(frozen=True)
class HeaParams:
    t0: float
    t1: float
    t2: float
    t3: float

    @classmethod
    def from_sequence(cls, values: Sequence[float]) -> "HeaParams":
        values = [float(v) for v in values]
        if len(values) != 4:
            raise ParameterCountError(f"depth-1 ansatz takes 4 angles, got {len(values)}")
        return cls(*values)

    def as_array(self) -> FloatArray:
        return np.array([self.t0, self.t1, self.t2, self.t3])


@dataclass(frozen=True)
class Amplitudes:
    A: float
    B: float
    C: float
    D: float

    def as_vector(self) -> FloatArray:
        return np.array([self.A, self.B, self.C, self.D])


@dataclass(frozen=True)
class ReducedQubitState:
    x: float
    z: complex

    @property
    def delta(self) -> float:
        return self.x * (1.0 - self.x) - abs(self.z) ** 2

    @property
    def concurrence(self) -> float:
        return float(min(2.0 * np.sqrt(max(self.delta, 0.0)), 1.0))

    @property
    def bloch_vector(self) -> FloatArray:
        return np.array([2.0 * self.z.real, -2.0 * self.z.imag, 2.0 * self.x - 1.0])

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.bloch_vector))

    def rho(self) -> ComplexArray:
        """Physical reduced density matrix; its off-diagonal is -z."""
        return np.array([[self.x, -self.z], [-np.conj(self.z), 1.0 - self.x]], dtype=np.complex128)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.rho() @ self.rho())))

    def eigenvalues(self) -> FloatArray:
        r = min(self.radius, 1.0)
        return np.array([0.5 * (1.0 + r), 0.5 * (1.0 - r)])

    @classmethod
    def from_rho(cls, rho) -> "ReducedQubitState":
        rho = np.asarray(rho, dtype=np.complex128)
        return cls(x=float(rho[0, 0].real), z=complex(-rho[0, 1]))


class CircuitSpec(BaseModel):
    """RY layer, then `depth` blocks of CNOT + optional entanglers, each followed by an RY layer.

    Parameters are the rotation angles layer by layer (qubit A, qubit B) and then
    the entangler angles block by block in the order given by `entanglers`.
    """

    model_config = ConfigDict(frozen=True)

    depth: int = Field(1, ge=1, le=12)
    entanglers: tuple[Entangler, ...] = ()
    seed: int = 42

    @property
    def n_rotations(self) -> int:
        return 2 * (self.depth + 1)

    @property
    def n_params(self) -> int:
        return self.n_rotations + self.depth * len(self.entanglers)

    def check(self, params) -> FloatArray:
        params = np.asarray(params, dtype=np.float64).ravel()
        if params.size != self.n_params:
            raise ParameterCountError(f"circuit expects {self.n_params} parameters, got {params.size}")
        return params

    def initial_params(self, scale: float = np.pi) -> FloatArray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.0, scale, size=self.n_params)


HEA1 = CircuitSpec()


def _trig(kind: str, t: float, order: int) -> float:
    shifted = t + 0.5 * np.pi * order
    return np.cos(shifted) if kind == "c" else np.sin(shifted)


# (coefficient, trig of t0, trig of t2, trig of phi, +1 for phi+ / -1 for phi-)
_TERMS = (
    ((1.0, "c", "c", "c", 1), (-1.0, "s", "s", "s", -1)),
    ((1.0, "c", "c", "s", 1), (-1.0, "s", "s", "c", -1)),
    ((1.0, "c", "s", "c", 1), (1.0, "s", "c", "s", -1)),
    ((1.0, "s", "c", "c", -1), (1.0, "c", "s", "s", 1)),
)


def amplitude_jet(theta, orders: Sequence[int] = (0, 0, 0, 0)) -> FloatArray:
    """Partial derivative of (A, B, C, D) with multi-index `orders` over (t0, t1, t2, t3)."""
    t0, t1, t2, t3 = np.asarray(theta, dtype=np.float64)
    n0, n1, n2, n3 = orders
    out = np.zeros(4)
    for k, terms in enumerate(_TERMS):
        for coef, k0, k2, kp, sign in terms:
            phi = t1 + sign * t3
            out[k] += (
                coef
                * sign**n3
                * _trig(k0, t0, n0)
                * _trig(k2, t2, n2)
                * _trig(kp, phi, n1 + n3)
            )
    return out


def amplitudes(theta) -> Amplitudes:
    if isinstance(theta, HeaParams):
        theta = theta.as_array()
    return Amplitudes(*amplitude_jet(theta))


def _ry(t: float) -> ComplexArray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _dry(t: float) -> ComplexArray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[-s, -c], [c, -s]], dtype=np.complex128)


def _zz(a: float) -> ComplexArray:
    return np.cos(a) * np.eye(4) - 1j * np.sin(a) * ZZ


def _xx(b: float) -> ComplexArray:
    return np.cos(b) * np.eye(4) - 1j * np.sin(b) * XX


@dataclass(frozen=True)
class _Op:
    kind: str
    indices: tuple[int, ...] = ()


def _layout(spec: CircuitSpec) -> list[_Op]:
    ops = [_Op("ry", (0, 1))]
    ent = spec.n_rotations
    for layer in range(1, spec.depth + 1):
        ops.append(_Op("cnot"))
        for name in spec.entanglers:
            ops.append(_Op(name, (ent,)))
            ent += 1
        ops.append(_Op("ry", (2 * layer, 2 * layer + 1)))
    return ops


def _matrix(op: _Op, params: FloatArray, wrt: int | None = None) -> ComplexArray:
    if op.kind == "cnot":
        return CNOT
    if op.kind == "ry":
        ia, ib = op.indices
        ma = _dry(params[ia]) if wrt == ia else _ry(params[ia])
        mb = _dry(params[ib]) if wrt == ib else _ry(params[ib])
        return np.kron(ma, mb)
    (idx,) = op.indices
    gate = _zz(params[idx]) if op.kind == "zz" else _xx(params[idx])
    if wrt == idx:
        gen = ZZ if op.kind == "zz" else XX
        return -1j * gen @ gate
    return gate


def statevector_oracle(spec: CircuitSpec, params) -> ComplexArray:
    params = spec.check(params)
    psi = KET00.copy()
    for op in _layout(spec):
        psi = _matrix(op, params) @ psi
    return psi


def statevector_jacobian(spec: CircuitSpec, params) -> tuple[ComplexArray, ComplexArray]:
    """State and exact parameter derivatives, shape (n_params, 4)."""
    params = spec.check(params)
    ops = _layout(spec)
    psi = statevector_oracle(spec, params)
    dpsi = np.zeros((spec.n_params, 4), dtype=np.complex128)
    for i in range(spec.n_params):
        state = KET00.copy()
        for op in ops:
            state = _matrix(op, params, wrt=i if i in op.indices else None) @ state
        dpsi[i] = state
    return psi, dpsi


def reduce(psi) -> ReducedQubitState:
    psi = np.asarray(psi, dtype=np.complex128).ravel()
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > 1e-10:
        raise NormalizationError(f"state norm {norm:.12f} != 1")
    x = float(abs(psi[0]) ** 2 + abs(psi[1]) ** 2)
    z = complex(-(psi[0] * np.conj(psi[2]) + psi[1] * np.conj(psi[3])))
    return ReducedQubitState(x=x, z=z)


def partial_trace(rho4, keep: Literal["A", "B"] = "A") -> ComplexArray:
    t = np.asarray(rho4, dtype=np.complex128).reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    return np.einsum("abad->bd", t)


def entropy_from_concurrence(C: float) -> float:
    C = min(max(float(C), 0.0), 1.0)
    p = 0.5 * (1.0 + np.sqrt(1.0 - C * C))
    return float((entr(p) + entr(1.0 - p)) / np.log(2.0))


def concurrence_entropy(s: ReducedQubitState) -> tuple[float, float]:
    C = s.concurrence
    return C, entropy_from_concurrence(C)


def von_neumann_entropy(rho, base: float = 2.0) -> float:
    lam = np.clip(np.linalg.eigvalsh(np.asarray(rho, dtype=np.complex128)), 0.0, None)
    return float(entropy(lam, base=base))


@dataclass(frozen=True)
class BlochJet:
    """(x, z) of a reduced qubit with parameter derivatives up to second order."""

    x: float
    z: complex
    dx: FloatArray
    dz: ComplexArray
    ddx: FloatArray | None = None
    ddz: ComplexArray | None = None

    @property
    def state(self) -> ReducedQubitState:
        return ReducedQubitState(self.x, self.z)

    @property
    def concurrence(self) -> float:
        return self.state.concurrence

    @property
    def dC(self) -> FloatArray:
        """C_mu from C C_mu = 2(1 - 2x) x_mu - 4 Re(conj(z) z_mu)."""
        C = self.concurrence
        num = 2.0 * (1.0 - 2.0 * self.x) * self.dx - 4.0 * (np.conj(self.z) * self.dz).real
        return num / C

    def bloch_tangents(self) -> FloatArray:
        """d r_vec / d theta_mu as rows."""
        return np.column_stack([2.0 * self.dz.real, -2.0 * self.dz.imag, 2.0 * self.dx])

    def drho(self) -> ComplexArray:
        return np.array([[[dx, -dz], [-np.conj(dz), -dx]] for dx, dz in zip(self.dx, self.dz)])


def bloch_derivatives(theta, order: int = 1) -> BlochJet:
    """Analytic derivatives of the depth-1 reduction by the chain rule on the closed form."""
    if isinstance(theta, HeaParams):
        theta = theta.as_array()
    theta = np.asarray(theta, dtype=np.float64)
    if theta.size != 4:
        raise ParameterCountError(f"closed form takes 4 angles, got {theta.size}")
    eye = np.eye(4, dtype=int)
    a0 = amplitude_jet(theta)
    d1 = np.array([amplitude_jet(theta, eye[i]) for i in range(4)])

    A, B, C, D = a0
    x = A * A + B * B
    z = -(A * C + B * D)
    dx = 2.0 * (A * d1[:, 0] + B * d1[:, 1])
    dz = -(d1[:, 0] * C + A * d1[:, 2] + d1[:, 1] * D + B * d1[:, 3])
    if order == 1:
        return BlochJet(x=x, z=complex(z), dx=dx, dz=dz.astype(np.complex128))

    d2 = np.array([[amplitude_jet(theta, eye[i] + eye[j]) for j in range(4)] for i in range(4)])
    Ai, Bi, Ci, Di = (d1[:, k] for k in range(4))
    Aij, Bij, Cij, Dij = (d2[:, :, k] for k in range(4))
    ddx = 2.0 * (np.outer(Ai, Ai) + A * Aij + np.outer(Bi, Bi) + B * Bij)
    ddz = -(
        Aij * C + np.outer(Ai, Ci) + np.outer(Ci, Ai) + A * Cij
        + Bij * D + np.outer(Bi, Di) + np.outer(Di, Bi) + B * Dij
    )
    return BlochJet(
        x=x, z=complex(z), dx=dx, dz=dz.astype(np.complex128),
        ddx=ddx, ddz=ddz.astype(np.complex128),
    )


def reduced_state_jacobian(
    spec: CircuitSpec, params, channel: Callable[[ComplexArray], ComplexArray] | None = None
) -> tuple[ComplexArray, ComplexArray]:
    """rho_A and its parameter derivatives, optionally through a linear channel on the two-qubit state."""
    psi, dpsi = statevector_jacobian(spec, params)
    rho4 = np.outer(psi, psi.conj())
    drho4 = [np.outer(d, psi.conj()) + np.outer(psi, d.conj()) for d in dpsi]
    if channel is not None:
        rho4 = channel(rho4)
        # channels are linear, so they commute with the parameter derivative
        drho4 = [channel(d) for d in drho4]
    return partial_trace(rho4), np.array([partial_trace(d) for d in drho4])


def bloch_jet_from_rho(rho, drho) -> BlochJet:
    rho = np.asarray(rho, dtype=np.complex128)
    drho = np.asarray(drho, dtype=np.complex128)
    return BlochJet(
        x=float(rho[0, 0].real),
        z=complex(-rho[0, 1]),
        dx=drho[:, 0, 0].real.copy(),
        dz=-drho[:, 0, 1],
    )


def circuit_jet(spec: CircuitSpec, params, channel=None) -> BlochJet:
    """First-order reduction jet of any circuit; uses the closed form for the plain depth-1 ansatz."""
    params = spec.check(params)
    if spec.depth == 1 and not spec.entanglers and channel is None:
        return bloch_derivatives(params, order=1)
    return bloch_jet_from_rho(*reduced_state_jacobian(spec, params, channel))


def pure_state_qgt(spec: CircuitSpec, params) -> ComplexArray:
    """Quantum geometric tensor <d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>."""
    psi, dpsi = statevector_jacobian(spec, params)
    overlap = dpsi.conj() @ psi
    return dpsi.conj() @ dpsi.T - np.outer(overlap, overlap.conj())


def pure_state_qfim(spec: CircuitSpec, params) -> FloatArray:
    Q = pure_state_qgt(spec, params)
    return 0.5 * (Q.real + Q.real.T)


def berry_curvature(spec: CircuitSpec, params) -> FloatArray:
    return 2.0 * pure_state_qgt(spec, params).imag
