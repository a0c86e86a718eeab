"""Two-qubit channels for the robustness sweeps."""
from functools import partial
from typing import Callable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from qig_kit.core.errors import DomainError, NormalizationError
from qig_kit.geometry.hea import I2
from qig_kit.geometry.linops import ComplexArray

Qubit = Literal["A", "B"]
ChannelName = Literal["depolarizing", "amplitude_damping"]

I4 = np.eye(4, dtype=np.complex128)


def check_density(rho, tol: float = 1e-12) -> ComplexArray:
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (4, 4):
        raise NormalizationError(f"expected a 4x4 density matrix, got {rho.shape}")
    if not np.allclose(rho, rho.conj().T, atol=tol):
        raise NormalizationError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NormalizationError("density matrix trace != 1")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise NormalizationError("density matrix is not positive semidefinite")
    return rho


def _check_level(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def depolarize(rho, p: float) -> ComplexArray:
    """D_p(rho) = (1 - p) rho + p Tr(rho) I/4.

    The trace factor keeps the map linear so it also acts on derivative operators.
    """
    _check_level("p", p)
    rho = np.asarray(rho, dtype=np.complex128)
    return (1.0 - p) * rho + p * np.trace(rho) * I4 / 4.0


def damping_kraus(eta: float) -> tuple[ComplexArray, ComplexArray]:
    _check_level("eta", eta)
    E0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - eta)]], dtype=np.complex128)
    E1 = np.array([[0.0, np.sqrt(eta)], [0.0, 0.0]], dtype=np.complex128)
    return E0, E1


def amp_damp_on_qubit(rho, eta: float, which: Qubit = "B") -> ComplexArray:
    if which not in ("A", "B"):
        raise DomainError(f"qubit must be 'A' or 'B', got {which!r}")
    rho = np.asarray(rho, dtype=np.complex128)
    out = np.zeros_like(rho)
    for E in damping_kraus(eta):
        K = np.kron(E, I2) if which == "A" else np.kron(I2, E)
        out += K @ rho @ K.conj().T
    return out


class NoiseSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    channel: ChannelName
    level: float = Field(ge=0.0, le=1.0)
    qubit: Qubit = "B"

    @property
    def label(self) -> str:
        if self.channel == "depolarizing":
            return f"depolarizing p={self.level:g}"
        return f"amp_damping[{self.qubit}] eta={self.level:g}"


def make_channel(spec: NoiseSpec) -> Callable[[ComplexArray], ComplexArray] | None:
    """Callable applying the channel; None for the identity (level 0)."""
    if spec.level == 0.0:
        return None
    if spec.channel == "depolarizing":
        return partial(depolarize, p=spec.level)
    return partial(amp_damp_on_qubit, eta=spec.level, which=spec.qubit)
