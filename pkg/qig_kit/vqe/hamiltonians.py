import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.linalg import eigh

from qig_kit.geometry.hea import PAULI
from qig_kit.geometry.linops import ComplexArray, FloatArray


class PauliTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    coefficient: float
    pauli: str = Field(description="two-letter Pauli string, qubit A first, e.g. 'XZ'")

    @field_validator("pauli")
    @classmethod
    def _valid_string(cls, v: str) -> str:
        v = v.upper()
        if len(v) != 2 or any(c not in "IXYZ" for c in v):
            raise ValueError(f"invalid two-qubit Pauli string '{v}'")
        return v

    def dense(self) -> ComplexArray:
        return self.coefficient * np.kron(PAULI[self.pauli[0]], PAULI[self.pauli[1]])


class PauliSumHamiltonian(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    terms: tuple[PauliTerm, ...]

    def dense(self) -> ComplexArray:
        H = np.zeros((4, 4), dtype=np.complex128)
        for term in self.terms:
            H += term.dense()
        return 0.5 * (H + H.conj().T)

    @classmethod
    def from_pairs(cls, pairs, name: str = "custom") -> "PauliSumHamiltonian":
        return cls(name=name, terms=tuple(PauliTerm(coefficient=c, pauli=p) for c, p in pairs))

    @classmethod
    def from_json(cls, path: str | Path) -> "PauliSumHamiltonian":
        return cls.model_validate(json.loads(Path(path).read_text()))


def toy_hamiltonian() -> PauliSumHamiltonian:
    """Strongly coupled two-qubit model with an entangled ground state.

    Not taken from any publication; it only needs a nontrivial ground state.
    """
    return PauliSumHamiltonian.from_pairs([(-1.0, "XX"), (-0.5, "ZZ"), (0.3, "ZI")], name="toy")


def h2_hamiltonian() -> PauliSumHamiltonian:
    """H2 / STO-3G at 0.735 A in the two-qubit parity-reduced form (electronic part)."""
    return PauliSumHamiltonian.from_pairs(
        [
            (-1.052373245772859, "II"),
            (0.39793742484318045, "IZ"),
            (-0.39793742484318045, "ZI"),
            (-0.01128010425623538, "ZZ"),
            (0.18093119978423156, "XX"),
        ],
        name="h2",
    )


BUILTIN = {"toy": toy_hamiltonian, "h2": h2_hamiltonian}


def exact_ground(H: PauliSumHamiltonian) -> tuple[float, ComplexArray]:
    vals, vecs = eigh(H.dense())
    return float(vals[0]), vecs[:, 0]


def spectrum(H: PauliSumHamiltonian) -> FloatArray:
    return np.linalg.eigvalsh(H.dense())
