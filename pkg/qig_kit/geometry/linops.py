"""Small dense linear-algebra kernels shared by the geometry modules."""
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from qig_kit.core.errors import DomainError, RankError

FloatArray = NDArray[np.float64]
ComplexArray = NDArray[np.complex128]

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class EigenSplit:
    eigenvalues: FloatArray
    eigenvectors: FloatArray
    active_count: int | None = None

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def with_active(self, count: int) -> "EigenSplit":
        if not 0 <= count <= self.dim:
            raise DomainError(f"active_count {count} outside [0, {self.dim}]")
        return replace(self, active_count=count)


def as_hermitian2(H) -> ComplexArray:
    H = np.asarray(H, dtype=np.complex128)
    if H.shape != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {H.shape}")
    if not np.allclose(H, H.conj().T, atol=1e-12):
        raise DomainError("matrix is not Hermitian")
    return 0.5 * (H + H.conj().T)


def symmetrize(M) -> FloatArray:
    M = np.asarray(M, dtype=np.float64)
    return 0.5 * (M + M.T)


def _fix_sign(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        j = int(np.argmax(np.abs(col)))
        pivot = col[j]
        if np.abs(pivot) > 0:
            out[:, k] = col * (np.abs(pivot) / pivot)
    return out


def eigh_hermitian2(H) -> tuple[FloatArray, ComplexArray]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix, eigenvalues descending."""
    H = as_hermitian2(H)
    a, d = H[0, 0].real, H[1, 1].real
    b = H[0, 1]
    mean = 0.5 * (a + d)
    rad = np.hypot(0.5 * (a - d), np.abs(b))
    vals = np.array([mean + rad, mean - rad])

    if np.abs(b) <= DEGENERACY_TOL * max(1.0, rad):
        vecs = np.eye(2, dtype=np.complex128) if a >= d else np.array([[0, 1], [1, 0]], dtype=np.complex128)
        return vals, vecs

    cols = []
    for lam in vals:
        # two equivalent null vectors of H - lam; keep the better conditioned one
        v1 = np.array([b, lam - a], dtype=np.complex128)
        v2 = np.array([lam - d, np.conj(b)], dtype=np.complex128)
        v = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
        cols.append(v / np.linalg.norm(v))
    vecs = _fix_sign(np.column_stack(cols))
    return vals, vecs


def eigh_sym(M) -> EigenSplit:
    M = symmetrize(M)
    vals, vecs = np.linalg.eigh(M)
    order = np.argsort(vals)[::-1]
    vecs = _fix_sign(vecs[:, order].astype(np.float64))
    return EigenSplit(eigenvalues=vals[order], eigenvectors=vecs)


def pinv_on_support(M, split: EigenSplit, ridge: float = 0.0) -> FloatArray:
    """Support-restricted ridge pseudoinverse: sum over active a of v_a v_a^T / (lambda_a + ridge)."""
    if ridge < 0:
        raise DomainError("ridge must be nonnegative")
    if split.active_count is None:
        raise DomainError("split has no active set")
    r = split.active_count
    m = split.dim
    if np.asarray(M).shape != (m, m):
        raise DomainError("split does not match matrix dimension")
    lam = split.eigenvalues[:r] + ridge
    if r and np.any(lam <= 0):
        raise RankError("nonpositive active eigenvalue")
    U = split.eigenvectors[:, :r]
    return (U / lam) @ U.T if r else np.zeros((m, m))


def _shift(theta, i: int, delta: float) -> FloatArray:
    out = np.array(theta, dtype=np.float64, copy=True)
    out[i] += delta
    return out


def central_diff(phi: Callable, theta, i: int, h: float):
    return (np.asarray(phi(_shift(theta, i, h))) - np.asarray(phi(_shift(theta, i, -h)))) / (2.0 * h)


def second_diff(phi: Callable, theta, i: int, h: float):
    f0 = np.asarray(phi(np.asarray(theta, dtype=np.float64)))
    return (np.asarray(phi(_shift(theta, i, h))) - 2.0 * f0 + np.asarray(phi(_shift(theta, i, -h)))) / (h * h)


def mixed_diff(phi: Callable, theta, i: int, j: int, h: float):
    """Four-point stencil for d2 phi / d_i d_j; falls back to second_diff when i == j."""
    if i == j:
        return second_diff(phi, theta, i, h)

    def at(si, sj):
        t = _shift(theta, i, si * h)
        t[j] += sj * h
        return np.asarray(phi(t))

    return (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h)


def scalar_derivative(phi: Callable[[float], float], t: float, h: float, order: int = 1) -> float:
    """Centered derivative of a scalar function of one variable."""
    wrapped = lambda v: phi(float(v[0]))  # noqa: E731
    if order == 1:
        return float(central_diff(wrapped, [t], 0, h))
    if order == 2:
        return float(second_diff(wrapped, [t], 0, h))
    raise DomainError("order must be 1 or 2")
