"""Active spectral support of a metric tensor, its projector and the projected metric g = PFP."""
from dataclasses import dataclass

import numpy as np

from qig_kit.core.config import Guards, tau_spec
from qig_kit.core.errors import GapGuardError
from qig_kit.geometry.linops import EigenSplit, FloatArray, eigh_sym, symmetrize

STRADDLE_EPS = 10.0 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class SupportSplit:
    projector: FloatArray
    rank: int
    gap: float
    tau_used: float
    eigen: EigenSplit
    # an eigenvalue sits on the threshold within a few ulps
    straddles: bool = False

    @property
    def U_a(self) -> FloatArray:
        return self.eigen.eigenvectors[:, : self.rank]

    @property
    def U_b(self) -> FloatArray:
        return self.eigen.eigenvectors[:, self.rank :]

    @property
    def active_eigenvalues(self) -> FloatArray:
        return self.eigen.eigenvalues[: self.rank]

    @property
    def inactive_eigenvalues(self) -> FloatArray:
        return self.eigen.eigenvalues[self.rank :]

    @property
    def lambda_max(self) -> float:
        return float(self.eigen.eigenvalues[0]) if self.eigen.dim else 0.0


@dataclass(frozen=True)
class RegularityFlags:
    gap_ok: bool
    brioschi_ok: bool
    rank: int

    @property
    def regular(self) -> bool:
        return self.gap_ok and self.brioschi_ok


def split_spectrum(F, tau: float) -> SupportSplit:
    eig = eigh_sym(F)
    lam = eig.eigenvalues
    r = int(np.sum(lam > tau))
    eig = eig.with_active(r)
    U = eig.eigenvectors[:, :r]
    P = symmetrize(U @ U.T)
    if 0 < r < len(lam):
        gap = float(lam[r - 1] - lam[r])
    else:
        gap = float("inf")
    straddles = bool(np.any(np.abs(lam - tau) <= STRADDLE_EPS * abs(tau)))
    return SupportSplit(projector=P, rank=r, gap=gap, tau_used=tau, eigen=eig, straddles=straddles)


def support_of(F, guards: Guards | None = None) -> SupportSplit:
    """split_spectrum with tau_spec taken from the guard configuration."""
    guards = guards or Guards()
    lam_max = float(np.max(np.linalg.eigvalsh(symmetrize(F)))) if np.size(F) else 0.0
    return split_spectrum(F, tau_spec(lam_max, guards))


def check_gap(split: SupportSplit, gap_min: float) -> None:
    if split.gap < gap_min or split.straddles:
        raise GapGuardError(f"gap guard violated: gamma={split.gap:.3e} < {gap_min:.1e}")


def projector_derivative(F, dF, split: SupportSplit, gap_min: float = 1e-8) -> FloatArray:
    """First-order change of the active projector along dF (Hadamard form of the Riesz integral)."""
    m = split.eigen.dim
    if split.rank in (0, m):
        return np.zeros((m, m))
    check_gap(split, gap_min)
    Ua, Ub = split.U_a, split.U_b
    denom = split.active_eigenvalues[None, :] - split.inactive_eigenvalues[:, None]
    block = (Ub.T @ symmetrize(dF) @ Ua) / denom
    half = Ub @ block @ Ua.T
    return half + half.T


def projected_metric(F, split: SupportSplit) -> FloatArray:
    P = split.projector
    return symmetrize(P @ np.asarray(F, dtype=np.float64) @ P)


def projected_metric_derivative(F, dF, split: SupportSplit, gap_min: float = 1e-8) -> FloatArray:
    P = split.projector
    F = np.asarray(F, dtype=np.float64)
    dP = projector_derivative(F, dF, split, gap_min)
    return symmetrize(dP @ F @ P + P @ F @ dP + P @ symmetrize(dF) @ P)


def regularity(split: SupportSplit, gap_min: float, brioschi_ok: bool = True) -> RegularityFlags:
    gap_ok = split.gap >= gap_min and not split.straddles
    return RegularityFlags(gap_ok=bool(gap_ok), brioschi_ok=bool(brioschi_ok), rank=split.rank)
