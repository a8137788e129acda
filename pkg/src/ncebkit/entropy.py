"""Entropic functionals, in bits.

The ``*_matrix`` helpers work on raw arrays and skip density-operator
validation; the optimizers call them in tight loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .states import DensityOperator, require_bipartite

EIG_CUTOFF = 1e-14


def entropy_of_spectrum(eigs) -> float:
    """-Σ λ log₂ λ over eigenvalues above the cutoff."""
    w = np.asarray(eigs, dtype=float)
    w = w[w > EIG_CUTOFF]
    return float(-np.sum(w * np.log2(w)))


def vn_entropy_matrix(m: np.ndarray) -> float:
    return entropy_of_spectrum(np.linalg.eigvalsh((m + m.conj().T) / 2))


def _marginal(m: np.ndarray, dims: Sequence[int], keep: int) -> np.ndarray:
    da, db = dims
    x = m.reshape(da, db, da, db)
    return np.trace(x, axis1=0, axis2=2) if keep == 1 else np.trace(x, axis1=1, axis2=3)


def conditional_entropy_matrix(m: np.ndarray, dims: Sequence[int], conditioned_on: int = 1) -> float:
    """S(AB) - S(conditioning subsystem) for a bipartite matrix."""
    return vn_entropy_matrix(m) - vn_entropy_matrix(_marginal(m, dims, conditioned_on))


def mutual_information_matrix(m: np.ndarray, dims: Sequence[int]) -> float:
    sa = vn_entropy_matrix(_marginal(m, dims, 0))
    sb = vn_entropy_matrix(_marginal(m, dims, 1))
    return sa + sb - vn_entropy_matrix(m)


def von_neumann(rho: DensityOperator) -> float:
    """S(ρ) = -Tr ρ log₂ ρ."""
    return entropy_of_spectrum(rho.spectrum())


def conditional_entropy(rho: DensityOperator, conditioned_on: int = 1) -> float:
    """S(A|B) for ``conditioned_on=1`` (the default), S(B|A) for 0."""
    require_bipartite(rho)
    if conditioned_on not in (0, 1):
        raise ValueError("conditioned_on must be 0 or 1")
    return von_neumann(rho) - von_neumann(rho.marginal(conditioned_on))


def mutual_information(rho: DensityOperator) -> float:
    require_bipartite(rho)
    return von_neumann(rho.marginal(0)) + von_neumann(rho.marginal(1)) - von_neumann(rho)


def coherent_info_state(rho: DensityOperator) -> float:
    """I(A⟩B) = S(B) - S(AB)."""
    return -conditional_entropy(rho, 1)


@dataclass(frozen=True)
class EntropyReport:
    S_AB: float
    S_A: float
    S_B: float
    S_cond_A_given_B: float
    mutual_info: float
    coherent_info: float


def entropy_report(rho: DensityOperator) -> EntropyReport:
    require_bipartite(rho)
    s_ab = von_neumann(rho)
    s_a = von_neumann(rho.marginal(0))
    s_b = von_neumann(rho.marginal(1))
    cond = s_ab - s_b
    return EntropyReport(s_ab, s_a, s_b, cond, s_a + s_b - s_ab, -cond)


def _xlog2x(x: float) -> float:
    return x * np.log2(x) if x > EIG_CUTOFF else 0.0


def alpha_family_eigenvalues(alpha: float, p: float) -> tuple[float, float, float, float, float]:
    """Closed-form spectrum of (id ⊗ depolarizing_p)(|ψ_α⟩⟨ψ_α|) plus the B-marginal weight.

    Returns (λ1, λ2, λ3, λ4, λ5): the four eigenvalues of the output and the
    weight of |0⟩ in its B marginal. The square-root half-gap is
    √(5p² - 12p + 8 + 4p cos4α - 3p² cos4α) · √2/8.
    """
    c4 = np.cos(4 * alpha)
    disc = 5 * p**2 - 12 * p + 8 + 4 * p * c4 - 3 * p**2 * c4
    half_gap = np.sqrt(max(disc, 0.0)) * np.sqrt(2) / 8
    l1 = p / 2 * np.cos(alpha) ** 2
    l2 = p / 2 * np.sin(alpha) ** 2
    l3 = 0.5 - half_gap - p / 4
    l4 = 0.5 + half_gap - p / 4
    l5 = np.cos(alpha) ** 2 - p / 2 * np.cos(2 * alpha)
    return l1, l2, l3, l4, l5


def alpha_family_analytic(alpha: float, p: float) -> float:
    """S(A|B) of the depolarized α-state from its closed-form spectrum."""
    l1, l2, l3, l4, l5 = alpha_family_eigenvalues(alpha, p)
    s_ab = -sum(_xlog2x(max(x, 0.0)) for x in (l1, l2, l3, l4))
    s_b = -_xlog2x(l5) - _xlog2x(1 - l5)
    return float(s_ab - s_b)


def isotropic_entropy(p: float, d: int) -> float:
    """S(p, d): entropy of p|φ⁺⟩⟨φ⁺| + (1-p) I/d² on d⊗d."""
    D = d * d
    top = (1 + (D - 1) * p) / D
    rest = (1 - p) / D
    return -_xlog2x(top) - (D - 1) * _xlog2x(rest)


def isotropic_conditional_entropy(p: float, d: int) -> float:
    """S(B1|B2) of the global-depolarized maximally entangled state: S(p,d) - log₂ d."""
    return isotropic_entropy(p, d) - np.log2(d)


def _entropy_rows(w: np.ndarray) -> np.ndarray:
    w = np.where(w > EIG_CUTOFF, w, 1.0)
    return -np.sum(w * np.log2(w), axis=-1)


def conditional_entropy_batch(mats: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """S(A|B) for a stack of bipartite matrices of shape (n, da·db, da·db)."""
    da, db = dims
    n = mats.shape[0]
    herm = (mats + np.swapaxes(mats.conj(), 1, 2)) / 2
    s_ab = _entropy_rows(np.linalg.eigvalsh(herm))
    rb = np.trace(herm.reshape(n, da, db, da, db), axis1=1, axis2=3)
    return s_ab - _entropy_rows(np.linalg.eigvalsh(rb))
