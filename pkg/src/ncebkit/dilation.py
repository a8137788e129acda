"""Stinespring dilations, complementary channels and environment leak audits.

The environment basis follows the order of the Kraus list. Complementary
channels are only defined up to an isometry on the environment, so callers
should compare spectra and entropies rather than raw matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel, require_kraus
from .entropy import conditional_entropy_matrix, mutual_information_matrix
from .qlinalg import DimensionError, dagger, partial_trace
from .states import DensityOperator, purify


@dataclass(frozen=True)
class IsometricExtension:
    """V = Σ_i K_i ⊗ |i⟩_E, mapping dim_in into dim_out ⊗ dim_env."""

    isometry: np.ndarray
    dim_in: int
    dim_out: int
    dim_env: int

    def defect(self) -> float:
        """max |V†V - I| entrywise."""
        g = dagger(self.isometry) @ self.isometry
        return float(np.max(np.abs(g - np.eye(self.dim_in))))


def stinespring(channel: KrausChannel) -> IsometricExtension:
    ch = require_kraus(channel)
    r = ch.n_kraus
    # rows ordered (output index, environment index)
    v = np.stack(ch.kraus_ops, axis=-1).transpose(0, 2, 1).reshape(ch.dim_out * r, ch.dim_in)
    return IsometricExtension(v, ch.dim_in, ch.dim_out, r)


def complementary(channel: KrausChannel) -> KrausChannel:
    """N^C(ρ) = Tr_out V ρ V†, whose (i, j) entry is Tr(K_j† K_i ρ).

    Its Kraus operators are M_k with row i equal to row k of K_i.
    """
    ch = require_kraus(channel)
    stack = np.stack(ch.kraus_ops)  # (r, out, in)
    ops = tuple(stack[:, k, :] for k in range(ch.dim_out))
    return KrausChannel(ops, f"complement({ch.describe()})")


@dataclass(frozen=True)
class LeakReport:
    S_cond_AB_out: float
    S_cond_AE: float
    I_A_Bout: float
    I_A_E: float
    dim_a: int
    dim_env: int
    purification_dim: int = 1

    @property
    def duality_gap(self) -> float:
        """S(A|B̃) + S(A|E); zero for pure tripartite outputs."""
        return self.S_cond_AB_out + self.S_cond_AE

    @property
    def leaks_more_to_environment(self) -> bool:
        return self.I_A_Bout <= self.I_A_E + 1e-9


def tripartite_output(channel: KrausChannel, psi_ab: np.ndarray, d_a: int) -> np.ndarray:
    """(I_A ⊗ V)|ψ⟩ reshaped as a vector on A ⊗ B̃ ⊗ E."""
    ext = stinespring(channel)
    mat = psi_ab.reshape(d_a, ext.dim_in)
    out = mat @ ext.isometry.T  # (d_a, dim_out·dim_env)
    return out.reshape(-1)


def leak_report(channel: KrausChannel, rho_ab: DensityOperator) -> LeakReport:
    """Entropic audit of A against the channel output B̃ and the environment E.

    Mixed inputs are purified first; the reference is folded into A and the
    report records its dimension.
    """
    ch = require_kraus(channel)
    if len(rho_ab.dims) != 2:
        raise DimensionError(f"bipartite state required, got dims {rho_ab.dims}")
    d_a, d_b = rho_ab.dims
    if d_b != ch.dim_in:
        raise DimensionError(f"channel input dim {ch.dim_in} != d_B {d_b}")
    if rho_ab.is_pure():
        w, v = np.linalg.eigh(rho_ab.matrix)
        psi = v[:, -1]
        ref = 1
    else:
        psi, ref = purify(rho_ab)
        d_a = d_a * ref
    vec = tripartite_output(ch, psi, d_a)
    dims = (d_a, ch.dim_out, ch.n_kraus)
    full = np.outer(vec, vec.conj())
    rho_ab_out = partial_trace(full, dims, [0, 1])
    rho_ae = partial_trace(full, dims, [0, 2])
    return LeakReport(
        S_cond_AB_out=conditional_entropy_matrix(rho_ab_out, dims[:2], 1),
        S_cond_AE=conditional_entropy_matrix(rho_ae, (d_a, ch.n_kraus), 1),
        I_A_Bout=mutual_information_matrix(rho_ab_out, dims[:2]),
        I_A_E=mutual_information_matrix(rho_ae, (d_a, ch.n_kraus)),
        dim_a=d_a,
        dim_env=ch.n_kraus,
        purification_dim=ref,
    )
