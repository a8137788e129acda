"""Density operators and the state families used throughout the package."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .qlinalg import (
    HERMITIAN_TOL,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DimensionError,
    as_cmatrix,
    check_dims,
    herm_eigvals,
    hermitian_part,
    kron,
    partial_trace,
    random_pure_vector,
)

TRACE_TOL = 1e-9
PSD_TOL = 1e-10
NORM_TOL = 1e-10


class InvalidStateError(ValueError):
    """Matrix fails the density-operator invariants."""


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Unit-trace PSD matrix with declared subsystem dimensions.

    The stored matrix is the Hermitian part of the input, so small rounding
    asymmetries from channel application are removed on construction.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        m = as_cmatrix(self.matrix)
        dims = self.dims or (m.shape[0],)
        dims = check_dims(m, dims)
        try:
            m = hermitian_part(m, HERMITIAN_TOL)
        except ValueError as exc:
            raise InvalidStateError(str(exc)) from None
        tr = np.trace(m).real
        if abs(tr - 1) > TRACE_TOL:
            raise InvalidStateError(f"trace {tr:.12g} is not 1 within {TRACE_TOL:.0e}")
        lo = herm_eigvals(m)[-1]
        if lo < -PSD_TOL:
            raise InvalidStateError(f"minimum eigenvalue {lo:.3e} below -{PSD_TOL:.0e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, descending, with the [-1e-10, 0] band clamped to zero."""
        w = herm_eigvals(self.matrix)
        return np.where(w < 0, 0.0, w)

    def marginal(self, keep: Sequence[int] | int) -> "DensityOperator":
        if isinstance(keep, int):
            keep = [keep]
        keep = sorted(keep)
        m = partial_trace(self.matrix, self.dims, keep)
        return DensityOperator(m, tuple(self.dims[k] for k in keep))

    def with_dims(self, dims: Sequence[int]) -> "DensityOperator":
        return DensityOperator(self.matrix, tuple(dims))

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(np.trace(self.matrix @ self.matrix).real - 1) < tol

    def __eq__(self, other):
        if not isinstance(other, DensityOperator):
            return NotImplemented
        return self.dims == other.dims and np.allclose(self.matrix, other.matrix, atol=1e-12)

    __hash__ = None


def pure_state_density(amplitudes, dims: Sequence[int] | None = None) -> DensityOperator:
    """Projector onto a normalized state vector."""
    v = np.asarray(amplitudes, dtype=np.complex128).ravel()
    norm = np.linalg.norm(v)
    if abs(norm - 1) > NORM_TOL:
        raise InvalidStateError(f"state vector norm {norm:.12g} is not 1")
    return DensityOperator(np.outer(v, v.conj()), tuple(dims) if dims else (v.size,))


def alpha_vector(alpha: float) -> np.ndarray:
    return np.array([np.cos(alpha), 0, 0, np.sin(alpha)], dtype=np.complex128)


def alpha_state(alpha: float) -> DensityOperator:
    """cos α |00⟩ + sin α |11⟩ as a 2⊗2 density operator."""
    return pure_state_density(alpha_vector(alpha), (2, 2))


def max_entangled_vector(d: int) -> np.ndarray:
    if d < 1:
        raise ValueError("dimension must be >= 1")
    v = np.zeros(d * d, dtype=np.complex128)
    v[:: d + 1] = 1 / np.sqrt(d)
    return v


def max_entangled(d: int) -> DensityOperator:
    """|φ⁺⟩ = Σ|ii⟩/√d on d⊗d."""
    return pure_state_density(max_entangled_vector(d), (d, d))


def maximally_mixed(d: int, dims: Sequence[int] | None = None) -> DensityOperator:
    return DensityOperator(np.eye(d, dtype=np.complex128) / d, tuple(dims) if dims else (d,))


def product_state(*states: DensityOperator) -> DensityOperator:
    m = states[0].matrix
    for s in states[1:]:
        m = np.kron(m, s.matrix)
    dims = sum((s.dims for s in states), ())
    return DensityOperator(m, dims)


# ---------------------------------------------------------------------------
# Bell-diagonal states


@dataclass(frozen=True)
class BellDiagonalParams:
    """Diagonal of the correlation matrix, (c1, c2, c3) ∈ [-1, 1]³."""

    c1: float
    c2: float
    c3: float

    def probabilities(self) -> dict[tuple[int, int], float]:
        """Weights p_mn on |γ_mn⟩ = (|0,n⟩ + (-1)^m |1,1⊕n⟩)/√2."""
        out = {}
        for m in (0, 1):
            for n in (0, 1):
                sm, sn = (-1) ** m, (-1) ** n
                out[(m, n)] = 0.25 * (1 + sm * self.c1 - sm * sn * self.c2 + sn * self.c3)
        return out

    def in_tetrahedron(self, tol: float = 1e-12) -> bool:
        return all(p >= -tol for p in self.probabilities().values())

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)


def bell_basis_vector(m: int, n: int) -> np.ndarray:
    v = np.zeros(4, dtype=np.complex128)
    v[n] += 1 / np.sqrt(2)  # |0, n⟩
    v[2 + (1 ^ n)] += (-1) ** m / np.sqrt(2)  # |1, 1⊕n⟩
    return v


def bell_diagonal(params: BellDiagonalParams | Sequence[float]) -> DensityOperator:
    """Mixture Σ p_mn |γ_mn⟩⟨γ_mn| of the four Bell states."""
    if not isinstance(params, BellDiagonalParams):
        params = BellDiagonalParams(*params)
    probs = params.probabilities()
    bad = {k: v for k, v in probs.items() if v < -1e-12}
    if bad:
        raise InvalidStateError(f"point {params.as_tuple()} outside the Bell tetrahedron: {bad}")
    m = np.zeros((4, 4), dtype=np.complex128)
    for (mm, nn), p in probs.items():
        v = bell_basis_vector(mm, nn)
        m += max(p, 0.0) * np.outer(v, v.conj())
    return DensityOperator(m, (2, 2))


def bell_diagonal_bloch(params: BellDiagonalParams | Sequence[float]) -> np.ndarray:
    """(I + Σ c_i σ_i⊗σ_i)/4 as a raw matrix."""
    if isinstance(params, BellDiagonalParams):
        params = params.as_tuple()
    c1, c2, c3 = params
    return 0.25 * (
        kron(PAULI_I, PAULI_I)
        + c1 * kron(PAULI_X, PAULI_X)
        + c2 * kron(PAULI_Y, PAULI_Y)
        + c3 * kron(PAULI_Z, PAULI_Z)
    )


def sample_tetrahedron(count: int, seed: int = 0) -> list[BellDiagonalParams]:
    """Uniform rejection sampling of the Bell tetrahedron inside [-1, 1]³."""
    if count < 1:
        raise ValueError("count must be >= 1")
    points, _ = _rejection_sample(count, seed)
    return [BellDiagonalParams(*map(float, p)) for p in points]


def tetrahedron_points(count: int, seed: int = 0) -> np.ndarray:
    """Same samples as ``sample_tetrahedron``, as a (count, 3) array."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return _rejection_sample(count, seed)[0]


def tetrahedron_acceptance_rate(count: int, seed: int = 0) -> float:
    points, draws = _rejection_sample(count, seed)
    return len(points) / draws


def _rejection_sample(count: int, seed: int) -> tuple[np.ndarray, int]:
    rng = np.random.default_rng(seed)
    accepted = []
    n_acc = draws = 0
    while n_acc < count:
        batch = rng.uniform(-1.0, 1.0, size=(max(1024, 3 * (count - n_acc)), 3))
        c1, c2, c3 = batch.T
        ok = (
            (1 + c1 - c2 + c3 >= 0)
            & (1 + c1 + c2 - c3 >= 0)
            & (1 - c1 + c2 + c3 >= 0)
            & (1 - c1 - c2 - c3 >= 0)
        )
        idx = np.flatnonzero(ok)
        need = count - n_acc
        if len(idx) >= need:
            # count draws only up to the last accepted sample
            draws += int(idx[need - 1]) + 1
            accepted.append(batch[idx[:need]])
            n_acc += need
        else:
            draws += len(batch)
            accepted.append(batch[idx])
            n_acc += len(idx)
    return np.concatenate(accepted), draws


# ---------------------------------------------------------------------------
# random states for property tests


def random_pure_state(dims: Sequence[int], rng: np.random.Generator) -> DensityOperator:
    d = int(np.prod(dims))
    return pure_state_density(random_pure_vector(d, rng), tuple(dims))


def random_density(dims: Sequence[int], rng: np.random.Generator, rank: int | None = None) -> DensityOperator:
    """Mixed state obtained by tracing out an ancilla of a random pure state."""
    d = int(np.prod(dims))
    rank = rank or d
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, tuple(dims))


def purify(rho: DensityOperator) -> tuple[np.ndarray, int]:
    """Purification |ψ⟩ on (R ⊗ system) with the reference R first.

    Returns the vector and the reference dimension (the rank of ρ).
    """
    w, v = np.linalg.eigh(rho.matrix)
    keep = w > 1e-14
    w, v = w[keep], v[:, keep]
    r = len(w)
    psi = np.zeros(r * rho.dim, dtype=np.complex128)
    for i in range(r):
        e = np.zeros(r)
        e[i] = 1
        psi += np.sqrt(w[i]) * np.kron(e, v[:, i])
    return psi / np.linalg.norm(psi), r


def require_bipartite(rho: DensityOperator) -> tuple[int, int]:
    if len(rho.dims) != 2:
        raise DimensionError(f"bipartite dims required, got {rho.dims}")
    return rho.dims
