"""Dense complex matrix kernel.

Every matrix in the package is a ``numpy.ndarray`` of dtype ``complex128``.
Subsystem structure is carried separately as a tuple of dimensions.
"""

from __future__ import annotations

from functools import lru_cache, reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class DimensionError(ValueError):
    """Matrix shape does not match the declared subsystem dimensions."""


class NotHermitianError(ValueError):
    """Matrix is not Hermitian within tolerance."""


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a finite 2-D complex128 array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf entries")
    return arr


def check_dims(m: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    n = int(np.prod(dims))
    if m.shape != (n, n):
        raise DimensionError(f"dims {dims} imply a {n}x{n} matrix, got {m.shape}")
    return dims


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def kron(a, b, *more) -> np.ndarray:
    """Kronecker product of two or more matrices (or vectors)."""
    return reduce(np.kron, (a, b) + more)


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in their original order. Keeping nothing is
    rejected; use ``np.trace`` for the scalar.
    """
    m = as_cmatrix(m)
    dims = check_dims(m, dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimensionError(f"subsystem index out of range for dims {dims}")
    n = len(dims)
    t = m.reshape(dims + dims)
    # einsum labels: row indices 0..n-1, column indices n..2n-1
    row = list(range(n))
    col = [i + n if i in keep else i for i in range(n)]
    out_labels = keep + [k + n for k in keep]
    reduced = np.einsum(t, row + col, out_labels)
    d = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d, d)


def partial_transpose(m, dims: Sequence[int], part: int) -> np.ndarray:
    """Transpose the indices of subsystem ``part`` only."""
    m = as_cmatrix(m)
    dims = check_dims(m, dims)
    n = len(dims)
    if not 0 <= part < n:
        raise DimensionError(f"subsystem index {part} out of range for dims {dims}")
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[part], axes[part + n] = axes[part + n], axes[part]
    return t.transpose(axes).reshape(m.shape)


def hermitian_part(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (m + m†)/2, refusing inputs further than ``tol`` from Hermitian."""
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"square matrix required, got {m.shape}")
    dev = np.max(np.abs(m - dagger(m))) if m.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"max |m - m^dagger| = {dev:.3e} exceeds {tol:.1e}")
    return (m + dagger(m)) / 2


def herm_eigvals(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, in descending order."""
    return np.linalg.eigvalsh(hermitian_part(m, tol))[::-1]


def herm_eigh(m, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a Hermitian matrix, eigenvalues descending."""
    w, v = np.linalg.eigh(hermitian_part(m, tol))
    return w[::-1], v[:, ::-1]


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = as_cmatrix(m)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def weyl_operators(d: int) -> list[np.ndarray]:
    """The d² clock-and-shift operators X^j Z^k, with the identity first."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    for j in range(d):
        xj = np.linalg.matrix_power(shift, j)
        for k in range(d):
            ops.append(xj @ np.linalg.matrix_power(clock, k))
    return ops


def unitary_from_hermitian(h: np.ndarray) -> np.ndarray:
    """exp(iH) for Hermitian H."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ dagger(v)


@lru_cache(maxsize=None)
def _triu(d: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(d, 1)


def hermitian_from_params(x: np.ndarray, d: int) -> np.ndarray:
    """Map d² reals onto a d×d Hermitian matrix (diagonal, then upper-triangle pairs)."""
    h = np.diag(x[:d].astype(np.complex128))
    iu = _triu(d)
    m = len(iu[0])
    off = x[d:d + m] + 1j * x[d + m:d + 2 * m]
    h[iu] = off
    h[iu[1], iu[0]] = off.conj()
    return h


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Random isometry V (rows × cols, rows ≥ cols) with V†V = I."""
    if rows < cols:
        raise DimensionError("an isometry needs rows >= cols")
    z = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
