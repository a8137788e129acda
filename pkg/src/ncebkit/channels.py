"""Quantum channels: Kraus representation, application, Choi states, algebra.

Two parameter conventions coexist for depolarizing noise and are kept apart
by constructor name:

* ``depolarizing(d, p)``       noise weight:  (1-p) ρ + p I/d
* ``depolarizing_keep(d, p)``  keep weight:   p ρ + (1-p) I/d
* ``global_depolarizing(D, p)`` keep weight on a d⊗d system, D = d²
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .qlinalg import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    DimensionError,
    as_cmatrix,
    check_dims,
    dagger,
    herm_eigh,
    partial_trace,
    partial_transpose,
    random_isometry,
    trace_norm,
    weyl_operators,
)
from .states import DensityOperator, max_entangled_vector

COMPLETENESS_TOL = 1e-9


class ChannelError(ValueError):
    """Invalid channel construction or incompatible dimensions."""


class NotKrausError(TypeError):
    """Operation needs a Kraus representation the channel does not carry."""


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """ρ ↦ Σ K ρ K† for Kraus operators of shape (dim_out, dim_in)."""

    kraus_ops: tuple[np.ndarray, ...]
    label: str = ""
    dim_in: int = field(init=False)
    dim_out: int = field(init=False)

    def __post_init__(self):
        ops = tuple(as_cmatrix(k) for k in self.kraus_ops)
        if not ops:
            raise ChannelError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ChannelError(f"Kraus operators disagree in shape: {[k.shape for k in ops]}")
        for k in ops:
            k.setflags(write=False)
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "dim_out", shape[0])
        object.__setattr__(self, "dim_in", shape[1])
        object.__setattr__(self, "_stack", np.stack(ops))
        object.__setattr__(self, "_stack_t", self._stack.transpose(0, 2, 1).copy())

    @property
    def n_kraus(self) -> int:
        return len(self.kraus_ops)

    def act(self, m: np.ndarray) -> np.ndarray:
        """Apply to a dim_in × dim_in matrix."""
        k = self._stack
        return np.einsum("kim,mn,kjn->ij", k, m, k.conj())

    def act_on_B(self, m: np.ndarray, d_a: int) -> np.ndarray:
        """(id_A ⊗ N) applied to a (d_a·dim_in)-square matrix."""
        di, do = self.dim_in, self.dim_out
        x = m.reshape(d_a, di, d_a, di)
        k = self._stack
        out = np.einsum("kim,ambn,kjn->aibj", k, x, k.conj())
        return out.reshape(d_a * do, d_a * do)

    def act_on_B_vector(self, psi: np.ndarray, d_a: int) -> np.ndarray:
        """(id_A ⊗ N)(|ψ⟩⟨ψ|) for a pure vector, via Σ_k |φ_k⟩⟨φ_k|."""
        mat = psi.reshape(d_a, self.dim_in)
        phis = np.matmul(mat, self._stack_t).reshape(self.n_kraus, -1)
        return phis.T @ phis.conj()

    def describe(self) -> str:
        return self.label or f"kraus[{self.n_kraus}]({self.dim_in}->{self.dim_out})"


@dataclass(frozen=True)
class TransposeDepolarizing:
    """Φ(ρ) = t ρᵀ + (1-t) Tr(ρ) I/D, carried by its action only."""

    D: int
    t: float
    label: str = ""

    @property
    def dim_in(self) -> int:
        return self.D

    @property
    def dim_out(self) -> int:
        return self.D

    def act(self, m: np.ndarray) -> np.ndarray:
        eye = np.eye(self.D, dtype=np.complex128)
        return self.t * m.T + (1 - self.t) * np.trace(m) * eye / self.D

    def act_on_B(self, m: np.ndarray, d_a: int) -> np.ndarray:
        dims = (d_a, self.D)
        pt = partial_transpose(m, dims, 1)
        red = partial_trace(m, dims, [0])
        return self.t * pt + (1 - self.t) * np.kron(red, np.eye(self.D) / self.D)

    def act_on_B_vector(self, psi: np.ndarray, d_a: int) -> np.ndarray:
        return self.act_on_B(np.outer(psi, psi.conj()), d_a)

    def describe(self) -> str:
        return self.label or f"transpose_depolarizing(D={self.D}, t={self.t:g})"


Channel = KrausChannel | TransposeDepolarizing


def require_kraus(channel) -> KrausChannel:
    if not isinstance(channel, KrausChannel):
        raise NotKrausError(
            f"{channel.describe()} has no Kraus form (the transpose is not completely positive "
            "on its own); dilation-based operations are unavailable"
        )
    return channel


# ---------------------------------------------------------------------------
# validity, application, Choi


@dataclass(frozen=True)
class Validation:
    ok: bool
    violation: float
    tolerance: float = COMPLETENESS_TOL

    def __bool__(self):
        return self.ok


def validate(channel, tol: float = COMPLETENESS_TOL) -> Validation:
    """Check Σ K†K = I entrywise within ``tol``."""
    if isinstance(channel, TransposeDepolarizing):
        lo, hi = transpose_depolarizing_range(channel.D)
        bad = 0.0 if lo - 1e-12 <= channel.t <= hi + 1e-12 else min(abs(channel.t - lo), abs(channel.t - hi))
        return Validation(bad == 0.0, bad, tol)
    gram = sum(dagger(k) @ k for k in channel.kraus_ops)
    dev = float(np.max(np.abs(gram - np.eye(channel.dim_in))))
    return Validation(dev <= tol, dev, tol)


def apply(channel, rho: DensityOperator) -> DensityOperator:
    """N(ρ); the output keeps the input's subsystem split when dims agree."""
    if rho.dim != channel.dim_in:
        raise DimensionError(f"channel input dim {channel.dim_in} != state dim {rho.dim}")
    out = channel.act(rho.matrix)
    dims = rho.dims if channel.dim_out == channel.dim_in else (channel.dim_out,)
    return DensityOperator(out, dims)


def apply_to_B(channel, rho_ab: DensityOperator) -> DensityOperator:
    """(id_A ⊗ N)(ρ_AB) acting on the second subsystem."""
    if len(rho_ab.dims) != 2:
        raise DimensionError(f"bipartite state required, got dims {rho_ab.dims}")
    d_a, d_b = rho_ab.dims
    if d_b != channel.dim_in:
        raise DimensionError(f"channel input dim {channel.dim_in} != d_B {d_b}")
    out = channel.act_on_B(rho_ab.matrix, d_a)
    return DensityOperator(out, (d_a, channel.dim_out))


def apply_to_B_batch(channel, mats: np.ndarray, d_a: int) -> np.ndarray:
    """(id_A ⊗ N) over a stack of matrices of shape (n, d_a·dim_in, d_a·dim_in)."""
    n = mats.shape[0]
    if isinstance(channel, TransposeDepolarizing):
        return np.stack([channel.act_on_B(m, d_a) for m in mats])
    di, do = channel.dim_in, channel.dim_out
    x = mats.reshape(n, d_a, di, d_a, di)
    k = channel._stack
    out = np.einsum("kim,zambn,kjn->zaibj", k, x, k.conj(), optimize=True)
    return out.reshape(n, d_a * do, d_a * do)


@dataclass(frozen=True)
class ChoiState:
    """(id ⊗ N)(|φ⁺⟩⟨φ⁺|) on dim_in ⊗ dim_out."""

    state: DensityOperator
    source: str

    @property
    def matrix(self) -> np.ndarray:
        return self.state.matrix

    @property
    def dims(self) -> tuple[int, int]:
        return self.state.dims


def choi_matrix(channel) -> np.ndarray:
    d = channel.dim_in
    phi = max_entangled_vector(d)
    return channel.act_on_B(np.outer(phi, phi.conj()), d)


def choi(channel) -> ChoiState:
    m = choi_matrix(channel)
    return ChoiState(DensityOperator(m, (channel.dim_in, channel.dim_out)), channel.describe())


def action_from_choi(j: np.ndarray, dim_in: int, dim_out: int, rho: np.ndarray) -> np.ndarray:
    """Inverse isomorphism: N(ρ) = d_in Tr_A[(ρᵀ ⊗ I) J]."""
    left = np.kron(rho.T, np.eye(dim_out))
    return dim_in * partial_trace(left @ j, (dim_in, dim_out), [1])


def depolarizing_form(channel, tol: float = 1e-9) -> float | None:
    """Keep weight a when N(ρ) = a ρ + (1-a) I/D exactly, else None.

    The test is on the Choi state, so it certifies full unitary covariance.
    """
    if isinstance(channel, TransposeDepolarizing) or channel.dim_in != channel.dim_out:
        return None
    D = channel.dim_in
    j = choi_matrix(channel)
    phi = max_entangled_vector(D)
    f = float(np.real(phi.conj() @ j @ phi))
    a = (f * D * D - 1) / (D * D - 1)
    iso = a * np.outer(phi, phi.conj()) + (1 - a) * np.eye(D * D) / (D * D)
    return a if trace_norm(j - iso) <= tol else None


# ---------------------------------------------------------------------------
# algebra


def compose_serial(n1: KrausChannel, n2: KrausChannel) -> KrausChannel:
    """n1 ∘ n2: apply n2 first."""
    n1, n2 = require_kraus(n1), require_kraus(n2)
    if n2.dim_out != n1.dim_in:
        raise DimensionError(f"cannot compose: n2 outputs {n2.dim_out}, n1 takes {n1.dim_in}")
    ops = [a @ b for a in n1.kraus_ops for b in n2.kraus_ops]
    return KrausChannel(tuple(ops), f"({n1.describe()})∘({n2.describe()})")


def compose_parallel(n1: KrausChannel, n2: KrausChannel) -> KrausChannel:
    n1, n2 = require_kraus(n1), require_kraus(n2)
    ops = [np.kron(a, b) for a in n1.kraus_ops for b in n2.kraus_ops]
    return KrausChannel(tuple(ops), f"({n1.describe()})⊗({n2.describe()})")


def mix(n1: KrausChannel, n2: KrausChannel, lam: float) -> KrausChannel:
    """λ n1 + (1-λ) n2 as the union of √λ- and √(1-λ)-scaled Kraus sets."""
    n1, n2 = require_kraus(n1), require_kraus(n2)
    if not 0 <= lam <= 1:
        raise ChannelError("mixing weight must lie in [0, 1]")
    if (n1.dim_in, n1.dim_out) != (n2.dim_in, n2.dim_out):
        raise DimensionError("mixed channels must share input and output dims")
    ops = [np.sqrt(lam) * k for k in n1.kraus_ops] + [np.sqrt(1 - lam) * k for k in n2.kraus_ops]
    return KrausChannel(tuple(ops), f"{lam:g}·({n1.describe()}) + {1 - lam:g}·({n2.describe()})")


# ---------------------------------------------------------------------------
# named channels


def _check_prob(p: float, name: str = "p"):
    if not 0 <= p <= 1:
        raise ChannelError(f"{name}={p} outside [0, 1]")


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=np.complex128),), f"identity({d})")


def unitary_channel(u: np.ndarray, label: str = "") -> KrausChannel:
    return KrausChannel((as_cmatrix(u),), label or "unitary")


def swap_channel(d: int) -> KrausChannel:
    """Conjugation by SWAP on d⊗d."""
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1
    return KrausChannel((s,), f"swap({d})")


def _depolarizing_kraus(d: int, keep: float) -> list[np.ndarray]:
    """Kraus set for keep·ρ + (1-keep)·I/d."""
    noise = 1 - keep
    if d == 2:
        paulis = [PAULI_X, PAULI_Y, PAULI_Z]
        ops = [np.sqrt(max(1 - 3 * noise / 4, 0.0)) * PAULI_I]
        ops += [np.sqrt(noise / 4) * s for s in paulis]
        return ops
    w = weyl_operators(d)
    ops = [np.sqrt(max(keep + noise / d**2, 0.0)) * w[0]]
    ops += [np.sqrt(noise) / d * x for x in w[1:]]
    return ops


def depolarizing(d: int, p: float) -> KrausChannel:
    """(1-p) ρ + p Tr(ρ) I/d (noise convention)."""
    _check_prob(p)
    if d < 2:
        raise ChannelError("depolarizing channel needs d >= 2")
    return KrausChannel(tuple(_depolarizing_kraus(d, 1 - p)), f"depolarizing(d={d}, p={p:g})")


def depolarizing_keep(d: int, p: float) -> KrausChannel:
    """p ρ + (1-p) I/d (keep convention)."""
    _check_prob(p)
    if d < 2:
        raise ChannelError("depolarizing channel needs d >= 2")
    return KrausChannel(tuple(_depolarizing_kraus(d, p)), f"depolarizing_keep(d={d}, p={p:g})")


def global_depolarizing(D: int, p: float) -> KrausChannel:
    """p ρ + (1-p) I/D on a d⊗d system, D = d² (keep convention).

    Kraus set {√p I} ∪ {√(1-p)/D · W} over all D² Weyl operators W.
    """
    _check_prob(p)
    d = math.isqrt(D)
    if d * d != D or d < 2:
        raise ChannelError(f"global depolarizing needs D = d² with d >= 2, got D={D}")
    ops = [np.sqrt(p) * np.eye(D, dtype=np.complex128)]
    ops += [np.sqrt(1 - p) / D * w for w in weyl_operators(D)]
    return KrausChannel(tuple(ops), f"global_depolarizing(D={D}, p={p:g})")


def local_depolarizing_pair(p: float) -> KrausChannel:
    """depolarizing_keep(2, p) ⊗ depolarizing_keep(2, p) on 2⊗2."""
    ch = compose_parallel(depolarizing_keep(2, p), depolarizing_keep(2, p))
    return KrausChannel(ch.kraus_ops, f"local_depolarizing_pair(p={p:g})")


def transpose_depolarizing_range(D: int) -> tuple[float, float]:
    return (-1 / (D - 1), 1 / (D + 1))


def transpose_depolarizing(D: int, t: float) -> TransposeDepolarizing:
    lo, hi = transpose_depolarizing_range(D)
    if not lo - 1e-12 <= t <= hi + 1e-12:
        raise ChannelError(f"t={t} outside the CPTP range [{lo:.6g}, {hi:.6g}] for D={D}")
    return TransposeDepolarizing(D, float(t))


def replacer(sigma: DensityOperator, dim_in: int) -> KrausChannel:
    """ρ ↦ Tr(ρ) σ, with Kraus operators √μ |e⟩⟨j| from σ's eigenbasis."""
    w, v = herm_eigh(sigma.matrix)
    ops = []
    for mu, e in zip(w, v.T):
        if mu <= 1e-14:
            continue
        for j in range(dim_in):
            ket = np.zeros(dim_in)
            ket[j] = 1
            ops.append(np.sqrt(mu) * np.outer(e, ket))
    return KrausChannel(tuple(ops), f"replacer(dim_in={dim_in}, rank={int(np.sum(w > 1e-14))})")


def holevo_eb(R_list: Sequence[DensityOperator], F_list: Sequence[np.ndarray], tol: float = 1e-9) -> KrausChannel:
    """Measure-and-prepare channel ρ ↦ Σ_k R_k Tr(F_k ρ)."""
    if len(R_list) != len(F_list) or not R_list:
        raise ChannelError("need equally many (and at least one) states and POVM elements")
    F_list = [as_cmatrix(f) for f in F_list]
    d_in = F_list[0].shape[0]
    total = sum(F_list)
    dev = float(np.max(np.abs(total - np.eye(d_in))))
    if dev > tol:
        raise ChannelError(f"POVM elements sum to I only within {dev:.3e}")
    ops = []
    for r, f in zip(R_list, F_list):
        fw, fv = herm_eigh(f)
        if fw[-1] < -tol:
            raise ChannelError(f"POVM element has negative eigenvalue {fw[-1]:.3e}")
        rw, rv = herm_eigh(r.matrix)
        for a, u in zip(rw, rv.T):
            if a <= 1e-14:
                continue
            for b, v in zip(fw, fv.T):
                if b <= 1e-14:
                    continue
                ops.append(np.sqrt(a * b) * np.outer(u, v.conj()))
    return KrausChannel(tuple(ops), f"holevo_eb(m={len(R_list)})")


def random_channel(dim_in: int, dim_out: int, n_kraus: int, rng: np.random.Generator) -> KrausChannel:
    """Kraus operators cut from a random isometry of shape (dim_out·n_kraus, dim_in)."""
    v = random_isometry(dim_out * n_kraus, dim_in, rng)
    ops = [v[k * dim_out:(k + 1) * dim_out, :] for k in range(n_kraus)]
    return KrausChannel(tuple(ops), f"random({dim_in}->{dim_out}, r={n_kraus})")


def random_povm(d: int, m: int, rng: np.random.Generator) -> list[np.ndarray]:
    v = random_isometry(d * m, d, rng)
    blocks = [v[k * d:(k + 1) * d, :] for k in range(m)]
    return [dagger(b) @ b for b in blocks]


def random_holevo_eb(d_in: int, d_out: int, m: int, rng: np.random.Generator) -> KrausChannel:
    from .states import random_density

    states = [random_density((d_out,), rng) for _ in range(m)]
    return holevo_eb(states, random_povm(d_in, m, rng))


# ---------------------------------------------------------------------------
# channel documents (JSON)


class ChannelParseError(ValueError):
    """Malformed channel or state document; ``where`` names the line or field."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


FAMILIES = ("identity", "depolarizing", "depolarizing_keep", "global_depolarizing", "transpose_depolarizing", "replacer")


def parse_complex_matrix(obj: Any, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ChannelParseError("expected a non-empty list of rows", where)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list):
            raise ChannelParseError("expected a list of [real, imaginary] entries", f"{where}[{i}]")
        vals = []
        for j, entry in enumerate(row):
            vals.append(_parse_complex(entry, f"{where}[{i}][{j}]"))
        rows.append(vals)
    if len({len(r) for r in rows}) != 1:
        raise ChannelParseError("rows have differing lengths", where)
    return np.array(rows, dtype=np.complex128)


def _parse_complex(entry: Any, where: str) -> complex:
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise ChannelParseError(f"expected a [real, imaginary] pair, got {entry!r}", where)


def complex_matrix_to_list(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _require(doc: dict, key: str, kind, where: str = ""):
    if key not in doc:
        raise ChannelParseError(f"missing field '{key}'", where or "document")
    val = doc[key]
    if kind is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    elif kind is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    else:
        ok = isinstance(val, kind)
    if not ok:
        raise ChannelParseError(f"field '{key}' has wrong type {type(val).__name__}", key)
    return val


def channel_from_document(doc: Any):
    """Build a channel from a parsed document (explicit Kraus list or named family)."""
    if not isinstance(doc, dict):
        raise ChannelParseError("top level must be an object")
    if "family" in doc:
        fam = doc["family"]
        if fam not in FAMILIES:
            raise ChannelParseError(f"unknown family {fam!r}; known: {', '.join(FAMILIES)}", "family")
        try:
            if fam == "identity":
                return identity_channel(_require(doc, "d", int))
            if fam == "replacer":
                from .states import InvalidStateError

                sigma = parse_complex_matrix(_require(doc, "sigma", list), "sigma")
                try:
                    sig = DensityOperator(sigma)
                except InvalidStateError as exc:
                    raise ChannelParseError(str(exc), "sigma") from None
                return replacer(sig, _require(doc, "dim_in", int))
            d = _require(doc, "d", int)
            if fam == "transpose_depolarizing":
                return transpose_depolarizing(d, _require(doc, "t", float))
            p = _require(doc, "p", float)
            return {
                "depolarizing": depolarizing,
                "depolarizing_keep": depolarizing_keep,
                "global_depolarizing": global_depolarizing,
            }[fam](d, p)
        except (ChannelError, DimensionError) as exc:
            # well-formed document describing an impossible channel
            raise ChannelError(f"family parameters: {exc}") from None
    dim_in = _require(doc, "dim_in", int)
    dim_out = _require(doc, "dim_out", int)
    kraus = _require(doc, "kraus", list)
    if not kraus:
        raise ChannelParseError("kraus list is empty", "kraus")
    ops = []
    for n, k in enumerate(kraus):
        m = parse_complex_matrix(k, f"kraus[{n}]")
        if m.shape != (dim_out, dim_in):
            raise ChannelParseError(f"shape {m.shape} != (dim_out, dim_in) = {(dim_out, dim_in)}", f"kraus[{n}]")
        ops.append(m)
    return KrausChannel(tuple(ops), str(doc.get("label", "")))


def channel_to_document(channel: KrausChannel) -> dict:
    channel = require_kraus(channel)
    return {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [complex_matrix_to_list(k) for k in channel.kraus_ops],
    }


def read_document(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelParseError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None


def load_channel(path: str | Path):
    return channel_from_document(read_document(path))


def state_from_document(doc: Any) -> DensityOperator:
    """State documents: {"dims": [...], "vector": [[re, im], ...]} or {"dims", "matrix"},
    or named: {"family": "bell"}, {"family": "alpha", "alpha": x}, {"family": "max_entangled", "d": n}.
    """
    from .states import InvalidStateError, alpha_state, max_entangled

    if not isinstance(doc, dict):
        raise ChannelParseError("top level must be an object")
    try:
        if "family" in doc:
            fam = doc["family"]
            if fam == "bell":
                return max_entangled(2)
            if fam == "max_entangled":
                return max_entangled(_require(doc, "d", int))
            if fam == "alpha":
                return alpha_state(float(_require(doc, "alpha", float)))
            raise ChannelParseError(f"unknown state family {fam!r}", "family")
        dims = _require(doc, "dims", list)
        if not all(isinstance(x, int) and x > 0 for x in dims):
            raise ChannelParseError("dims must be positive integers", "dims")
        if "vector" in doc:
            vec = _require(doc, "vector", list)
            v = np.array([_parse_complex(e, f"vector[{i}]") for i, e in enumerate(vec)])
            from .states import pure_state_density

            return pure_state_density(v, tuple(dims))
        m = parse_complex_matrix(_require(doc, "matrix", list), "matrix")
        check_dims(m, dims)
        return DensityOperator(m, tuple(dims))
    except (InvalidStateError, DimensionError) as exc:
        raise ChannelParseError(str(exc), "state") from None


def load_state(path: str | Path) -> DensityOperator:
    return state_from_document(read_document(path))
