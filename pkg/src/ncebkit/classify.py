"""Channel classification, coherent-information search and threshold location.

Verdicts are tri-state. Closed-form routes (PPT of the Choi state, channels
recognised as depolarizing-form via their Choi state) give exact ``yes`` /
``no`` answers. Everything else goes through a multistart Nelder-Mead search
over pure inputs, which can certify a violation but never membership: a clean
search is reported as ``inconclusive`` with ``certified=True`` and the budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .channels import (
    KrausChannel,
    TransposeDepolarizing,
    choi_matrix,
    depolarizing,
    depolarizing_form,
    depolarizing_keep,
    global_depolarizing,
    local_depolarizing_pair,
    transpose_depolarizing,
    transpose_depolarizing_range,
)
from .entropy import (
    conditional_entropy_matrix,
    isotropic_conditional_entropy,
    alpha_family_analytic,
    mutual_information_matrix,
)
from .qlinalg import (
    DimensionError,
    hermitian_from_params,
    kron,
    partial_trace,
    partial_transpose,
    random_pure_vector,
    trace_norm,
    unitary_from_hermitian,
)
from .states import max_entangled_vector, random_density

CLOSED_FORM_TOL = 1e-9
OPTIMIZER_TOL = 1e-6
BISECTION_TOL = 1e-6

YES, NO, INCONCLUSIVE = "yes", "no", "inconclusive"


def vector_to_list(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


@dataclass
class Verdict:
    status: str
    certificate: dict[str, Any] = field(default_factory=dict)
    tolerance: float = CLOSED_FORM_TOL

    @property
    def passes(self) -> bool:
        """True for ``yes`` and for a clean, budget-certified search."""
        return self.status == YES or (self.status == INCONCLUSIVE and bool(self.certificate.get("certified")))

    def to_dict(self) -> dict[str, Any]:
        return {"status": self.status, "tolerance": self.tolerance, "certificate": self.certificate}


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iter: int = 500
    seed: int = 0
    tol: float = 1e-9
    covariant: bool = False

    def budget(self) -> dict[str, Any]:
        return {"restarts": self.restarts, "max_iter": self.max_iter, "seed": self.seed, "tol": self.tol}


DEFAULT_CONFIG = OptimizerConfig()


# ---------------------------------------------------------------------------
# PPT / EB / MIB


def choi_pt_min_eigenvalue(channel) -> float:
    j = choi_matrix(channel)
    pt = partial_transpose(j, (channel.dim_in, channel.dim_out), 1)
    return float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])


def is_ppt_channel(channel, tol: float = CLOSED_FORM_TOL) -> Verdict:
    lo = choi_pt_min_eigenvalue(channel)
    return Verdict(YES if lo >= -tol else NO, {"choi_pt_min_eigenvalue": lo}, tol)


def is_eb(channel, tol: float = CLOSED_FORM_TOL) -> Verdict:
    """Exact for dim_in·dim_out ≤ 6 (PPT ⇔ separable Choi); otherwise only NPT is decisive."""
    ppt = is_ppt_channel(channel, tol)
    cert = dict(ppt.certificate)
    if ppt.status == NO:
        cert["reason"] = "Choi state has a negative partial transpose"
        return Verdict(NO, cert, tol)
    if channel.dim_in * channel.dim_out <= 6:
        cert["reason"] = "PPT Choi state is separable in dimension <= 6"
        return Verdict(YES, cert, tol)
    cert["reason"] = (
        f"Choi state is PPT, but PPT does not imply separability for "
        f"{channel.dim_in}x{channel.dim_out}"
    )
    return Verdict(INCONCLUSIVE, cert, tol)


def is_mib(channel, tol: float = CLOSED_FORM_TOL) -> Verdict:
    """Zero output mutual information everywhere ⇔ Choi state is I/d ⊗ σ."""
    j = choi_matrix(channel)
    dims = (channel.dim_in, channel.dim_out)
    prod = np.kron(partial_trace(j, dims, [0]), partial_trace(j, dims, [1]))
    dist = trace_norm(j - prod)
    cert = {"choi_product_distance": dist, "choi_mutual_information": mutual_information_matrix(j, dims)}
    return Verdict(YES if dist <= tol else NO, cert, tol)


# ---------------------------------------------------------------------------
# pure-input searches


@dataclass
class SearchResult:
    value: float
    vector: np.ndarray
    evaluations: int
    restarts_run: int
    converged: int
    trace: list[float]


def _schmidt_input(x: np.ndarray, d: int) -> np.ndarray:
    """Σ_i √λ_i |i⟩ ⊗ U|i⟩ with λ ∝ x[:d]² and U = exp(iH(x[d:]))."""
    s = x[:d] ** 2
    tot = s.sum()
    lam = s / tot if tot > 1e-300 else np.full(d, 1 / d)
    u = unitary_from_hermitian(hermitian_from_params(x[d:], d))
    return (np.sqrt(lam)[:, None] * u.T).reshape(-1)


def _vector_input(x: np.ndarray, D: int) -> np.ndarray:
    v = x[:D] + 1j * x[D:]
    n = np.linalg.norm(v)
    if n < 1e-300:
        v = np.zeros(D, dtype=np.complex128)
        v[0] = 1
        return v
    return v / n


def _multistart(objective, start0: np.ndarray, config: OptimizerConfig, stop_below: float | None) -> SearchResult:
    rng = np.random.default_rng(config.seed)
    starts = [start0] + [rng.standard_normal(start0.size) for _ in range(config.restarts - 1)]
    best_val, best_x = math.inf, start0
    evals = converged = 0
    trace = []
    for k, x0 in enumerate(starts):
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxiter": config.max_iter, "xatol": 1e-10, "fatol": config.tol},
        )
        evals += res.nfev
        converged += bool(res.success)
        trace.append(float(res.fun))
        if res.fun < best_val:
            best_val, best_x = float(res.fun), res.x
        if stop_below is not None and best_val < stop_below:
            break
    return SearchResult(best_val, best_x, evals, len(trace), converged, trace)


def min_output_conditional_entropy(channel, config: OptimizerConfig = DEFAULT_CONFIG, stop_below: float | None = None):
    """Minimise S(A|B̃) of (id ⊗ N)(|ψ⟩⟨ψ|) over pure ψ on d_in ⊗ d_in.

    Returns (SearchResult, best input vector).
    """
    d = channel.dim_in

    def objective(x):
        psi = _schmidt_input(x, d)
        return conditional_entropy_matrix(channel.act_on_B_vector(psi, d), (d, channel.dim_out), 1)

    x0 = np.concatenate([np.ones(d), np.zeros(d * d)])
    res = _multistart(objective, x0, config, stop_below)
    return res, _schmidt_input(res.vector, d)


def min_internal_conditional_entropy(
    channel, partition: Sequence[int], config: OptimizerConfig = DEFAULT_CONFIG, stop_below: float | None = None
):
    """Minimise S(B1|B2) of N(|ψ⟩⟨ψ|) over pure ψ on the channel input."""
    D = channel.dim_in
    part = tuple(partition)

    def objective(x):
        psi = _vector_input(x, D)
        return conditional_entropy_matrix(channel.act(np.outer(psi, psi.conj())), part, 1)

    if len(part) == 2 and part[0] == part[1] and part[0] * part[1] == D:
        v0 = max_entangled_vector(part[0])
    else:
        v0 = np.zeros(D, dtype=np.complex128)
        v0[0] = 1
    x0 = np.concatenate([v0.real, v0.imag])
    res = _multistart(objective, x0, config, stop_below)
    return res, _vector_input(res.vector, D)


def bell_input_conditional_entropy(channel) -> float:
    """S(A|B̃) of the Choi state (maximally entangled input)."""
    return conditional_entropy_matrix(choi_matrix(channel), (channel.dim_in, channel.dim_out), 1)


def _is_covariant(channel) -> bool:
    return depolarizing_form(channel) is not None


# ---------------------------------------------------------------------------
# coherent information and NCEB


@dataclass
class CoherentInfo:
    value: float
    argmax: np.ndarray
    exact: bool
    lower_bound: bool
    inconclusive: bool
    evaluations: int
    route: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "route": self.route,
            "exact": self.exact,
            "lower_bound": self.lower_bound,
            "inconclusive": self.inconclusive,
            "evaluations": self.evaluations,
            "argmax": vector_to_list(self.argmax),
        }


def channel_coherent_info(channel, config: OptimizerConfig = DEFAULT_CONFIG) -> CoherentInfo:
    """max over pure inputs of -S(A|B̃); never below 0 (product inputs give 0)."""
    d = channel.dim_in
    product = np.zeros(d * d, dtype=np.complex128)
    product[0] = 1
    if choi_pt_min_eigenvalue(channel) >= -CLOSED_FORM_TOL:
        # PPT channels have zero quantum capacity, which bounds the coherent information
        return CoherentInfo(0.0, product, True, False, False, 0, "ppt_choi")
    if config.covariant:
        phi = max_entangled_vector(d)
        val = -bell_input_conditional_entropy(channel)
        exact = _is_covariant(channel)
        if val > 0:
            return CoherentInfo(val, phi, exact, not exact, False, 1, "covariant_bell_input")
        return CoherentInfo(0.0, product, exact, not exact, False, 1, "covariant_bell_input")
    res, psi = min_output_conditional_entropy(channel, config)
    val = -res.value
    inconclusive = res.converged == 0
    if val <= 0:
        return CoherentInfo(0.0, product, False, True, inconclusive, res.evaluations, "multistart")
    return CoherentInfo(val, psi, False, True, inconclusive, res.evaluations, "multistart")


def is_nceb(channel, config: OptimizerConfig = DEFAULT_CONFIG) -> Verdict:
    """Does id ⊗ N keep every output's S(A|B̃) non-negative?

    Routes, in order: PPT Choi state (zero capacity, hence zero coherent
    information); the Bell input, exact when the channel is depolarizing-form
    and ``config.covariant`` is set; then the multistart search.
    """
    ppt_lo = choi_pt_min_eigenvalue(channel)
    if ppt_lo >= -CLOSED_FORM_TOL:
        return Verdict(YES, {"route": "ppt_choi", "choi_pt_min_eigenvalue": ppt_lo}, CLOSED_FORM_TOL)
    d = channel.dim_in
    phi = max_entangled_vector(d)
    bell = bell_input_conditional_entropy(channel)
    if config.covariant and _is_covariant(channel):
        cert = {"route": "covariant_bell_input", "bell_conditional_entropy": bell}
        if bell >= -CLOSED_FORM_TOL:
            return Verdict(YES, cert, CLOSED_FORM_TOL)
        cert["witness"] = vector_to_list(phi)
        return Verdict(NO, cert, CLOSED_FORM_TOL)
    if bell < -OPTIMIZER_TOL:
        return Verdict(
            NO,
            {"route": "bell_input", "conditional_entropy": bell, "witness": vector_to_list(phi)},
            OPTIMIZER_TOL,
        )
    res, psi = min_output_conditional_entropy(channel, config, stop_below=-OPTIMIZER_TOL)
    cert = {"route": "multistart", "min_conditional_entropy": res.value, "evaluations": res.evaluations,
            "restarts_run": res.restarts_run, "budget": config.budget()}
    if res.value < -OPTIMIZER_TOL:
        cert["witness"] = vector_to_list(psi)
        return Verdict(NO, cert, OPTIMIZER_TOL)
    cert["certified"] = True
    cert["note"] = "no violation found within the search budget"
    return Verdict(INCONCLUSIVE, cert, OPTIMIZER_TOL)


# ---------------------------------------------------------------------------
# NCEA and A-unital


def _square_partition(partition: Sequence[int]) -> int | None:
    part = tuple(partition)
    return part[0] if len(part) == 2 and part[0] == part[1] else None


def is_ncea(channel, partition: Sequence[int], config: OptimizerConfig = DEFAULT_CONFIG) -> Verdict:
    """Does N leave S(B̃1|B̃2) ≥ 0 for every input on B?

    Depolarizing-form and transpose-depolarizing channels on d⊗d are decided
    by the maximally entangled input; other channels are searched over pure
    inputs (sufficient by concavity of conditional entropy).
    """
    part = tuple(int(x) for x in partition)
    if int(np.prod(part)) != channel.dim_out or len(part) != 2:
        raise DimensionError(f"partition {part} does not split output dimension {channel.dim_out}")
    d = _square_partition(part)
    if isinstance(channel, TransposeDepolarizing):
        weight = channel.t
    else:
        weight = depolarizing_form(channel)
    if d is not None and weight is not None:
        val = float(isotropic_conditional_entropy(weight, d))
        cert = {"route": "max_entangled_input", "keep_weight": weight, "conditional_entropy": val}
        if val >= -CLOSED_FORM_TOL:
            return Verdict(YES, cert, CLOSED_FORM_TOL)
        cert["witness"] = vector_to_list(max_entangled_vector(d))
        return Verdict(NO, cert, CLOSED_FORM_TOL)
    res, psi = min_internal_conditional_entropy(channel, part, config, stop_below=-OPTIMIZER_TOL)
    cert = {"route": "multistart", "min_conditional_entropy": res.value, "evaluations": res.evaluations,
            "restarts_run": res.restarts_run, "budget": config.budget()}
    if res.value < -OPTIMIZER_TOL:
        cert["witness"] = vector_to_list(psi)
        return Verdict(NO, cert, OPTIMIZER_TOL)
    cert["certified"] = True
    cert["note"] = "no violation found within the search budget"
    return Verdict(INCONCLUSIVE, cert, OPTIMIZER_TOL)


def _spanning_densities(d: int) -> list[np.ndarray]:
    """d² pure states whose projectors span the Hermitian d×d matrices."""
    out = []
    eye = np.eye(d, dtype=np.complex128)
    for i in range(d):
        out.append(np.outer(eye[i], eye[i]))
        for j in range(i + 1, d):
            for phase in (1, 1j):
                v = (eye[i] + phase * eye[j]) / np.sqrt(2)
                out.append(np.outer(v, v.conj()))
    return out


def is_a_unital(channel, partition: Sequence[int], samples: int = 32, seed: int = 0,
                tol: float = CLOSED_FORM_TOL) -> Verdict:
    """N(I/d_A ⊗ ρ_B) = I/d_A ⊗ σ_B, checked on a spanning set plus random ρ_B.

    The condition is linear in ρ_B, so the spanning set alone already decides it.
    """
    d_a, d_b = (int(x) for x in partition)
    if channel.dim_in != channel.dim_out or channel.dim_in != d_a * d_b:
        raise DimensionError("A-unitality needs a square channel on the declared partition")
    rng = np.random.default_rng(seed)
    tests = _spanning_densities(d_b) + [random_density((d_b,), rng).matrix for _ in range(samples)]
    worst = 0.0
    mixed_a = np.eye(d_a) / d_a
    for rho_b in tests:
        out = channel.act(np.kron(mixed_a, rho_b))
        target = np.kron(mixed_a, partial_trace(out, (d_a, d_b), [1]))
        dev = trace_norm(out - target)
        worst = max(worst, dev)
        if dev > tol:
            return Verdict(NO, {"counterexample_rho_B": [[[float(z.real), float(z.imag)] for z in row]
                                                         for row in rho_b], "trace_distance": dev}, tol)
    return Verdict(YES, {"checked_inputs": len(tests), "spanning_set": True, "max_deviation": worst}, tol)


def bell_output_ppt(channel, partition: Sequence[int], tol: float = CLOSED_FORM_TOL) -> Verdict:
    """PPT of N(|φ⁺⟩⟨φ⁺|) across the internal partition (separability for 2⊗2 and 2⊗3)."""
    d = _square_partition(partition)
    if d is None or d * d != channel.dim_in:
        raise DimensionError("the Bell-output test needs a d⊗d partition of the input")
    phi = max_entangled_vector(d)
    out = channel.act(np.outer(phi, phi.conj()))
    pt = partial_transpose(out, (d, d), 1)
    lo = float(np.linalg.eigvalsh((pt + pt.conj().T) / 2)[0])
    return Verdict(YES if lo >= -tol else NO, {"pt_min_eigenvalue": lo}, tol)


# ---------------------------------------------------------------------------
# families and thresholds


class NonMonotoneError(ValueError):
    """Predicate flips more than once (or never) on the probe grid."""

    def __init__(self, message: str, probes: list[tuple[float, bool]]):
        table = "\n".join(f"  {x:.6f}  {'pass' if ok else 'fail'}" for x, ok in probes)
        super().__init__(f"{message}\n{table}")
        self.probes = probes


@dataclass(frozen=True)
class ChannelFamily:
    name: str
    build: Callable[[float], Any]
    lo: float
    hi: float
    convention: str
    partition: tuple[int, ...] | None = None


def family(name: str, d: int = 2) -> ChannelFamily:
    """Named parametric families. ``d`` is the local dimension."""
    if name == "depolarizing":
        return ChannelFamily(name, lambda p: depolarizing(d, p), 0.0, 1.0,
                             f"noise convention: N(rho) = (1-p) rho + p I/{d}")
    if name == "depolarizing_keep":
        return ChannelFamily(name, lambda p: depolarizing_keep(d, p), 0.0, 1.0,
                             f"keep convention: N(rho) = p rho + (1-p) I/{d}")
    if name == "global_depolarizing":
        D = d * d
        return ChannelFamily(name, lambda p: global_depolarizing(D, p), 0.0, 1.0,
                             f"keep convention: E(rho) = p rho + (1-p) I/{D} on {d}x{d}", (d, d))
    if name == "transpose_depolarizing":
        D = d * d
        lo, hi = transpose_depolarizing_range(D)
        return ChannelFamily(name, lambda t: transpose_depolarizing(D, t), lo, hi,
                             f"Phi(rho) = t rho^T + (1-t) I/{D} on {d}x{d}", (d, d))
    if name == "local_depolarizing_pair":
        if d != 2:
            raise ValueError("local_depolarizing_pair is defined for qubits only")
        return ChannelFamily(name, local_depolarizing_pair, 0.0, 1.0,
                             "keep convention, each qubit: N(rho) = p rho + (1-p) I/2", (2, 2))
    raise ValueError(f"unknown family {name!r}")


FAMILY_NAMES = ("depolarizing", "depolarizing_keep", "global_depolarizing", "transpose_depolarizing",
                "local_depolarizing_pair")
PREDICATE_NAMES = ("is_eb", "is_ppt", "is_mib", "is_nceb", "is_ncea", "bell_output_ppt")


def predicate(name: str, fam: ChannelFamily, config: OptimizerConfig = DEFAULT_CONFIG) -> Callable[[Any], bool]:
    if name == "is_eb":
        return lambda ch: is_eb(ch).passes
    if name == "is_ppt":
        return lambda ch: is_ppt_channel(ch).passes
    if name == "is_mib":
        return lambda ch: is_mib(ch).passes
    if name == "is_nceb":
        return lambda ch: is_nceb(ch, config).passes
    if name in ("is_ncea", "bell_output_ppt"):
        if fam.partition is None:
            raise ValueError(f"{name} needs a family with an internal partition")
        if name == "is_ncea":
            return lambda ch: is_ncea(ch, fam.partition, config).passes
        return lambda ch: bell_output_ppt(ch, fam.partition).passes
    raise ValueError(f"unknown predicate {name!r}")


@dataclass
class ThresholdResult:
    value: float
    holds_above: bool
    convention: str
    probes: list[tuple[float, bool]]
    tol: float

    def describe(self) -> str:
        side = ">=" if self.holds_above else "<="
        return f"{self.value:.6f} (holds for parameter {side} threshold; {self.convention})"


def threshold(fam: ChannelFamily, pred: Callable[[Any], bool], lo: float | None = None,
              hi: float | None = None, tol: float = BISECTION_TOL, probes: int = 21) -> ThresholdResult:
    """Boundary parameter of a predicate that flips exactly once on [lo, hi].

    A probe grid checks monotonicity first; bisection then runs inside the
    bracketing probe cell until its width is below ``tol``.
    """
    lo = fam.lo if lo is None else lo
    hi = fam.hi if hi is None else hi
    xs = np.linspace(lo, hi, probes)
    table = [(float(x), bool(pred(fam.build(float(x))))) for x in xs]
    flips = [i for i in range(probes - 1) if table[i][1] != table[i + 1][1]]
    if len(flips) != 1:
        raise NonMonotoneError(f"predicate flips {len(flips)} times on [{lo}, {hi}]", table)
    i = flips[0]
    a, b = table[i][0], table[i + 1][0]
    val_a = table[i][1]
    while b - a > tol:
        mid = 0.5 * (a + b)
        if pred(fam.build(mid)) == val_a:
            a = mid
        else:
            b = mid
    return ThresholdResult(0.5 * (a + b), holds_above=not val_a, convention=fam.convention, probes=table, tol=tol)


def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-12, max_iter: int = 200) -> float:
    """Root of a continuous f with a sign change on [lo, hi]."""
    fa, fb = f(lo), f(hi)
    if fa == 0:
        return lo
    if fb == 0:
        return hi
    if np.sign(fa) == np.sign(fb):
        raise ValueError(f"no sign change on [{lo}, {hi}]: f={fa:.3e}, {fb:.3e}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if np.sign(fm) == np.sign(fa):
            lo, fa = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def nceb_threshold_depolarizing(d: int = 2, tol: float = 1e-12) -> float:
    """Noise p at which the Bell-input output of depolarizing(d, p) has S(A|B̃) = 0."""
    return bisect_root(lambda p: bell_input_conditional_entropy(depolarizing(d, p)), 0.0, 1.0, tol)


def alpha_nceb_threshold(alpha: float, tol: float = 1e-12) -> float:
    """Smallest noise p with non-negative S(A|B̃) for the depolarized α-state (0 if never negative)."""
    f = lambda p: alpha_family_analytic(alpha, p)  # noqa: E731
    if f(0.0) >= -1e-12:
        return 0.0
    return bisect_root(f, 0.0, 1.0, tol)


def two_local_ncea_threshold(config: OptimizerConfig = DEFAULT_CONFIG, tol: float = 1e-5) -> ThresholdResult:
    """NCEA boundary of the 2-local keep-convention depolarizing pair, by pure-input search."""
    fam = family("local_depolarizing_pair")
    return threshold(fam, predicate("is_ncea", fam, config), 0.5, 1.0, tol=tol, probes=11)


# ---------------------------------------------------------------------------
# distance witness


def choi_distance_lower_bound(n1, n2) -> float:
    """‖J(n1) - J(n2)‖₁ on normalized Choi states; a lower bound on the diamond distance."""
    if (n1.dim_in, n1.dim_out) != (n2.dim_in, n2.dim_out):
        raise DimensionError("channels must share input and output dims")
    return trace_norm(choi_matrix(n1) - choi_matrix(n2))


@dataclass
class WitnessReport:
    detected: bool
    W: float
    nearest_reference: float | None
    coherent_info: CoherentInfo
    reference_family: str = "depolarizing"

    def to_dict(self) -> dict[str, Any]:
        return {
            "status": "detected non-NCEB" if self.detected else "not detected",
            "W": self.W,
            "reference_family": self.reference_family,
            "nearest_reference_p": self.nearest_reference,
            "witness_input": vector_to_list(self.coherent_info.argmax) if self.detected else None,
            "coherent_info": self.coherent_info.value,
        }


def non_nceb_witness(channel, config: OptimizerConfig = DEFAULT_CONFIG) -> WitnessReport:
    """Coherent-information detection plus Choi distance to the NCEB part of the depolarizing family.

    W is the minimum of ‖J(N) - J(depolarizing(d, p))‖₁ over p in [p*, 1],
    with p* the depolarizing NCEB threshold.
    """
    ci = channel_coherent_info(channel, config)
    if ci.value <= OPTIMIZER_TOL:
        return WitnessReport(False, 0.0, None, ci)
    if channel.dim_in != channel.dim_out:
        return WitnessReport(True, float("nan"), None, ci)
    d = channel.dim_in
    p_star = nceb_threshold_depolarizing(d)
    j = choi_matrix(channel)
    phi = max_entangled_vector(d)
    proj = np.outer(phi, phi.conj())
    eye = np.eye(d * d) / (d * d)

    def dist(p):
        return trace_norm(j - ((1 - p) * proj + p * eye))

    res = minimize_scalar(dist, bounds=(p_star, 1.0), method="bounded", options={"xatol": 1e-10})
    cands = [(dist(p_star), p_star), (dist(1.0), 1.0), (float(res.fun), float(res.x))]
    w, p_best = min(cands)
    return WitnessReport(True, float(w), float(p_best), ci)
