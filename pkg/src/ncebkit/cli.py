"""ncebkit command line.

Reports are JSON on stdout (or ``--out``); ``--human`` prints a table
instead. Nothing time-dependent is written, so identical commands give
byte-identical output.

Exit codes: 0 success, 1 I/O failure, 2 parse error, 3 invalid channel,
4 non-monotone threshold probe.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .channels import (
    ChannelError,
    ChannelParseError,
    KrausChannel,
    apply_to_B_batch,
    depolarizing,
    depolarizing_keep,
    load_channel,
    load_state,
    validate,
)
from .classify import (
    BISECTION_TOL,
    CLOSED_FORM_TOL,
    FAMILY_NAMES,
    OPTIMIZER_TOL,
    PREDICATE_NAMES,
    NonMonotoneError,
    OptimizerConfig,
    bell_output_ppt,
    channel_coherent_info,
    family,
    is_eb,
    is_mib,
    is_ncea,
    is_nceb,
    is_ppt_channel,
    predicate,
    threshold,
)
from .dilation import leak_report
from .entropy import conditional_entropy_batch
from .states import alpha_vector, bell_basis_vector, tetrahedron_points

EXIT_OK, EXIT_IO, EXIT_PARSE, EXIT_INVALID, EXIT_NONMONOTONE = 0, 1, 2, 3, 4

ALPHA_HEADER = ("alpha", "p", "cond_entropy")
TETRA_HEADER = ("c1", "c2", "c3", "S_before", "S_after")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    """12 significant digits, with negative zero printed as 0."""
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def json_text(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc.strerror}", EXIT_IO) from None


def _config(args) -> OptimizerConfig:
    return OptimizerConfig(restarts=args.budget, seed=args.seed, covariant=args.covariant)


def _load_channel(path: str):
    try:
        ch = load_channel(path)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file", EXIT_PARSE) from None
    except ChannelParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE) from None
    except ChannelError as exc:
        raise CliError(f"invalid channel: {exc}", EXIT_INVALID) from None
    check = validate(ch)
    if not check.ok:
        raise CliError(
            f"invalid channel: completeness violated by {check.violation:.3e} (tolerance {check.tolerance:.0e})",
            EXIT_INVALID,
        )
    return ch


def _load_state(path: str):
    try:
        return load_state(path)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file", EXIT_PARSE) from None
    except ChannelParseError as exc:
        raise CliError(f"parse error: {exc}", EXIT_PARSE) from None


def _default_partition(dim_out: int) -> tuple[int, int] | None:
    r = math.isqrt(dim_out)
    return (r, r) if r > 1 and r * r == dim_out else None


def _header() -> dict:
    return {"tool": "ncebkit", "version": __version__}


# ---------------------------------------------------------------------------
# classify


def classify_report(ch, config: OptimizerConfig, partition: tuple[int, int] | None) -> dict:
    is_kraus = isinstance(ch, KrausChannel)
    verdicts = {
        "ppt": is_ppt_channel(ch).to_dict(),
        "eb": is_eb(ch).to_dict(),
        "mib": is_mib(ch).to_dict(),
        "nceb": is_nceb(ch, config).to_dict(),
    }
    if partition is not None:
        verdicts["ncea"] = is_ncea(ch, partition, config).to_dict()
        verdicts["bell_output_ppt"] = bell_output_ppt(ch, partition).to_dict()
    else:
        verdicts["ncea"] = {"status": "not applicable", "reason": "output dimension has no d x d partition"}
    q = channel_coherent_info(ch, config)
    return {
        **_header(),
        "channel": {
            "description": ch.describe(),
            "dim_in": ch.dim_in,
            "dim_out": ch.dim_out,
            "n_kraus": ch.n_kraus if is_kraus else None,
            "partition": list(partition) if partition else None,
        },
        "verdicts": verdicts,
        "coherent_info": q.to_dict(),
        "tolerances": {"closed_form": CLOSED_FORM_TOL, "optimizer": OPTIMIZER_TOL},
        "optimizer": config.budget() | {"covariant": config.covariant},
    }


def _human_classify(doc: dict) -> str:
    lines = [f"channel   {doc['channel']['description']}  ({doc['channel']['dim_in']} -> {doc['channel']['dim_out']})"]
    for key, v in doc["verdicts"].items():
        route = v.get("certificate", {}).get("route", "")
        lines.append(f"{key:<16}{v['status']:<16}{route}")
    q = doc["coherent_info"]
    lines.append(f"{'Q estimate':<16}{q['value']:.6f}  ({q['route']})")
    return "\n".join(lines) + "\n"


def cmd_classify(args) -> int:
    ch = _load_channel(args.channel)
    partition = tuple(args.partition) if args.partition else _default_partition(ch.dim_out)
    doc = classify_report(ch, _config(args), partition)
    emit(_human_classify(doc) if args.human else json_text(doc), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep


SWEEP_FAMILIES = {"depolarizing": depolarizing, "depolarizing_keep": depolarizing_keep}


def sweep_rows(fam: str, alphas: np.ndarray, ps: np.ndarray) -> list[tuple[float, float, float]]:
    """S(A|B̃) for (id ⊗ N_p)(|ψ_α⟩⟨ψ_α|); rows ordered α-major, p-minor."""
    build = SWEEP_FAMILIES[fam]
    vecs = np.stack([alpha_vector(a) for a in alphas])
    rho = np.einsum("ni,nj->nij", vecs, vecs.conj())
    values = np.empty((len(alphas), len(ps)))
    for j, p in enumerate(ps):
        values[:, j] = conditional_entropy_batch(apply_to_B_batch(build(2, float(p)), rho, 2), (2, 2))
    return [(float(a), float(p), float(values[i, j])) for i, a in enumerate(alphas) for j, p in enumerate(ps)]


def cmd_sweep(args) -> int:
    if args.family not in SWEEP_FAMILIES:
        raise CliError(f"sweep supports families {sorted(SWEEP_FAMILIES)}", EXIT_PARSE)
    if args.d != 2:
        raise CliError("the alpha family lives on 2x2; use --d 2", EXIT_PARSE)
    if not (0 <= args.p_from <= 1 and 0 <= args.p_to <= 1) or args.p_steps < 1 or args.alpha_steps < 1:
        raise CliError("p range must lie in [0, 1] and step counts must be positive", EXIT_PARSE)
    alphas = np.linspace(args.alpha_from, args.alpha_to, args.alpha_steps)
    ps = np.linspace(args.p_from, args.p_to, args.p_steps)
    emit(csv_text(ALPHA_HEADER, sweep_rows(args.family, alphas, ps)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# belltetra


def bell_diagonal_batch(points: np.ndarray) -> np.ndarray:
    """Stack of Bell-diagonal matrices for rows (c1, c2, c3) of ``points``."""
    c1, c2, c3 = points.T
    mats = np.zeros((len(points), 4, 4), dtype=np.complex128)
    for m in (0, 1):
        for n in (0, 1):
            sm, sn = (-1) ** m, (-1) ** n
            w = 0.25 * (1 + sm * c1 - sm * sn * c2 + sn * c3)
            v = bell_basis_vector(m, n)
            mats += np.clip(w, 0.0, None)[:, None, None] * np.outer(v, v.conj())
    return mats


def belltetra_rows(p: float, samples: int, seed: int, chunk: int = 20000) -> list[tuple[float, ...]]:
    points = tetrahedron_points(samples, seed)
    channel = depolarizing(2, p)
    rows = []
    for start in range(0, len(points), chunk):
        pts = points[start:start + chunk]
        rho = bell_diagonal_batch(pts)
        before = conditional_entropy_batch(rho, (2, 2))
        after = conditional_entropy_batch(apply_to_B_batch(channel, rho, 2), (2, 2))
        rows.extend(zip(*pts.T.tolist(), before.tolist(), after.tolist()))
    return rows


def cmd_belltetra(args) -> int:
    if not 0 <= args.p <= 1:
        raise CliError("--p must lie in [0, 1]", EXIT_PARSE)
    if args.samples < 1:
        raise CliError("--samples must be positive", EXIT_PARSE)
    emit(csv_text(TETRA_HEADER, belltetra_rows(args.p, args.samples, args.seed)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# threshold


def cmd_threshold(args) -> int:
    try:
        fam = family(args.family, args.d)
        pred = predicate(args.predicate, fam, _config(args))
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None
    try:
        res = threshold(fam, pred, args.lo, args.hi, tol=args.tol)
    except NonMonotoneError as exc:
        raise CliError(f"non-monotone probe: {exc}", EXIT_NONMONOTONE) from None
    if args.human:
        text = f"{res.value:.6f}  {args.family} {args.predicate}  [{res.convention}]\n"
    else:
        text = json_text({
            **_header(),
            "family": args.family,
            "d": args.d,
            "predicate": args.predicate,
            "threshold": round(res.value, 6),
            "threshold_raw": res.value,
            "holds_above": res.holds_above,
            "convention": res.convention,
            "tolerance": res.tol,
            "probes": [{"x": x, "passes": ok} for x, ok in res.probes],
        })
    emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# leak


def cmd_leak(args) -> int:
    ch = _load_channel(args.channel)
    if not isinstance(ch, KrausChannel):
        raise CliError("leak needs a channel with Kraus operators", EXIT_INVALID)
    rho = _load_state(args.state)
    if len(rho.dims) != 2 or rho.dims[1] != ch.dim_in:
        raise CliError(f"state dims {list(rho.dims)} do not end in channel input dim {ch.dim_in}", EXIT_PARSE)
    if not rho.is_pure() and not args.purify:
        raise CliError("state is mixed; pass --purify to fold a purifying reference into A", EXIT_PARSE)
    rep = leak_report(ch, rho)
    nceb = is_nceb(ch, _config(args))
    doc = {
        **_header(),
        "channel": ch.describe(),
        "S_A_given_Bout": rep.S_cond_AB_out,
        "S_A_given_E": rep.S_cond_AE,
        "I_A_Bout": rep.I_A_Bout,
        "I_A_E": rep.I_A_E,
        "duality_gap": rep.duality_gap,
        "purification_dim": rep.purification_dim,
        "nceb": nceb.status,
        "leak_inequality": {
            "statement": "I(A;Bout) <= I(A;E)",
            "applicable": nceb.passes,
            "holds": rep.leaks_more_to_environment,
        },
        "tolerance": 1e-9,
    }
    if args.human:
        ineq = doc["leak_inequality"]
        verdict = ("holds" if ineq["holds"] else "fails") if ineq["applicable"] else "not applicable (channel not NCEB)"
        lines = [
            f"S(A|Bout) {rep.S_cond_AB_out:+.6f}",
            f"S(A|E)    {rep.S_cond_AE:+.6f}",
            f"I(A;Bout) {rep.I_A_Bout:.6f}",
            f"I(A;E)    {rep.I_A_E:.6f}",
            f"I(A;Bout) <= I(A;E): {verdict}",
        ]
        text = "\n".join(lines) + "\n"
    else:
        text = json_text(doc)
    emit(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ncebkit", description="Entropy-breaking channel toolkit.")
    parser.add_argument("--version", action="version", version=f"ncebkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, optimizer=True):
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--human", action="store_true", help="tabular text instead of JSON")
        if optimizer:
            sp.add_argument("--budget", type=int, default=32, help="optimizer restarts")
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--covariant", action="store_true",
                            help="decide depolarizing-form channels by the Bell input alone")

    sp = sub.add_parser("classify", help="PPT / EB / MIB / NCEB / NCEA verdicts for a channel file")
    sp.add_argument("--channel", required=True)
    sp.add_argument("--partition", type=int, nargs=2, metavar=("D1", "D2"),
                    help="output split for the NCEA test (default: d x d when dim_out is square)")
    common(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("sweep", help="alpha-state conditional entropy grid as CSV")
    sp.add_argument("--family", default="depolarizing", choices=sorted(SWEEP_FAMILIES))
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--p-from", type=float, default=0.0)
    sp.add_argument("--p-to", type=float, default=1.0)
    sp.add_argument("--p-steps", type=int, default=101)
    sp.add_argument("--alpha-from", type=float, default=0.0)
    sp.add_argument("--alpha-to", type=float, default=math.pi)
    sp.add_argument("--alpha-steps", type=int, default=181)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("belltetra", help="Bell-diagonal samples before and after qubit depolarizing, as CSV")
    sp.add_argument("--p", type=float, default=0.5, help="noise weight of depolarizing(2, p)")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_belltetra)

    sp = sub.add_parser("threshold", help="boundary parameter of a predicate on a channel family")
    sp.add_argument("family", choices=FAMILY_NAMES)
    sp.add_argument("predicate", choices=PREDICATE_NAMES)
    sp.add_argument("--d", type=int, default=2, help="local dimension")
    sp.add_argument("--lo", type=float)
    sp.add_argument("--hi", type=float)
    sp.add_argument("--tol", type=float, default=BISECTION_TOL)
    common(sp)
    sp.set_defaults(func=cmd_threshold)

    sp = sub.add_parser("leak", help="entropic audit of A against channel output and environment")
    sp.add_argument("--channel", required=True)
    sp.add_argument("--state", required=True)
    sp.add_argument("--purify", action="store_true", help="accept mixed states by purifying them")
    common(sp)
    sp.set_defaults(func=cmd_leak)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"ncebkit {args.command}: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
