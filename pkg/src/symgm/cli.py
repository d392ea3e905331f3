"""``symgm`` command line.

Exit codes: 0 success, 2 bad input, 3 numerical non-convergence,
4 verification failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import constructions as con
from .estimation import (
    RankOnePovm,
    additivity_certificate,
    compatibility_general,
    compatibility_qubit,
    gm_optimize,
    ml_maximize,
)
from .linalg import TOL
from .majorana import half_sphere_check, majorana_extract
from .permanents import DickeCounts, gram, permanent_dicke, permanent_ryser
from .states import build_symmetric, multiset_from_json

EXIT_OK, EXIT_PARSE, EXIT_NONCONVERGED, EXIT_VERIFY = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _cvec(v) -> list:
    return [[float(a.real), float(a.imag)] for a in np.asarray(v, dtype=complex)]


def _cmat(m) -> list:
    return [_cvec(row) for row in np.asarray(m, dtype=complex)]


def _load_state(path: str):
    try:
        text = Path(path).read_text()
        return multiset_from_json(json.loads(text))
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise CliError(f"cannot read state file {path}: {exc}", EXIT_PARSE) from exc


def _gm_key(args) -> str:
    return "gm_nats" if args.nats else "gm_bits"


def _gm_value(args, bits: float) -> float:
    return bits * math.log(2) if args.nats else bits


def _gm_doc(args, res) -> dict:
    return {
        "lambda_sq": res.lambda_sq,
        _gm_key(args): _gm_value(args, res.gm),
        "lower_bound": _gm_value(args, res.lower_bound),
        "saturated": res.saturated,
        "additive": res.additive,
        "witness": _cvec(res.witness),
        "witnesses": [_cvec(w) for w in res.witnesses],
    }


# -- commands -------------------------------------------------------------------


def cmd_perm(args) -> dict:
    if args.dicke is not None:
        c = DickeCounts(*args.dicke, theta=args.theta)
        return {
            "N": c.total,
            "theta": c.theta,
            "perm_A": permanent_dicke(c),
            "perm_A_ryser": permanent_ryser(gram(c.kets(), c.counts)).real,
            "norm_const": math.sqrt(math.factorial(c.total) / permanent_dicke(c)),
        }
    if not args.state:
        raise CliError("perm needs a state file or --dicke counts", EXIT_PARSE)
    s = build_symmetric(_load_state(args.state))
    return {"N": s.N, "dim": s.dim, "perm_A": s.perm_A, "norm_const": s.norm_const}


def cmd_gm(args) -> dict:
    s = build_symmetric(_load_state(args.state))
    res = gm_optimize(s, restarts=args.restarts, seed=args.seed)
    return {"N": s.N, "dim": s.dim, "perm_A": s.perm_A, **_gm_doc(args, res)}


def cmd_dicke(args) -> dict:
    c = DickeCounts(*args.counts, theta=args.theta)
    s = con.dicke_state(c)
    comp = con.dicke_compatibility(c)
    res = gm_optimize(s, restarts=args.restarts, seed=args.seed)
    return {
        "counts": list(c.counts),
        "theta": c.theta,
        "perm_A": permanent_dicke(c),
        "bound": _gm_value(args, con.dicke_gm_bound(c)),
        "compatible": comp.compatible,
        "compat_witness": _cvec(comp.witness) if comp.witness is not None else None,
        **_gm_doc(args, res),
    }


def cmd_mubs(args) -> dict:
    try:
        m = con.build_mubs(args.dim, args.bases)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    if not con.check_mubs(m, tol=args.tol):
        raise CliError("constructed bases are not mutually unbiased", EXIT_VERIFY)
    reps = args.reps or [1] * m.count
    res = con.mub_state_gm(m, reps, restarts=args.restarts, seed=args.seed)
    return {
        "dim": m.dim,
        "bases": m.count,
        "reps": list(reps),
        "unbiased": True,
        **_gm_doc(args, res),
    }


def cmd_sic(args) -> dict:
    if args.dim == 2:
        fid = con.qubit_fiducial()
    elif args.dim == 3:
        fid = con.qutrit_fiducial(args.t)
    else:
        raise CliError("SIC fiducials are built in for d = 2 and 3 only", EXIT_PARSE)
    sic = con.hw_orbit(fid)
    checks = {
        "fiducial": con.verify_fiducial(fid, tol=max(args.tol, 1e-9)),
        "sic": con.verify_sic(sic.kets, tol=max(args.tol, 1e-9)),
        "two_design": con.two_design_check(sic, seed=args.seed),
    }
    if not all(checks.values()):
        raise CliError(f"SIC verification failed: {checks}", EXIT_VERIFY)
    res = con.sic_state_gm(sic, restarts=args.restarts, seed=args.seed)
    doc = {"dim": sic.dim, "checks": checks, "perm_A": con.sic_state(sic).perm_A, **_gm_doc(args, res)}
    if args.dim == 3:
        doc["t"] = args.t
        doc["perm_A_closed"] = con.qutrit_perm_closed(args.t)
        doc["gm_closed"] = _gm_value(args, con.qutrit_gm_closed(args.t))
    return doc


def cmd_sic_scan(args):
    if args.dim != 3:
        raise CliError("the scan covers the d = 3 family only", EXIT_PARSE)
    rows = con.sic_scan_d3(con.default_grid(args.points))
    bad = con.scan_mismatches(rows)
    if args.format == "json":
        doc = {"rows": [{"t": r.t, "perm_A": r.perm_A, "G_bits": r.G_bits} for r in rows]}
        out = json.dumps(doc, indent=2) + "\n"
    else:
        out = con.scan_to_csv(rows)
    if args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    if bad:
        raise CliError("closed-form mismatch at t = " + ", ".join(f"{r.t:.12g}" for r in bad), EXIT_VERIFY)
    return None


def cmd_majorana(args) -> dict:
    ms = _load_state(args.state)
    if ms.dim != 2:
        raise CliError("Majorana representation needs a qubit state", EXIT_PARSE)
    try:
        pts = majorana_extract(build_symmetric(ms))
    except RuntimeError as exc:
        raise CliError(str(exc), EXIT_NONCONVERGED) from exc
    hs = half_sphere_check(pts.points)
    return {
        "N": len(pts.points),
        "points": pts.points.tolist(),
        "round_trip_fidelity": pts.fidelity,
        "half_sphere": hs.inside,
        "half_sphere_witness": hs.witness.tolist() if hs.witness is not None else None,
    }


def cmd_ml(args) -> dict:
    ms = _load_state(args.state)
    res = ml_maximize(RankOnePovm(ms.kets, ms.mults), seed=args.seed)
    doc = {
        "likelihood_max": res.likelihood_max,
        "log_likelihood": res.log_likelihood,
        "purity": res.purity,
        "is_pure_max": res.is_pure_max,
        "converged": res.converged,
        "iterations": res.iterations,
        "residual": res.residual,
        "rho_ml": _cmat(res.rho_ml),
        "pure_maximizer": _cvec(res.pure_maximizer) if res.pure_maximizer is not None else None,
    }
    if args.strict and not res.converged:
        raise CliError("ML iteration did not converge", EXIT_NONCONVERGED)
    return doc


def cmd_compat(args) -> dict:
    if args.freqs is not None:
        comp = compatibility_qubit(args.theta, args.freqs)
    elif args.state:
        ms = _load_state(args.state)
        comp = compatibility_general(
            RankOnePovm(ms.kets, ms.mults), restarts=args.restarts, seed=args.seed, tol=args.compat_tol
        )
    else:
        raise CliError("compat needs a state file or --theta/--freqs", EXIT_PARSE)
    return {
        "compatible": comp.compatible,
        "residual": comp.residual,
        "inconclusive": comp.inconclusive,
        "witness": _cvec(comp.witness) if comp.witness is not None else None,
    }


def cmd_additivity(args) -> dict:
    s = build_symmetric(_load_state(args.state))
    cert = additivity_certificate(s, seed=args.seed, run_all=True)
    return {
        "few_kets": cert.few_kets,
        "half_sphere": cert.half_sphere,
        "ml_pure": cert.ml_pure,
        "certified": cert.certified,
    }


# -- plumbing -----------------------------------------------------------------------


def _emit(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    lines = []
    for k, v in doc.items():
        text = json.dumps(v) if isinstance(v, (list, dict)) else str(v)
        lines.append(f"{k},{text}" if fmt == "csv" else f"{k}: {text}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text", "csv"], default="text")
    common.add_argument("--json", dest="format", action="store_const", const="json", help="same as --format json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--nats", action="store_true", help="report GM in nats instead of bits")
    common.add_argument("--tol", type=float, default=TOL.algebraic, help="verification tolerance")
    common.add_argument("--compat-tol", type=float, default=TOL.compat)

    parser = argparse.ArgumentParser(prog="symgm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perm", parents=[common], help="Gram permanent of a state file or Dicke counts")
    p.add_argument("state", nargs="?")
    p.add_argument("--dicke", type=int, nargs=4, metavar=("N00", "N01", "N10", "N11"))
    p.add_argument("--theta", type=float, default=0.0)
    p.set_defaults(func=cmd_perm)

    p = sub.add_parser("gm", parents=[common], help="geometric measure of a state file")
    p.add_argument("state")
    p.set_defaults(func=cmd_gm)

    p = sub.add_parser("dicke", parents=[common], help="two-basis qubit state")
    p.add_argument("--counts", type=int, nargs=4, required=True, metavar=("N00", "N01", "N10", "N11"))
    p.add_argument("--theta", type=float, required=True)
    p.set_defaults(func=cmd_dicke)

    p = sub.add_parser("mubs", parents=[common], help="MUB-generated state in prime dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--bases", type=int, default=None)
    p.add_argument("--reps", type=int, nargs="+")
    p.set_defaults(func=cmd_mubs)

    p = sub.add_parser("sic", parents=[common], help="SIC-generated state for d = 2 or 3")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--t", type=float, default=0.0, help="qutrit fiducial parameter")
    p.set_defaults(func=cmd_sic)

    p = sub.add_parser("sic-scan", parents=[common], help="GM over the d = 3 fiducial family (CSV)")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--points", type=int, default=con.SCAN_POINTS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sic_scan)

    p = sub.add_parser("majorana", parents=[common], help="Majorana points of a qubit state file")
    p.add_argument("state")
    p.set_defaults(func=cmd_majorana)

    p = sub.add_parser("ml", parents=[common], help="maximum-likelihood state for kets/counts in a file")
    p.add_argument("state")
    p.add_argument("--strict", action="store_true", help="exit 3 when the iteration does not converge")
    p.set_defaults(func=cmd_ml)

    p = sub.add_parser("compat", parents=[common], help="frequency compatibility test")
    p.add_argument("state", nargs="?")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--freqs", type=float, nargs=4, metavar=("F00", "F01", "F10", "F11"))
    p.set_defaults(func=cmd_compat)

    p = sub.add_parser("additivity", parents=[common], help="additivity certificate of a state file")
    p.add_argument("state")
    p.set_defaults(func=cmd_additivity)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = args.func(args)
    except CliError as exc:
        print(f"symgm: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"symgm: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RuntimeError as exc:
        print(f"symgm: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    if doc is not None:
        sys.stdout.write(_emit(doc, args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
