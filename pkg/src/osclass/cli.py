"""Batch command-line front end.

Every subcommand reads JSON inputs, dispatches to the compute modules, and
prints a single machine-readable report with certificates, seeds, and
tolerances.  Exit codes: 0 computed, 2 invalid input, 3 Unknown verdict,
4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import degree1, formulas, io, metric, osdist, unitary
from .errors import CapacityError, InputFormatError, OsclassError
from .opsys import AmplifiedElement, amplified_norm

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_UNKNOWN = 3
EXIT_CAPACITY = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="osclass", description=__doc__)
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker count for parallelizable enumeration (results are schedule-independent)")
    parser.add_argument("--timing", action="store_true",
                        help="include wall time in the report (breaks byte-identical output)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="spectrum of a unitary as sorted circle angles")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("canon", help="canonical necklace of a unitary's spectrum")
    p.add_argument("matrix")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("unitary-cois", help="complete order isomorphism decision for two unitaries")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--oracle", action="store_true", help="use the exact bijection oracle")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--cap", type=int, default=9)

    p = sub.add_parser("deg1", help="degree-1 homeomorphism decision for two point sets")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--cap", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--via-opsys", action="store_true",
                   help="decide through the operator-system function spans")

    p = sub.add_parser("norm", help="amplified norm of an element of M_n(X)")
    p.add_argument("system")
    p.add_argument("--element", required=True)
    p.add_argument("--level", type=int, default=None)

    p = sub.add_parser("osdist", help="weighted distance estimate between two systems")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--levels", type=int, default=2)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("family", help="classification within a parametrized family")
    p.add_argument("name", choices=["wt"])
    p.add_argument("--variant", choices=["3x3", "2x2"], default="3x3")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=128)

    p = sub.add_parser("gh-dist", help="brute-force weighted distance between structures")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--cap", type=int, default=6)

    p = sub.add_parser("gh-theory", help="universal-theory fingerprint of a structure")
    p.add_argument("structure")
    p.add_argument("--depth", type=int, default=3)

    p = sub.add_parser("verify", help="re-run a report's command and replay its certificates")
    p.add_argument("report")

    return parser


def _decision_payload(dec: unitary.CoisDecision) -> dict:
    return {"verdict": dec.verdict, "method": dec.method, "certificate": dec.certificate}


def _cmd_spectrum(args) -> tuple[dict, int]:
    s = unitary.spectrum(io.parse_matrix(io.load_json(args.matrix)), tol=args.tol)
    return {"angles": list(s.angles), "size": s.size, "tolerances": {"tol": args.tol}}, EXIT_OK


def _cmd_canon(args) -> tuple[dict, int]:
    s = unitary.spectrum(io.parse_matrix(io.load_json(args.matrix)), tol=args.tol)
    neck = unitary.canonical_form(s)
    return {
        "gaps": list(neck.gaps),
        "reflected": neck.reflected,
        "size": s.size,
        "tolerances": {"tol": args.tol},
    }, EXIT_OK


def _cmd_unitary_cois(args) -> tuple[dict, int]:
    u = io.parse_matrix(io.load_json(args.left))
    v = io.parse_matrix(io.load_json(args.right))
    dec = unitary.cois_unitary_theorem(u, v, tol=args.tol)
    if dec.verdict == "Unknown" and args.oracle:
        dec = unitary.cois_unitary_oracle(u, v, tol=args.tol, cap=args.cap)
    payload = _decision_payload(dec)
    payload["tolerances"] = {"tol": args.tol, "cap": args.cap}
    if dec.verdict == "NotIsomorphic" and dec.method == "oracle":
        try:
            payload["obstruction"] = unitary.four_point_obstruction(u, v, tol=args.tol)
        except OsclassError:
            pass
    return payload, EXIT_UNKNOWN if dec.verdict == "Unknown" else EXIT_OK


def _cmd_deg1(args) -> tuple[dict, int]:
    d = io.parse_point_set(io.load_json(args.left))
    e = io.parse_point_set(io.load_json(args.right))
    decide = degree1.deg1_via_opsys if args.via_opsys else degree1.degree_one_homeomorphic
    dec = decide(d, e, tol=args.tol, cap=args.cap)
    witness = None
    if dec.witness is not None:
        witness = dict(dec.witness)
        for key in ("forward", "backward"):
            if key in witness and isinstance(witness[key], degree1.DegreeOneMap):
                witness[key] = {"ambient": witness[key].ambient, "coeffs": witness[key].coeffs}
    return {
        "homeomorphic": dec.homeomorphic,
        "witness": witness,
        "tried": dec.tried,
        "tolerances": {"tol": args.tol, "cap": args.cap},
    }, EXIT_OK


def _cmd_norm(args) -> tuple[dict, int]:
    system = io.parse_system(io.load_json(args.system))
    obj = io.load_json(args.element)
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise InputFormatError('element file needs a "coeffs" key')
    coeffs = np.array(
        [[[io.parse_complex(c) for c in vecs] for vecs in row] for row in obj["coeffs"]],
        dtype=np.complex128,
    )
    level = int(obj.get("level", coeffs.shape[0]))
    if args.level is not None and args.level != level:
        raise InputFormatError(f"--level {args.level} does not match element level {level}")
    value = amplified_norm(system, AmplifiedElement(level=level, coeffs=coeffs))
    return {"norm": value, "level": level, "system_dim": system.dim}, EXIT_OK


def _cmd_osdist(args) -> tuple[dict, int]:
    x = io.parse_system(io.load_json(args.left))
    y = io.parse_system(io.load_json(args.right))
    report = osdist.dgh_weighted(x, y, n_max=args.levels, restarts=args.restarts, seed=args.seed)
    return {
        "weighted": report.weighted,
        "per_level": [
            {"level": r["level"], "estimate": r["estimate"], "map": r["map"],
             "restarts": r["restarts"]}
            for r in report.per_level
        ],
        "seed": args.seed,
        "note": "best-found estimates, not certified bounds",
    }, EXIT_OK


def _cmd_family(args) -> tuple[dict, int]:
    variant = "three_by_three" if args.variant == "3x3" else "two_by_two"
    dec = osdist.wt_classify(args.t, args.s, variant, restarts=args.restarts, seed=args.seed)
    payload = _decision_payload(dec)
    payload.update({"t": args.t, "s": args.s, "variant": args.variant, "seed": args.seed})
    return payload, EXIT_UNKNOWN if dec.verdict == "Unknown" else EXIT_OK


def _cmd_gh_dist(args) -> tuple[dict, int]:
    m = io.parse_structure(io.load_json(args.left))
    n = io.parse_structure(io.load_json(args.right))
    per_level = {
        str(k): metric.dk_bruteforce(m, n, k, cap=args.cap) for k in range(1, args.kmax + 1)
    }
    value = sum(2.0 ** (-int(k)) * v for k, v in per_level.items())
    return {"distance": value, "per_level": per_level,
            "tolerances": {"kmax": args.kmax, "cap": args.cap}}, EXIT_OK


def _cmd_gh_theory(args) -> tuple[dict, int]:
    m = io.parse_structure(io.load_json(args.structure))
    fp = formulas.universal_fingerprint(m, depth=args.depth)
    return {"fingerprint": list(fp), "depth": args.depth, "length": int(fp.size)}, EXIT_OK


def _replay_certificates(report: dict, argv: list) -> list:
    """Re-check the replayable residuals embedded in a report."""
    checks = []
    cert = report.get("certificate")
    if report.get("verdict") == "Isomorphic" and isinstance(cert, dict) and "bijection" in cert:
        u = io.parse_matrix(io.load_json(argv[argv.index("unitary-cois") + 1]))
        v = io.parse_matrix(io.load_json(argv[argv.index("unitary-cois") + 2]))
        zs = unitary.spectrum(u).points()
        ws = unitary.spectrum(v).points()
        perm = np.array([int(i) for i in cert["bijection"]])
        coeffs = np.array([complex(c[0], c[1]) for c in cert["forward_coeffs"]])
        predicted = coeffs[0] + coeffs[1] * zs + coeffs[2] * zs.conj()
        resid = float(np.max(np.abs(predicted - ws[perm])))
        checks.append({"check": "forward span coefficients", "residual": resid,
                       "pass": resid <= 1e-7})
    if report.get("homeomorphic") and isinstance(report.get("witness"), dict):
        w = report["witness"]
        d = io.parse_point_set(io.load_json(argv[argv.index("deg1") + 1]))
        e = io.parse_point_set(io.load_json(argv[argv.index("deg1") + 2]))
        perm = np.array([int(i) for i in w["bijection"]])
        if "forward" in w and w["forward"] is not None:
            coeffs = np.array(
                [[complex(c[0], c[1]) for c in row] for row in w["forward"]["coeffs"]]
            )
            fwd = degree1.DegreeOneMap(ambient=d.ambient, coeffs=coeffs)
            resid = float(np.max(np.abs(fwd.apply(d) - e.points[perm])))
            checks.append({"check": "degree-1 forward map", "residual": resid,
                           "pass": resid <= 1e-7})
    return checks


def _cmd_verify(args) -> tuple[dict, int]:
    import json as _json

    with open(args.report, "r", encoding="utf-8") as fh:
        stored = _json.load(fh)
    argv = [str(a) for a in stored.get("command", [])]
    if not argv:
        raise InputFormatError("report carries no command echo to replay")
    from io import StringIO

    buf = StringIO()
    code = run(argv, stdout=buf)
    fresh = buf.getvalue().strip()
    with open(args.report, "r", encoding="utf-8") as fh:
        original = fh.read().strip()
    identical = fresh == original
    checks = _replay_certificates(stored, argv)
    ok = identical and all(c["pass"] for c in checks)
    return {
        "replay_identical": identical,
        "certificate_checks": checks,
        "verified": ok,
    }, EXIT_OK if ok else EXIT_INVALID


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "canon": _cmd_canon,
    "unitary-cois": _cmd_unitary_cois,
    "deg1": _cmd_deg1,
    "norm": _cmd_norm,
    "osdist": _cmd_osdist,
    "family": _cmd_family,
    "gh-dist": _cmd_gh_dist,
    "gh-theory": _cmd_gh_theory,
    "verify": _cmd_verify,
}


def run(argv=None, stdout=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    start = time.monotonic()
    try:
        payload, code = _HANDLERS[args.command](args)
    except CapacityError as exc:
        payload, code = {"error": {"kind": "capacity", "message": str(exc)}}, EXIT_CAPACITY
    except (OsclassError, OSError) as exc:
        payload, code = {"error": {"kind": type(exc).__name__, "message": str(exc)}}, EXIT_INVALID
    # echo from the subcommand onward: worker/timing settings are runtime
    # details and must not perturb the report bytes
    echo = argv[argv.index(args.command):]
    report = {"command": echo}
    report.update(payload)
    if args.timing:
        report["wall_time_s"] = time.monotonic() - start
    print(io.canonical_report(report), file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
