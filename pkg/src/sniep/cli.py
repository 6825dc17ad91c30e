"""Command-line front end: check / realize / convert / verify / batch.

Exit codes are a stable contract:
  0  member / verification passed
  1  proven non-member / verification failed
  2  inconclusive (search budget exhausted, or a criterion family that
     cannot decide the instance either way)
  3  malformed input

Rationals travel as "p/q" strings everywhere; binary64 appears only
inside matrix files.  The environment variable SNIEP_BUDGET overrides
the default search budget when no --budget flag is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import ctrace, equiv, hcalc, soto
from .errors import BudgetExceededError, NotRealizableError, SniepError
from .fiedler import fiedler_necessary, fiedler_sufficient
from .numkit import (
    DEFAULT_SPECTRUM_TOL,
    DiagonalList,
    Spectrum,
    SymMatrix,
    verify_realization,
)
from .rationals import rat_str, rats
from .soules import SoulesSpec, soules_diag_exact_raw, soules_realize

EXIT_MEMBER = 0
EXIT_NONMEMBER = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT_ERROR = 3


def _default_budget() -> int:
    env = os.environ.get("SNIEP_BUDGET")
    return int(env) if env else hcalc.DEFAULT_SEARCH_BUDGET


def _parse_list(text: str) -> tuple:
    return rats(v for v in text.split(",") if v.strip())


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _sigma_diag(args) -> tuple[Spectrum, Optional[DiagonalList]]:
    if getattr(args, "input", None):
        doc = _load_json(args.input)
        sigma = Spectrum(rats(doc["sigma"]))
        diag = DiagonalList(rats(doc["diag"])) if "diag" in doc else None
    else:
        if not getattr(args, "sigma", None):
            raise ValueError("provide --sigma or --input")
        sigma = Spectrum(_parse_list(args.sigma))
        diag = DiagonalList(_parse_list(args.diag)) if getattr(args, "diag", None) else None
    return sigma, diag


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ----------------------------------------------------------------- check


def cmd_check(args) -> int:
    kind = args.kind
    budget = args.budget if args.budget else _default_budget()
    if kind == "c":
        trace = ctrace.CTrace.from_json(_load_json(args.input))
        res = ctrace.replay_trace(trace)
        doc = {"command": "check", "kind": "c", "member": res.ok}
        if res.ok:
            doc["final"] = res.final.to_json()
        else:
            doc["error_step"] = res.error_step
            doc["message"] = res.message
        _emit(doc, args.out)
        return EXIT_MEMBER if res.ok else EXIT_NONMEMBER

    sigma, diag = _sigma_diag(args)
    if kind == "fiedler":
        if diag is None:
            raise ValueError("check fiedler needs a diagonal")
        nec = fiedler_necessary(sigma, diag)
        suf = fiedler_sufficient(sigma, diag)
        doc = {
            "command": "check",
            "kind": "fiedler",
            "necessary_ok": nec.necessary_ok,
            "sufficient_ok": suf.sufficient_ok,
            "necessary_violated": nec.first_violated,
            "sufficient_violated": suf.first_violated,
        }
        _emit(doc, args.out)
        if suf.sufficient_ok:
            return EXIT_MEMBER
        if not nec.necessary_ok:
            return EXIT_NONMEMBER
        return EXIT_INCONCLUSIVE
    if kind == "h":
        if diag is None:
            raise ValueError("check h needs a diagonal")
        try:
            cert = hcalc.search_with_diag(sigma, diag, budget)
        except BudgetExceededError as exc:
            _emit({"command": "check", "kind": "h", "inconclusive": str(exc)}, args.out)
            return EXIT_INCONCLUSIVE
        doc = {"command": "check", "kind": "h", "member": cert is not None}
        if cert is not None:
            doc["certificate"] = hcalc.cert_to_json(cert)
        _emit(doc, args.out)
        return EXIT_MEMBER if cert is not None else EXIT_NONMEMBER
    if kind == "s1":
        ok, slack = soto.s1_check(sigma)
        _emit(
            {"command": "check", "kind": "s1", "member": ok, "slack": rat_str(slack)},
            args.out,
        )
        return EXIT_MEMBER if ok else EXIT_NONMEMBER
    if kind == "sp":
        max_p = args.max_p if args.max_p else sigma.n
        tail = sigma.values[1:]
        if sigma.total < 0 or (tail and sigma.perron < -tail[-1]):
            _emit(
                {"command": "check", "kind": "sp", "member": False,
                 "reason": "violates necessary conditions for realisability"},
                args.out,
            )
            return EXIT_NONMEMBER
        try:
            for p in range(1, max_p + 1):
                cert = soto.sp_check(sigma, p, budget)
                if cert is not None:
                    _emit(
                        {"command": "check", "kind": "sp", "member": True, "p": p,
                         "certificate": cert.to_json()},
                        args.out,
                    )
                    return EXIT_MEMBER
        except BudgetExceededError as exc:
            _emit({"command": "check", "kind": "sp", "inconclusive": str(exc)}, args.out)
            return EXIT_INCONCLUSIVE
        _emit(
            {"command": "check", "kind": "sp", "inconclusive":
             f"no certificate up to p = {max_p}; higher levels not explored"},
            args.out,
        )
        return EXIT_INCONCLUSIVE
    raise ValueError(f"unknown check kind {kind!r}")


# ---------------------------------------------------------------- realize


def cmd_realize(args) -> int:
    budget = args.budget if args.budget else _default_budget()
    if args.method == "h":
        sigma, diag = _sigma_diag(args)
        if diag is None:
            raise ValueError("realize h needs a diagonal")
        try:
            cert = hcalc.search_with_diag(sigma, diag, budget)
        except BudgetExceededError as exc:
            _emit({"command": "realize", "inconclusive": str(exc)}, args.out)
            return EXIT_INCONCLUSIVE
        if cert is None:
            _emit({"command": "realize", "member": False}, args.out)
            return EXIT_NONMEMBER
        doc = {"command": "realize", "member": True,
               "certificate": hcalc.cert_to_json(cert)}
        if not args.exact_only:
            matrix = hcalc.materialize(cert)
            report = verify_realization(matrix, sigma, diag, tol=args.tol)
            doc["matrix"] = matrix.to_json()
            doc["report"] = report.to_json()
            if not report.passed:
                _emit(doc, args.out)
                return EXIT_NONMEMBER
        _emit(doc, args.out)
        return EXIT_MEMBER
    if args.method == "soules":
        doc_in = _load_json(args.input)
        spec = SoulesSpec.from_json(doc_in)
        sigma = Spectrum(rats(doc_in["sigma"]))
        exact = soules_diag_exact_raw(spec, sigma)
        if any(v < 0 for v in exact):
            _emit({"command": "realize", "member": False,
                   "reason": "exact diagonal has negative entries"}, args.out)
            return EXIT_NONMEMBER
        doc = {"command": "realize", "member": True,
               "exact_diag": [rat_str(v) for v in exact]}
        if not args.exact_only:
            matrix, _ = soules_realize(spec, sigma)
            report = verify_realization(
                matrix, sigma, DiagonalList(exact), tol=args.tol
            )
            doc["matrix"] = matrix.to_json()
            doc["report"] = report.to_json()
            if not report.passed:
                _emit(doc, args.out)
                return EXIT_NONMEMBER
        _emit(doc, args.out)
        return EXIT_MEMBER
    raise ValueError(f"unknown realize method {args.method!r}")


# ---------------------------------------------------------------- convert


def cmd_convert(args) -> int:
    pair = (args.source, args.target)
    doc_in = _load_json(args.input)
    if pair == ("c", "h"):
        trace = ctrace.CTrace.from_json(doc_in)
        if ctrace.validate_trace(trace) is None:
            raise ValueError("source trace is illegal")
        cert = ctrace.c_to_h(trace)
        out = {"command": "convert", "from": "c", "to": "h",
               "certificate": hcalc.cert_to_json(cert)}
    elif pair == ("h", "sp"):
        cert = hcalc.cert_from_json(doc_in)
        if not hcalc.validate_certificate(cert):
            raise ValueError("source certificate is invalid")
        sp = soto.h_to_sp(cert)
        out = {"command": "convert", "from": "h", "to": "sp",
               "certificate": sp.to_json()}
    elif pair == ("sp", "c"):
        sp = soto.SotoCertificate.from_json(doc_in)
        if not soto.sp_validate(sp):
            raise ValueError("source certificate is invalid")
        trace = ctrace.sp_to_c(sp)
        out = {"command": "convert", "from": "sp", "to": "c",
               "trace": trace.to_json()}
    elif pair == ("h", "soules"):
        cert = hcalc.cert_from_json(doc_in)
        if not hcalc.validate_certificate(cert):
            raise ValueError("source certificate is invalid")
        sigma = hcalc.spectrum_of(cert)
        diag = hcalc.diag_of(cert)
        try:
            real = equiv.h_star_to_soules(sigma, diag, cert)
        except NotRealizableError as exc:
            _emit({"command": "convert", "error": str(exc)}, args.out)
            return EXIT_NONMEMBER
        out = {"command": "convert", "from": "h", "to": "soules",
               "realization": real.to_json()}
    elif pair == ("soules", "h"):
        real = equiv.SoulesRealization.from_json(doc_in)
        cert = equiv.soules_to_h(real)
        out = {"command": "convert", "from": "soules", "to": "h",
               "certificate": hcalc.cert_to_json(cert)}
    else:
        raise ValueError(f"unsupported conversion {args.source} -> {args.target}")
    _emit(out, args.out)
    return EXIT_MEMBER


# ----------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    matrix = SymMatrix.from_json(_load_json(args.matrix))
    sigma, diag = _sigma_diag(args)
    report = verify_realization(matrix, sigma, diag, tol=args.tol)
    _emit({"command": "verify", "report": report.to_json()}, args.out)
    return EXIT_MEMBER if report.passed else EXIT_NONMEMBER


# ------------------------------------------------------------------ batch


def cmd_batch(args) -> int:
    jobs = _load_json(args.jobs)
    if not isinstance(jobs, list):
        raise ValueError("batch input must be a JSON array of job objects")
    results = []
    for i, job in enumerate(jobs):
        argv = list(job.get("argv", []))
        code, captured = _run_captured(argv)
        results.append({"job": i, "exit": code, "output": captured})
    _emit({"command": "batch", "results": results}, args.out)
    return EXIT_MEMBER


def _run_captured(argv: list[str]) -> tuple[int, Optional[dict]]:
    import io
    from contextlib import redirect_stdout

    buf = io.StringIO()
    try:
        with redirect_stdout(buf):
            code = main(argv)
    except SystemExit as exc:  # argparse errors
        return EXIT_INPUT_ERROR, {"error": f"bad arguments: {exc}"}
    text = buf.getvalue().strip()
    try:
        return code, json.loads(text) if text else None
    except json.JSONDecodeError:
        return code, {"raw": text}


# ------------------------------------------------------------------- main


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sniep",
        description="Constructive checks, certificates and realising matrices "
        "for symmetric nonnegative inverse eigenvalue instances.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_diag=True):
        p.add_argument("--sigma", help='comma-separated rationals, e.g. "7,5,-2,-4,-6"')
        if with_diag:
            p.add_argument("--diag", help="comma-separated nonnegative rationals")
        p.add_argument("--input", help="JSON file with sigma/diag (or trace/cert)")
        p.add_argument("--out", help="write the JSON result here instead of stdout")
        p.add_argument("--tol", type=float, default=DEFAULT_SPECTRUM_TOL)
        p.add_argument("--budget", type=int, default=0, help="search budget (nodes/partitions)")

    pc = sub.add_parser("check", help="decide membership for one criterion family")
    pc.add_argument("kind", choices=["fiedler", "h", "s1", "sp", "c"])
    common(pc)
    pc.add_argument("--max-p", dest="max_p", type=int, default=0,
                    help="largest S_p level to try (default: n)")
    pc.set_defaults(func=cmd_check)

    pr = sub.add_parser("realize", help="produce a verified realising matrix")
    pr.add_argument("method", choices=["h", "soules"])
    common(pr)
    pr.add_argument("--exact-only", action="store_true",
                    help="suppress matrix materialisation")
    pr.set_defaults(func=cmd_realize)

    pv = sub.add_parser("convert", help="convert between certificate kinds")
    pv.add_argument("source", choices=["c", "h", "sp", "soules"])
    pv.add_argument("target", choices=["c", "h", "sp", "soules"])
    pv.add_argument("--input", required=True)
    pv.add_argument("--out")
    pv.set_defaults(func=cmd_convert)

    pf = sub.add_parser("verify", help="check a matrix against a spectrum/diagonal")
    pf.add_argument("--matrix", required=True)
    common(pf)
    pf.set_defaults(func=cmd_verify)

    pb = sub.add_parser("batch", help="run an array of jobs, never aborting mid-batch")
    pb.add_argument("jobs")
    pb.add_argument("--out")
    pb.set_defaults(func=cmd_batch)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(json.dumps({"inconclusive": str(exc)}))
        return EXIT_INCONCLUSIVE
    except (SniepError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}))
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
