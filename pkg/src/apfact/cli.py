"""Command-line front end.

    apfact --input job.json --command factorize --output text
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import mat2
from .errors import APFactError
from .factorize import (
    Factorization,
    Verdict,
    classify_toeplitz,
    default_solution,
    construct_factorization,
    factorization_problems,
)
from .report import COMMANDS, FORMATS, JobSpec, emit_report, parse_input, parse_symbol
from .rhsolve import verify_solution
from .suite import run_suite
from .symbol import NotInClass, classify, decompose
from .verify import grid_residual, spectrum_sign_audit

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2


def run(job: JobSpec) -> tuple[dict, int]:
    """Execute a job; returns the report and the exit code."""
    report: dict = {"command": job.command}
    if job.symbol is not None:
        report["symbol"] = job.symbol.to_json()
    handler = {
        "classify": _classify,
        "solve": _solve,
        "factorize": _factorize,
        "verify": _verify,
        "suite": _suite,
    }[job.command]
    code = handler(job, report)
    return report, code


def _classify(job: JobSpec, report: dict) -> int:
    sym = job.symbol
    gap = decompose(sym)
    report["gap"] = gap.to_json()
    if gap.has_zero_frequency:
        report["messages"] = ["zero frequency present: one-sided case, no order N"]
        return EXIT_OK
    m = classify(sym)
    if isinstance(m, NotInClass):
        report["classification"] = m.to_json()
        return EXIT_UNKNOWN
    if job.nu_override is not None:
        from .symbol import with_nu
        m = with_nu(m, job.nu_override)
    report["classification"] = m.to_json()
    return EXIT_OK


def _solve(job: JobSpec, report: dict) -> int:
    sol = default_solution(job.symbol, job.nu_override)
    if sol is None:
        report["messages"] = ["no explicit solution formula applies"]
        return EXIT_UNKNOWN
    report["solution"] = sol.to_json()
    rep = verify_solution(job.symbol, sol, points=32, seed=job.seed)
    report["verification"] = rep.to_json()
    return EXIT_OK if rep.passed else EXIT_ERROR


def _factorize(job: JobSpec, report: dict) -> int:
    sym = job.symbol
    v = classify_toeplitz(sym, job.apw_flag)
    report["verdict"] = v.to_json()
    messages = []
    factorable = v.verdict in (Verdict.INVERTIBLE, Verdict.FACTORABLE_NON_CANONICAL)
    if factorable and sym.is_native:
        sol = default_solution(sym, job.nu_override)
        try:
            fac = construct_factorization(sym, sol, job.tol)
        except APFactError as exc:
            messages.append(f"factors not constructed: {type(exc).__name__}: {exc}")
        else:
            report["factorization"] = fac.to_json()
            rep = grid_residual(sym, fac, points=100, seed=job.seed)
            report["verification"] = rep.to_json()
    elif factorable:
        messages.append("declared spectrum: factors are not constructed from truncated data")
    if messages:
        report["messages"] = messages
    return EXIT_UNKNOWN if v.verdict is Verdict.UNKNOWN else EXIT_OK


def _verify(job: JobSpec, report: dict) -> int:
    data = job.payload
    if "factorization" not in data:
        report["messages"] = ["input carries no factorization to verify"]
        return EXIT_ERROR
    fac = Factorization.from_json(data["factorization"])
    sym = job.symbol
    problems = factorization_problems(sym, fac, job.tol)
    rep = grid_residual(sym, fac, points=100, seed=job.seed)
    rep.add("invariants", not problems, "; ".join(problems))
    for side, M in (("plus", fac.G_plus), ("minus", fac.G_minus)):
        for c in spectrum_sign_audit(M, side).checks:
            rep.add(f"G_{side} {c.name}", c.passed, c.detail)
    rep.add("grid residual", rep.max_residual <= max(job.tol, 1e-12) * 100,
            f"{rep.max_residual:.3e}")
    report["factorization"] = fac.to_json()
    report["verification"] = rep.to_json()
    return EXIT_OK if rep.passed else EXIT_ERROR


def _suite(job: JobSpec, report: dict) -> int:
    results = run_suite()
    report["suite"] = [r.to_json() for r in results]
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apfact", description=__doc__.strip().splitlines()[0])
    p.add_argument("--input", metavar="PATH", help="job JSON file ('-' for stdin)")
    p.add_argument("--command", choices=COMMANDS, help="overrides the command in the file")
    p.add_argument("--tol", type=float, default=None, help="tolerance (default 1e-10)")
    p.add_argument("--apw", action="store_true", default=None,
                   help="treat the symbol as absolutely convergent (only-if strength)")
    p.add_argument("--nu", metavar="NUM/DEN", help="override the representation parameter nu")
    p.add_argument("--output", choices=FORMATS, default=None)
    p.add_argument("--seed", type=int, default=None, help="sampling seed")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.output or "json"
    try:
        if args.command == "suite" and args.input is None:
            job = JobSpec("suite", output=fmt)
        else:
            job = parse_input(args.input, command=args.command, tol=args.tol, apw_flag=args.apw,
                              nu=args.nu, output=args.output, seed=args.seed)
        fmt = job.output
        report, code = run(job)
    except (APFactError, OSError, KeyError) as exc:
        report = {"command": args.command,
                  "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_ERROR
    sys.stdout.buffer.write(emit_report(report, fmt))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
