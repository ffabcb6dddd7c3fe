"""Job parsing and report emission (JSON, text, CSV)."""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import mat2
from .appoly import APPoly, as_freq, freq_str
from .errors import ParseError, ValidationError
from .symbol import DeclaredSpectrum, TriangularSymbol

COMMANDS = ("classify", "solve", "factorize", "verify", "suite")
FORMATS = ("json", "text", "csv")
CSV_HEADER = ["x", "abs_g_minus", "abs_g_plus", "residual"]


@dataclass
class JobSpec:
    command: str
    symbol: Optional[TriangularSymbol] = None
    tol: float = 1e-10
    apw_flag: bool = False
    nu_override: Optional[Fraction] = None
    output: str = "json"
    seed: int = 0
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.output not in FORMATS:
            raise ValidationError(f"unknown output format {self.output!r}")
        if self.command not in ("suite",) and self.symbol is None:
            raise ValidationError(f"command {self.command!r} needs a symbol")


def _parse_poly(data: Any, where: str) -> APPoly:
    if not isinstance(data, list):
        raise ParseError(f"field {where}: expected a list of terms")
    terms = []
    for k, t in enumerate(data):
        if not isinstance(t, dict) or "freq" not in t:
            raise ParseError(f"field {where}[{k}]: expected an object with 'freq'")
        try:
            f = as_freq(t["freq"])
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ParseError(f"field {where}[{k}].freq: {exc}") from None
        try:
            c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"field {where}[{k}] coefficient: {exc}") from None
        terms.append((f, c))
    return APPoly(terms)


def parse_symbol(data: dict) -> TriangularSymbol:
    if "lambda" not in data:
        raise ParseError("field 'lambda' is missing")
    try:
        lam = as_freq(data["lambda"])
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"field lambda: {exc}") from None
    g = _parse_poly(data.get("g", []), "g")
    dg = data.get("declared_gaps")
    try:
        declared = DeclaredSpectrum.from_json(dg) if dg else None
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"field declared_gaps: {exc}") from None
    return TriangularSymbol(lam, g, declared)


def load_json(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ParseError("line 1: top level must be a JSON object")
    return data


def parse_input(source: Optional[str] = None, **overrides) -> JobSpec:
    """Read a job from a path (``None`` or ``-`` for stdin).

    Command-line options given in ``overrides`` win over those in the file.
    A factorization report (with ``symbol`` and ``factorization`` keys) is
    accepted as input for ``verify``.
    """
    if source is None or source == "-":
        text = sys.stdin.read()
    else:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    return job_from_dict(load_json(text), **overrides)


def job_from_dict(data: dict, **overrides) -> JobSpec:
    opts = dict(data.get("options", {}))
    opts.update({k: v for k, v in overrides.items() if v is not None})
    command = opts.pop("command", None) or data.get("command") or "classify"
    sym_data = data["symbol"] if isinstance(data.get("symbol"), dict) else data
    symbol = parse_symbol(sym_data) if command != "suite" or "lambda" in sym_data else None
    nu = opts.get("nu_override", opts.get("nu"))
    try:
        nu = None if nu is None else as_freq(nu)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"field nu: {exc}") from None
    return JobSpec(
        command=command,
        symbol=symbol,
        tol=float(opts.get("tol", 1e-10)),
        apw_flag=bool(opts.get("apw_flag", opts.get("apw", False))),
        nu_override=nu,
        output=opts.get("output", "json"),
        seed=int(opts.get("seed", 0)),
        payload=data,
    )


def emit_report(report: dict, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(report, indent=2, sort_keys=False) + "\n").encode()
    if fmt == "text":
        return render_text(report).encode()
    if fmt == "csv":
        return render_csv(report).encode()
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(data: bytes) -> dict:
    return json.loads(data.decode())


def render_text(report: dict) -> str:
    lines = [f"command: {report.get('command')}"]
    sym = report.get("symbol")
    if sym:
        g = TriangularSymbol.from_json(sym)
        lines.append(f"symbol: lambda={g.lam}, g={g.g}")
    if "suite" in report:
        for r in report["suite"]:
            lines.append(f"[{'PASS' if r['passed'] else 'FAIL'}] {r['number']:2d} {r['name']}: {r['detail']}")
    if "classification" in report:
        c = report["classification"]
        if c.get("not_in_class"):
            lines.append(f"not in class: {c['reason']}")
        else:
            lines.append(f"order N={c['N']}, nu={c['nu']} in [{c['nu_min']}, {c['nu_max']}], "
                         f"beta={c['beta']}")
            lines.append(f"a_+ = {APPoly.from_json(c['a_plus'])}, a_- = {APPoly.from_json(c['a_minus'])}")
    if "solution" in report:
        s = report["solution"]
        p = [str(APPoly.from_json(s[k])) for k in ("phi1_plus", "phi2_plus", "phi1_minus", "phi2_minus")]
        lines.append(f"phi_+ = ({p[0]}, {p[1]}), phi_- = ({p[2]}, {p[3]}) [{s['provenance']}]")
    if "verdict" in report:
        v = report["verdict"]
        lines.append(f"verdict: {', '.join(v['verdicts'])}")
        lines.append(f"mu: {v['mu'] if v['mu'] is not None else 'undetermined'}")
        idx = v.get("index")
        if idx:
            lines.append(f"case: {idx['case_tag']} ({idx['status']})")
        lines.append(f"conditions: {', '.join(v['justification']) or 'none'}")
        lines.append(f"only-if strength: {'yes' if v['only_if'] else 'no'}")
        for n in v.get("notes", []):
            lines.append(f"note: {n}")
    if "factorization" in report:
        f = report["factorization"]
        lines.append(f"G_- = {mat2.format_mat(mat2.from_json(f['G_minus']))}")
        lines.append(f"G_+ = {mat2.format_mat(mat2.from_json(f['G_plus']))}")
        lines.append(f"D exponents: {', '.join(f['D_exponents'])}")
    if "verification" in report:
        r = report["verification"]
        lines.append(f"verification: {'pass' if r['passed'] else 'FAIL'}, "
                     f"max residual {r['max_residual']:.3e} at {r['sample_count']} points")
        for c in r["checks"]:
            if not c["passed"]:
                lines.append(f"  failed {c['name']}: {c['detail']}")
    for n in report.get("messages", []):
        lines.append(n)
    if "error" in report:
        lines.append(f"error: {report['error']['type']}: {report['error']['message']}")
    return "\n".join(lines) + "\n"


def render_csv(report: dict, points: int = 401, half_width: float = 50.0) -> str:
    """Sampled ``|g_-|``, ``|g_+|`` and the pointwise residual on the real line."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    sym = report.get("symbol")
    if not sym:
        return buf.getvalue()
    s = TriangularSymbol.from_json(sym)
    x = np.linspace(-half_width, half_width, points)
    gm = APPoly._from_sorted(t for t in s.g if t[0] < 0)
    gp = APPoly._from_sorted(t for t in s.g if t[0] > 0)
    resid = residual_trace(report, s, x)
    for k in range(points):
        r = "" if resid is None else f"{resid[k]:.6e}"
        w.writerow([f"{x[k]:.6f}", f"{abs(gm(x[k])):.6e}", f"{abs(gp(x[k])):.6e}", r])
    return buf.getvalue()


def residual_trace(report: dict, sym: TriangularSymbol, x: np.ndarray) -> Optional[np.ndarray]:
    G = mat2.evaluate(sym.matrix(), x)
    if "factorization" in report:
        f = report["factorization"]
        Gm = mat2.evaluate(mat2.from_json(f["G_minus"]), x)
        Gp = mat2.evaluate(mat2.from_json(f["G_plus"]), x)
        d1, d2 = (float(as_freq(d)) for d in f["D_exponents"])
        D = np.zeros_like(G)
        D[:, 0, 0] = np.exp(1j * d1 * x)
        D[:, 1, 1] = np.exp(1j * d2 * x)
        R = Gm @ D @ np.linalg.inv(Gp) - G
        return np.abs(R).reshape(len(x), -1).max(axis=1)
    if "solution" in report:
        s = report["solution"]
        p = [APPoly.from_json(s[k])(x) for k in ("phi1_plus", "phi2_plus", "phi1_minus", "phi2_minus")]
        r1 = np.abs(G[:, 0, 0] * p[0] - p[2])
        r2 = np.abs(G[:, 1, 0] * p[0] + G[:, 1, 1] * p[1] - p[3])
        return np.maximum(r1, r2)
    return None


def fraction_str(f) -> Optional[str]:
    return None if f is None else freq_str(f)
