"""Corona conditions for solution vectors, corona pairs and the ``H`` matrices.

A pair ``(w1, w2)`` of upper (lower) half-plane functions satisfies the corona
condition when ``|w1| + |w2|`` is bounded below there, equivalently when a
Bezout identity ``w1 h1 + w2 h2 = 1`` is solvable on the same side.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import mat2
from .appoly import INF, APPoly, FreqLike, as_freq, neumann_inverse
from .errors import (
    CoronaConditionFails,
    CoronaUnsupported,
    DeterminantNotOne,
    NotBinomial,
    SpectrumSignViolation,
)
from .symbol import GapData
from .verify import strip_sample

# condition tags
GAP_EQUALS_LAMBDA = "gap-equals-lambda"
INNER_ENDPOINTS = "inner-endpoints"
PLUS_ENDPOINT_RATIO = "plus-endpoint-ratio"
MINUS_ENDPOINT_RATIO = "minus-endpoint-ratio"
OUTER_ENDPOINTS = "outer-endpoints"
SINGLE_EXPONENTIAL = "single-exponential"
BINOMIAL_CRITERION = "binomial-criterion"
IRRATIONAL_BRANCH = "irrational-ratio-branch"
NUMERIC_SAMPLE = "numeric-sample"


class Tri(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"


@dataclass
class CoronaVerdict:
    plus: Tri
    minus: Tri
    fired_conditions: list[str] = field(default_factory=list)
    evidence: dict = field(default_factory=dict)

    @property
    def verdict(self) -> Tri:
        if self.plus is self.minus:
            return self.plus
        if Tri.FAILS in (self.plus, self.minus):
            return Tri.FAILS
        return Tri.UNKNOWN

    def to_json(self) -> dict:
        return {
            "plus": self.plus.value,
            "minus": self.minus.value,
            "fired_conditions": list(self.fired_conditions),
            "evidence": dict(self.evidence),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoronaVerdict":
        return cls(Tri(data["plus"]), Tri(data["minus"]),
                   list(data.get("fired_conditions", [])), dict(data.get("evidence", {})))


def _all(*vals: Optional[bool]) -> Optional[bool]:
    """Three-valued conjunction: False wins, then None, then True."""
    if any(v is False for v in vals):
        return False
    if any(v is None for v in vals):
        return None
    return True


def spectral_corona_check(gap: GapData, N: int, lam: FreqLike) -> CoronaVerdict:
    """Exact endpoint conditions under which both solution vectors are corona.

    Each condition combines an identity between gap endpoints with the
    requirement that the endpoints involved are in the spectrum.  An
    attained flag of ``None`` makes the condition undecided.
    """
    lam = as_freq(lam)
    e1p, e2p, e1m, e2m = gap.eta1_plus, gap.eta2_plus, gap.eta1_minus, gap.eta2_minus
    if N == 1:
        conds = {GAP_EQUALS_LAMBDA: _all(gap.att1_plus, gap.att1_minus, e1p + e1m == lam)}
    else:
        r = Fraction(N, N - 1)
        conds = {
            INNER_ENDPOINTS: _all(gap.att1_plus, gap.att1_minus, e1p + e1m == lam / N),
            PLUS_ENDPOINT_RATIO: _all(gap.att1_plus, gap.att2_plus,
                                      e2p != INF and e2p == r * e1p),
            MINUS_ENDPOINT_RATIO: _all(gap.att1_minus, gap.att2_minus,
                                       e2m != INF and e2m == r * e1m),
            OUTER_ENDPOINTS: _all(gap.att2_plus, gap.att2_minus,
                                  e2p + e2m == lam / (N - 1)),
        }
    fired = [k for k, v in conds.items() if v is True]
    if fired:
        t = Tri.HOLDS
    elif all(v is False for v in conds.values()):
        t = Tri.FAILS
    else:
        t = Tri.UNKNOWN
    evidence = {k: (None if v is None else bool(v)) for k, v in conds.items()}
    return CoronaVerdict(t, t, fired, evidence)


def _binomial_parts(g_minus: APPoly, g_plus: APPoly):
    if len(g_minus) != 2 or len(g_plus) != 2:
        raise NotBinomial(
            f"expected two-term g_- and g_+, got {len(g_minus)} and {len(g_plus)} terms"
        )
    (fm2, cm2), (fm1, cm1) = g_minus.terms  # frequencies -eta2_-, -eta1_-
    (f1, c1), (f2, c2) = g_plus.terms  # frequencies eta1_+, eta2_+
    return (fm2, cm2, fm1, cm1, f1, c1, f2, c2)


def _angle_close(a: float, b: float, tol: float) -> bool:
    d = math.remainder(a - b, 2 * math.pi)
    return abs(d) <= tol


def binomial_strip_criterion(g_minus: APPoly, g_plus: APPoly, irrational: bool = False,
                             tol: float = 1e-9) -> CoronaVerdict:
    """Decide ``inf_S (|g_-| + |g_+|) > 0`` when both halves are binomials.

    With ``(eta2_+ - eta1_+) / (eta2_- - eta1_-) = p/q`` in lowest terms the
    condition fails exactly when ``(-c1/c2)^q = (-c_{-2}/c_{-1})^p``: then the
    zeros of ``g_-`` and of ``g_+`` share a common arithmetic progression.
    ``irrational=True`` forces the incommensurable branch, which compares
    ``|c1/c2|^(eta2_- - eta1_-)`` with ``|c_{-2}/c_{-1}|^(eta2_+ - eta1_+)``.
    """
    fm2, cm2, fm1, cm1, f1, c1, f2, c2 = _binomial_parts(g_minus, g_plus)
    d_minus = fm1 - fm2
    d_plus = f2 - f1
    A = -c1 / c2
    B = -cm2 / cm1
    evidence = {"ratio": f"{(d_plus / d_minus).numerator}/{(d_plus / d_minus).denominator}"}
    tags = [BINOMIAL_CRITERION]
    if irrational:
        lhs = float(d_minus) * math.log(abs(c1 / c2))
        rhs = float(d_plus) * math.log(abs(cm2 / cm1))
        coincide = abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))
        tags.append(IRRATIONAL_BRANCH)
        evidence.update(lhs_log=lhs, rhs_log=rhs)
    else:
        ratio = d_plus / d_minus
        p, q = ratio.numerator, ratio.denominator
        lhs_mod, rhs_mod = q * math.log(abs(A)), p * math.log(abs(B))
        lhs_arg, rhs_arg = q * cmath.phase(A), p * cmath.phase(B)
        scale = max(1.0, abs(lhs_mod), abs(rhs_mod))
        coincide = (abs(lhs_mod - rhs_mod) <= tol * scale
                    and _angle_close(lhs_arg, rhs_arg, tol * (p + q)))
        evidence.update(p=p, q=q, log_modulus=[lhs_mod, rhs_mod],
                        argument=[lhs_arg, rhs_arg])
    t = Tri.FAILS if coincide else Tri.HOLDS
    return CoronaVerdict(t, t, tags, evidence)


def strip_condition(g_minus: APPoly, g_plus: APPoly, eps1: float = 1.0, eps2: float = 1.0,
                    grid: tuple[int, int] = (2000, 20)) -> CoronaVerdict:
    """Positive lower bound of ``|g_-| + |g_+|`` on horizontal strips.

    Exact when either half is a single exponential (it has no zeros) or both
    are binomials.  Otherwise only a sampled estimate is attached and the
    verdict stays Unknown: sampling cannot certify an infimum.
    """
    if g_minus.is_single_exponential() or g_plus.is_single_exponential():
        return CoronaVerdict(Tri.HOLDS, Tri.HOLDS, [SINGLE_EXPONENTIAL])
    if len(g_minus) == 2 and len(g_plus) == 2:
        return binomial_strip_criterion(g_minus, g_plus)
    est, where = strip_sample(g_minus, g_plus, eps1, eps2, grid)
    return CoronaVerdict(Tri.UNKNOWN, Tri.UNKNOWN, [NUMERIC_SAMPLE],
                         {"strip_minimum": est, "at": [where.real, where.imag],
                          "eps": [eps1, eps2], "grid": list(grid)})


@dataclass(frozen=True)
class CoronaPair:
    h1: APPoly
    h2: APPoly
    residual_bound: float
    rule: str = ""

    @property
    def h(self) -> tuple[APPoly, APPoly]:
        return self.h1, self.h2

    def to_json(self) -> dict:
        return {"h1": self.h1.to_json(), "h2": self.h2.to_json(),
                "residual_bound": self.residual_bound, "rule": self.rule}


def _on_side(p: APPoly, side: str) -> bool:
    return p.in_upper() if side == "plus" else p.in_lower()


def _check_side(side: str) -> None:
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")


def _pair(omega: tuple[APPoly, APPoly], i: int, hi: APPoly, hj: APPoly, rule: str) -> CoronaPair:
    h = [APPoly(), APPoly()]
    h[i], h[1 - i] = hi, hj
    resid = (omega[0] * h[0] + omega[1] * h[1] - 1).norm1()
    return CoronaPair(h[0], h[1], resid, rule)


def corona_pair(omega1: APPoly, omega2: APPoly, side: str = "plus",
                tol: float = 1e-10) -> CoronaPair:
    """Solve ``w1 h1 + w2 h2 = 1`` with ``h`` on the same side as ``w``.

    Rules, in order: a constant component; a binomial component whose
    dominant coefficient sits at frequency 0 (truncated geometric series);
    a single-exponential component ``c e_a`` paired with a component whose
    non-constant part is divisible by ``e_a``.  ``residual_bound`` is the
    Wiener norm of ``w.h - 1``, which bounds its sup on the real line.
    """
    _check_side(side)
    omega = (omega1, omega2)
    for k, w in enumerate(omega, start=1):
        if not _on_side(w, side):
            raise SpectrumSignViolation(f"omega{k} = {w} is not on the {side} side")
    if omega1.coefficient(0) == 0 and omega2.coefficient(0) == 0:
        # both components tend to 0 deep inside the half-plane
        raise CoronaConditionFails(
            f"neither component has a mean value; inf |w1|+|w2| = 0 on the {side} side"
        )

    for i, w in enumerate(omega):
        if w.is_constant():
            return _pair(omega, i, APPoly.const(1.0 / w.coefficient(0)), APPoly(), "constant")

    for i, w in enumerate(omega):
        if len(w) == 2:
            c0 = w.coefficient(0)
            other = w - APPoly.const(c0)
            if c0 != 0 and abs(other.coeffs[0]) < abs(c0):
                return _pair(omega, i, neumann_inverse(w, tol), APPoly(), "dominant-binomial")

    for i, w in enumerate(omega):
        if not w.is_single_exponential():
            continue
        alpha, c = w.terms[0]
        v = omega[1 - i]
        c0 = v.coefficient(0)
        if c0 == 0:
            continue
        rest = (v - APPoly.const(c0)).shift(-alpha)
        if _on_side(rest, side):
            return _pair(omega, i, rest * (-1.0 / (c0 * c)), APPoly.const(1.0 / c0),
                         "exponential-divides")

    raise CoronaUnsupported(f"no constructive rule applies to ({omega1}, {omega2})")


def build_H(psi: tuple[APPoly, APPoly], h: CoronaPair, delta_tilde: FreqLike = 0,
            side: str = "plus", tol: float = 1e-10) -> mat2.Mat2:
    """Complete a corona vector to a matrix with determinant 1.

    Plus side: ``[[e_{-d} psi1, -h2], [e_{-d} psi2, h1]]``; minus side drops
    the shift.  The determinant equals ``w.h`` for the reduced vector ``w``.
    """
    _check_side(side)
    d = as_freq(delta_tilde)
    if d < 0:
        raise ValueError("delta_tilde must be non-negative")
    p1, p2 = psi
    if side == "plus":
        p1, p2 = p1.shift(-d), p2.shift(-d)
    H = mat2.mat(p1, -h.h2, p2, h.h1)
    err = (mat2.det(H) - 1).norm1()
    if err > h.residual_bound + tol:
        raise DeterminantNotOne(f"det H - 1 has norm {err:.3e} (det = {mat2.det(H)})")
    bad = [f"({i + 1},{j + 1})" for (i, j), e in mat2.entries(H) if not _on_side(e, side)]
    if bad:
        raise SpectrumSignViolation(f"H_{side} entries {', '.join(bad)} on the wrong side")
    return H
