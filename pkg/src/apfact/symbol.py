"""Triangular symbols ``G = [[e_{-lam}, 0], [g, e_lam]]`` and their class data.

The off-diagonal entry ``g`` is split around frequency zero into ``g_-`` and
``g_+``; the four gap endpoints

* ``eta1_minus = -max spectrum(g_-)``, ``eta2_minus = -min spectrum(g_-)``
* ``eta1_plus = min spectrum(g_+)``,  ``eta2_plus = max spectrum(g_+)``

drive everything downstream.  A symbol belongs to the class of order ``N``
when ``g = a_- e_{-beta} + a_+ e_nu`` with ``lam = N (nu + beta)``, ``a_+``
(resp. ``a_-``) having non-negative (resp. non-positive) spectrum, and, for
``N > 1``, ``b_+ = e_{beta/(N-1)} a_-`` and ``b_- = e_{-nu/(N-1)} a_+``
also analytic in the upper (resp. lower) half-plane.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Union

from . import mat2
from .appoly import INF, APPoly, FreqLike, as_freq, freq_str, parse_eta
from .errors import (
    FormMismatch,
    InconsistentDeclaration,
    NuOutOfInterval,
    ValidationError,
    ZeroFrequencyPresent,
)

Eta = Union[Fraction, float]  # float only for +inf


def _eta_json(v):
    return None if v is None else freq_str(v)


@dataclass(frozen=True)
class DeclaredSpectrum:
    """Gap endpoints declared for a truncated series.

    ``None`` for a value means "use the represented terms"; ``None`` for an
    attained flag means membership of the endpoint in the spectrum is unknown.
    """

    eta1_minus: Optional[Eta] = None
    eta2_minus: Optional[Eta] = None
    eta1_plus: Optional[Eta] = None
    eta2_plus: Optional[Eta] = None
    eta1_minus_attained: Optional[bool] = None
    eta2_minus_attained: Optional[bool] = None
    eta1_plus_attained: Optional[bool] = None
    eta2_plus_attained: Optional[bool] = None

    def __post_init__(self):
        for side in ("minus", "plus"):
            e1 = getattr(self, f"eta1_{side}")
            e2 = getattr(self, f"eta2_{side}")
            for v in (e1, e2):
                if v is not None and v < 0:
                    raise InconsistentDeclaration(f"negative gap endpoint declared: {v}")
            if e1 is not None and e2 is not None and e1 > e2:
                raise InconsistentDeclaration(f"eta1_{side}={e1} exceeds eta2_{side}={e2}")

    def to_json(self) -> dict:
        out = {}
        for name in ("eta1_minus", "eta2_minus", "eta1_plus", "eta2_plus"):
            v = getattr(self, name)
            if v is not None:
                out[name] = _eta_json(v)
            a = getattr(self, name + "_attained")
            if a is not None:
                out[name + "_attained"] = a
        return out

    @classmethod
    def from_json(cls, data: dict) -> "DeclaredSpectrum":
        default = data.get("attained")
        kw = {}
        for name in ("eta1_minus", "eta2_minus", "eta1_plus", "eta2_plus"):
            v = data.get(name)
            if v is not None:
                kw[name] = parse_eta(v)
                kw[name + "_attained"] = data.get(name + "_attained", default)
            elif name + "_attained" in data:
                kw[name + "_attained"] = data[name + "_attained"]
        return cls(**kw)


@dataclass(frozen=True)
class TriangularSymbol:
    lam: Fraction
    g: APPoly
    declared_gaps: Optional[DeclaredSpectrum] = None

    def __post_init__(self):
        object.__setattr__(self, "lam", as_freq(self.lam))
        if self.lam <= 0:
            raise ValidationError(f"lambda must be positive, got {self.lam}")

    @property
    def is_native(self) -> bool:
        """True when the symbol is a genuine exponential polynomial (no declarations)."""
        return self.declared_gaps is None

    def matrix(self) -> mat2.Mat2:
        return mat2.mat(APPoly.exp(-self.lam), 0, self.g, APPoly.exp(self.lam))

    def to_json(self) -> dict:
        out = {"lambda": freq_str(self.lam), "g": self.g.to_json()}
        if self.declared_gaps is not None:
            out["declared_gaps"] = self.declared_gaps.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TriangularSymbol":
        dg = data.get("declared_gaps")
        return cls(
            as_freq(data["lambda"]),
            APPoly.from_json(data.get("g", [])),
            DeclaredSpectrum.from_json(dg) if dg else None,
        )


@dataclass(frozen=True)
class GapData:
    g_minus: APPoly
    g_plus: APPoly
    eta1_minus: Eta
    eta2_minus: Eta
    eta1_plus: Eta
    eta2_plus: Eta
    att1_minus: Optional[bool]
    att2_minus: Optional[bool]
    att1_plus: Optional[bool]
    att2_plus: Optional[bool]
    has_zero_frequency: bool
    zero_coef: complex = 0j
    declared: bool = False

    @property
    def plus_empty(self) -> bool:
        return self.eta1_plus == INF

    @property
    def minus_empty(self) -> bool:
        return self.eta1_minus == INF

    @property
    def gap_sum(self) -> Eta:
        return self.eta1_plus + self.eta1_minus

    def reassemble(self) -> APPoly:
        return self.g_minus + self.g_plus + APPoly.const(self.zero_coef)

    def to_json(self) -> dict:
        return {
            "g_minus": self.g_minus.to_json(),
            "g_plus": self.g_plus.to_json(),
            "eta1_minus": _eta_json(self.eta1_minus),
            "eta2_minus": _eta_json(self.eta2_minus),
            "eta1_plus": _eta_json(self.eta1_plus),
            "eta2_plus": _eta_json(self.eta2_plus),
            "attained": {
                "eta1_minus": self.att1_minus,
                "eta2_minus": self.att2_minus,
                "eta1_plus": self.att1_plus,
                "eta2_plus": self.att2_plus,
            },
            "has_zero_frequency": self.has_zero_frequency,
        }


def decompose(sym: TriangularSymbol) -> GapData:
    """Split ``g`` around zero and read off the gap endpoints.

    Declared endpoints take precedence over the represented spectrum, but
    they must not contradict it.
    """
    g = sym.g
    zero = g.coefficient(0)
    gm = APPoly._from_sorted(t for t in g if t[0] < 0)
    gp = APPoly._from_sorted(t for t in g if t[0] > 0)

    if gp:
        e1p, e2p, a1p, a2p = gp.min_freq(), gp.max_freq(), True, True
    else:
        e1p = e2p = INF
        a1p = a2p = False
    if gm:
        e1m, e2m, a1m, a2m = -gm.max_freq(), -gm.min_freq(), True, True
    else:
        e1m = e2m = INF
        a1m = a2m = False

    d = sym.declared_gaps
    if d is not None:
        rep = {"eta1_plus": (e1p if gp else None), "eta2_plus": (e2p if gp else None),
               "eta1_minus": (e1m if gm else None), "eta2_minus": (e2m if gm else None)}
        vals = {"eta1_plus": e1p, "eta2_plus": e2p, "eta1_minus": e1m, "eta2_minus": e2m}
        att = {"eta1_plus": a1p, "eta2_plus": a2p, "eta1_minus": a1m, "eta2_minus": a2m}
        for name in vals:
            v = getattr(d, name)
            a = getattr(d, name + "_attained")
            if v is not None:
                vals[name] = v
                att[name] = a
                if rep[name] is not None and rep[name] == v and a is False:
                    raise InconsistentDeclaration(
                        f"{name}={v} declared not attained but a term there is represented"
                    )
            elif a is not None:
                if rep[name] is None:
                    raise InconsistentDeclaration(f"{name}_attained given for an empty side")
                if a is False:
                    raise InconsistentDeclaration(
                        f"{name} is represented, so it cannot be declared not attained"
                    )
        e1p, e2p = vals["eta1_plus"], vals["eta2_plus"]
        e1m, e2m = vals["eta1_minus"], vals["eta2_minus"]
        a1p, a2p = att["eta1_plus"], att["eta2_plus"]
        a1m, a2m = att["eta1_minus"], att["eta2_minus"]
        # a declared finite lower endpoint with no upper one leaves the side unbounded
        if e1p != INF and e2p == INF and not gp and d.eta2_plus is None:
            a2p = None
        if e1m != INF and e2m == INF and not gm and d.eta2_minus is None:
            a2m = None
        if gp and not (e1p <= gp.min_freq() and gp.max_freq() <= e2p):
            raise InconsistentDeclaration(
                f"represented g_+ spectrum [{gp.min_freq()}, {gp.max_freq()}] "
                f"outside declared [{e1p}, {e2p}]"
            )
        if gm and not (e1m <= -gm.max_freq() and -gm.min_freq() <= e2m):
            raise InconsistentDeclaration(
                f"represented g_- spectrum outside declared gap [{e1m}, {e2m}]"
            )
        if e1p > e2p or e1m > e2m:
            raise InconsistentDeclaration("declared eta1 exceeds eta2")

    return GapData(
        g_minus=gm, g_plus=gp,
        eta1_minus=e1m, eta2_minus=e2m, eta1_plus=e1p, eta2_plus=e2p,
        att1_minus=a1m, att2_minus=a2m, att1_plus=a1p, att2_plus=a2p,
        has_zero_frequency=zero != 0, zero_coef=zero,
        declared=d is not None,
    )


class CriterionCase(enum.Enum):
    """Which invertibility case a representation is tuned for.

    I: N = 1, both inner endpoints attained and the gap equals lambda.
    II: inner endpoints attained, gap equals lambda / N.
    III: both plus endpoints attained, ratio N / (N-1).
    IV: both minus endpoints attained, ratio N / (N-1).
    V: both outer endpoints attained, outer sum lambda / (N-1).
    """

    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"
    V = "v"


@dataclass(frozen=True)
class ClassMembership:
    lam: Fraction
    N: int
    nu_min: Fraction
    nu_max: Fraction
    chosen_nu: Fraction
    beta: Fraction
    a_minus: APPoly
    a_plus: APPoly
    b_minus: Optional[APPoly]
    b_plus: Optional[APPoly]
    gap: GapData = field(repr=False)

    @property
    def nu(self) -> Fraction:
        return self.chosen_nu

    def g(self) -> APPoly:
        """Reassemble ``a_- e_{-beta} + a_+ e_nu``."""
        return self.a_minus.shift(-self.beta) + self.a_plus.shift(self.chosen_nu)

    def violations(self) -> list[str]:
        """Invariant checks; an empty list means the membership is valid."""
        out = []
        if self.lam != self.N * (self.chosen_nu + self.beta):
            out.append("lambda != N (nu + beta)")
        if not self.a_plus.in_upper():
            out.append("spectrum(a_+) not in [0, inf)")
        if not self.a_minus.in_lower():
            out.append("spectrum(a_-) not in (-inf, 0]")
        if self.N > 1:
            if self.b_plus is None or not self.b_plus.in_upper():
                out.append("spectrum(b_+) not in [0, inf)")
            if self.b_minus is None or not self.b_minus.in_lower():
                out.append("spectrum(b_-) not in (-inf, 0]")
            if not (self.chosen_nu > 0 and self.beta > 0):
                out.append("N > 1 requires nu, beta > 0")
        if not (self.nu_min <= self.chosen_nu <= self.nu_max):
            out.append("nu outside [M, m]")
        if not (0 <= self.chosen_nu <= self.lam and 0 <= self.beta <= self.lam):
            out.append("nu, beta outside [0, lambda]")
        return out

    def to_json(self) -> dict:
        out = {
            "lambda": freq_str(self.lam),
            "N": self.N,
            "nu_min": freq_str(self.nu_min),
            "nu_max": freq_str(self.nu_max),
            "nu": freq_str(self.chosen_nu),
            "beta": freq_str(self.beta),
            "a_minus": self.a_minus.to_json(),
            "a_plus": self.a_plus.to_json(),
        }
        if self.N > 1:
            out["b_minus"] = self.b_minus.to_json()
            out["b_plus"] = self.b_plus.to_json()
        return out


@dataclass(frozen=True)
class NotInClass:
    reason: str
    violated: str = ""

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict:
        return {"not_in_class": True, "reason": self.reason, "violated": self.violated}


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else as_freq(x)


def nu_interval(gap: GapData, lam: Fraction, N: int) -> Optional[tuple[Fraction, Fraction]]:
    """Admissible ``nu`` for a representation of order ``N``, or ``None``.

    For ``N = 1`` this is ``[max(0, lam - eta1_-), min(eta1_+, lam)]``; for
    larger ``N`` it is ``[M, m]`` with
    ``M = max(lam/N - eta1_-, (N-1)/N eta2_+)`` and
    ``m = min(eta1_+, (lam - (N-1) eta2_-)/N)``.
    """
    lam = _frac(lam)
    if N == 1:
        lo = max(Fraction(0), lam - gap.eta1_minus)
        hi = min(gap.eta1_plus, lam)
    else:
        if gap.plus_empty or gap.minus_empty:
            return None
        lo = max(lam / N - gap.eta1_minus, Fraction(N - 1, N) * gap.eta2_plus)
        hi = min(gap.eta1_plus, (lam - (N - 1) * gap.eta2_minus) / N)
    if lo > hi or lo == INF:
        return None
    return _frac(lo), _frac(hi)


def _build(gap: GapData, lam: Fraction, N: int, lo: Fraction, hi: Fraction, nu: Fraction) -> ClassMembership:
    beta = lam / N - nu
    a_plus = gap.g_plus.shift(-nu)
    a_minus = gap.g_minus.shift(beta)
    if N > 1:
        b_plus = a_minus.shift(beta / (N - 1))
        b_minus = a_plus.shift(-nu / (N - 1))
    else:
        b_plus = b_minus = None
    return ClassMembership(lam, N, lo, hi, nu, beta, a_minus, a_plus, b_minus, b_plus, gap)


def classify(sym: TriangularSymbol) -> ClassMembership | NotInClass:
    gap = decompose(sym)
    if gap.has_zero_frequency:
        raise ZeroFrequencyPresent("g has a zero-frequency term; use the one-sided path")
    lam = sym.lam
    if gap.gap_sum >= lam:
        lo, hi = nu_interval(gap, lam, 1)
        return _build(gap, lam, 1, lo, hi, lo)

    s = gap.gap_sum
    N = math.ceil(lam / s)
    q = Fraction(N - 1, N)
    if not gap.eta1_minus >= q * gap.eta2_minus:
        return NotInClass(
            f"eta1_minus={gap.eta1_minus} < (N-1)/N * eta2_minus for N={N}",
            "eta1_minus >= (N-1)/N eta2_minus",
        )
    if not gap.eta1_plus >= q * gap.eta2_plus:
        return NotInClass(
            f"eta1_plus={gap.eta1_plus} < (N-1)/N * eta2_plus for N={N}",
            "eta1_plus >= (N-1)/N eta2_plus",
        )
    if not gap.eta2_plus + gap.eta2_minus <= lam / (N - 1):
        return NotInClass(
            f"eta2_plus + eta2_minus exceeds lambda/(N-1) for N={N}",
            "eta2_plus + eta2_minus <= lambda/(N-1)",
        )
    interval = nu_interval(gap, lam, N)
    assert interval is not None, "inequalities hold but the nu interval is empty"
    lo, hi = interval
    return _build(gap, lam, N, lo, hi, lo)


def case_nu(membership: ClassMembership, case: CriterionCase) -> Fraction:
    gap, lam, N = membership.gap, membership.lam, membership.N
    if case is CriterionCase.I:
        if N != 1:
            raise NuOutOfInterval("case I applies to N = 1 only")
        v = gap.eta1_plus if gap.eta1_plus != INF else max(Fraction(0), lam - gap.eta1_minus)
    elif N == 1:
        raise NuOutOfInterval(f"case {case.value} applies to N > 1 only")
    elif case in (CriterionCase.II, CriterionCase.III):
        v = gap.eta1_plus
    elif case is CriterionCase.IV:
        v = lam / N - gap.eta1_minus
    else:
        v = Fraction(N - 1, N) * gap.eta2_plus
    if v == INF or v == -INF:
        raise NuOutOfInterval(f"case {case.value} gives an infinite nu")
    return _frac(v)


def with_nu(membership: ClassMembership, nu: FreqLike) -> ClassMembership:
    nu = as_freq(nu)
    if not (membership.nu_min <= nu <= membership.nu_max):
        raise NuOutOfInterval(
            f"nu={nu} outside [{membership.nu_min}, {membership.nu_max}]"
        )
    return _build(membership.gap, membership.lam, membership.N,
                  membership.nu_min, membership.nu_max, nu)


def choose_nu(membership: ClassMembership, target: CriterionCase) -> ClassMembership:
    """Rebind ``nu`` to the value the invertibility argument uses for ``target``."""
    return with_nu(membership, case_nu(membership, target))


def classify_exp_form(sym: TriangularSymbol, sigma: Optional[FreqLike] = None) -> ClassMembership | NotInClass:
    """Classify ``g = c e_{-sigma} + g_+`` by scanning ``N`` directly.

    For each ``N`` the admissible ``nu`` satisfy ``nu <= eta1_+``,
    ``nu >= (N-1)/N eta2_+`` and ``lam/N - sigma <= nu <= lam/N - (N-1)/N sigma``.
    At most one ``N`` admits such a ``nu``.
    """
    gap = decompose(sym)
    if gap.has_zero_frequency:
        raise ZeroFrequencyPresent("g has a zero-frequency term")
    if not gap.g_minus.is_single_exponential():
        raise FormMismatch(f"g_- is not a single exponential: {gap.g_minus}")
    if gap.plus_empty:
        raise FormMismatch("g_+ must not vanish")
    s = -gap.g_minus.min_freq()
    if sigma is not None and as_freq(sigma) != s:
        raise FormMismatch(f"g_- has frequency {-s}, expected {-as_freq(sigma)}")
    lam = sym.lam
    e1p, e2p = gap.eta1_plus, gap.eta2_plus
    n_max = 1 if e2p == INF else math.floor(1 + lam / (e2p + s))
    for N in range(1, max(1, n_max) + 1):
        lo = max(lam / N - s, Fraction(N - 1, N) * e2p, Fraction(0))
        hi = min(e1p, lam / N - Fraction(N - 1, N) * s, lam)
        if lo <= hi:
            return _build(gap, lam, N, _frac(lo), _frac(hi), _frac(lo))
    return NotInClass(f"no N in 1..{n_max} admits a nu", "exponential-form conditions")
