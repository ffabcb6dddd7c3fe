"""Explicit solutions of the homogeneous problem ``G phi_+ = phi_-``.

For ``G = [[e_{-lam}, 0], [g, e_lam]]`` the two rows read

    e_{-lam} phi1_+ = phi1_-
    g phi1_+ + e_lam phi2_+ = phi2_-

with ``phi_+`` analytic in the upper and ``phi_-`` in the lower half-plane,
i.e. non-negative and non-positive spectra respectively.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .appoly import INF, APPoly, FreqLike, as_freq, freq_str
from .errors import InvariantViolation, NotBigGap, NuOutOfRange, ZeroSolution
from .symbol import ClassMembership, GapData, TriangularSymbol
from .verify import VerificationReport, sample_points

IDENTITY_TOL = 1e-12


class Provenance(enum.Enum):
    STRUCTURED = "StructuredN"
    BIG_GAP = "BigGap"
    ONE_SIDED = "OneSided"


@dataclass(frozen=True)
class RHSolution:
    phi1_plus: APPoly
    phi2_plus: APPoly
    phi1_minus: APPoly
    phi2_minus: APPoly
    provenance: Provenance
    used_nu: Optional[Fraction] = None

    @property
    def phi_plus(self) -> tuple[APPoly, APPoly]:
        return self.phi1_plus, self.phi2_plus

    @property
    def phi_minus(self) -> tuple[APPoly, APPoly]:
        return self.phi1_minus, self.phi2_minus

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in (*self.phi_plus, *self.phi_minus))

    def to_json(self) -> dict:
        return {
            "phi1_plus": self.phi1_plus.to_json(),
            "phi2_plus": self.phi2_plus.to_json(),
            "phi1_minus": self.phi1_minus.to_json(),
            "phi2_minus": self.phi2_minus.to_json(),
            "provenance": self.provenance.value,
            "used_nu": None if self.used_nu is None else freq_str(self.used_nu),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RHSolution":
        nu = data.get("used_nu")
        return cls(
            APPoly.from_json(data["phi1_plus"]),
            APPoly.from_json(data["phi2_plus"]),
            APPoly.from_json(data["phi1_minus"]),
            APPoly.from_json(data["phi2_minus"]),
            Provenance(data["provenance"]),
            None if nu is None else as_freq(nu),
        )


def row_defects(lam: Fraction, g: APPoly, sol: RHSolution) -> tuple[APPoly, APPoly]:
    """Exact left-minus-right of both row identities."""
    r1 = sol.phi1_plus.shift(-lam) - sol.phi1_minus
    r2 = g * sol.phi1_plus + sol.phi2_plus.shift(lam) - sol.phi2_minus
    return r1, r2


def _sign_problems(sol: RHSolution) -> list[str]:
    out = []
    for name, p in (("phi1_plus", sol.phi1_plus), ("phi2_plus", sol.phi2_plus)):
        if not p.in_upper():
            out.append(f"{name} has negative frequency {p.min_freq()}")
    for name, p in (("phi1_minus", sol.phi1_minus), ("phi2_minus", sol.phi2_minus)):
        if not p.in_lower():
            out.append(f"{name} has positive frequency {p.max_freq()}")
    return out


def _assert_valid(lam: Fraction, g: APPoly, sol: RHSolution) -> RHSolution:
    problems = _sign_problems(sol)
    for k, r in enumerate(row_defects(lam, g, sol), start=1):
        if r.norm1() > IDENTITY_TOL:
            problems.append(f"row {k} identity off by {r}")
    if problems:
        raise InvariantViolation("; ".join(problems))
    return sol


def solve_structured(membership: ClassMembership, lam: Optional[FreqLike] = None) -> RHSolution:
    """Closed-form solution for a symbol in the class of order ``N``.

    ``phi1_+ = e_{lam-nu} sum_j (-1)^j a_+^{N-1-j} a_-^j e_{-j lam/N}``,
    ``phi2_+ = -a_+^N``, ``phi1_- = e_{-lam} phi1_+``, ``phi2_- = (-1)^{N-1} a_-^N``.
    """
    lam = membership.lam if lam is None else as_freq(lam)
    N, nu = membership.N, membership.chosen_nu
    ap, am = membership.a_plus, membership.a_minus
    step = lam / N
    # powers are reused across the sum
    ap_pows = [APPoly.const(1.0)]
    am_pows = [APPoly.const(1.0)]
    for _ in range(N):
        ap_pows.append(ap_pows[-1] * ap)
        am_pows.append(am_pows[-1] * am)
    s = APPoly()
    for j in range(N):
        term = ap_pows[N - 1 - j] * am_pows[j]
        s = s + term.shift(-j * step) * (-1) ** j
    phi1p = s.shift(lam - nu)
    sol = RHSolution(
        phi1_plus=phi1p,
        phi2_plus=-ap_pows[N],
        phi1_minus=phi1p.shift(-lam),
        phi2_minus=am_pows[N] * (-1) ** (N - 1),
        provenance=Provenance.STRUCTURED,
        used_nu=nu,
    )
    return _assert_valid(lam, membership.g(), sol)


def regrouped_phi1_plus(membership: ClassMembership) -> APPoly:
    """``phi1_+`` written through ``b_+``; every term visibly has non-negative spectrum."""
    N, lam, beta = membership.N, membership.lam, membership.beta
    if N == 1:
        return APPoly.exp(beta)
    ap, bp = membership.a_plus, membership.b_plus
    s = APPoly()
    for j in range(N):
        shift = beta - j * beta / (N - 1) + lam - (j + 1) * lam / N
        s = s + ((ap ** (N - 1 - j)) * (bp ** j)).shift(shift) * (-1) ** j
    return s


def regrouped_phi1_minus(membership: ClassMembership) -> APPoly:
    """``phi1_-`` written through ``b_-``; every term visibly has non-positive spectrum."""
    N, lam, nu = membership.N, membership.lam, membership.chosen_nu
    if N == 1:
        return APPoly.exp(-nu)
    am, bm = membership.a_minus, membership.b_minus
    s = APPoly()
    for j in range(N):
        shift = -j * (nu / (N - 1) + lam / N)
        s = s + ((bm ** (N - 1 - j)) * (am ** j)).shift(shift) * (-1) ** j
    return s


def biggap_nu_range(gap: GapData, lam: Fraction) -> tuple[Fraction, Fraction]:
    lo = max(Fraction(0), lam - gap.eta1_minus)
    hi = min(gap.eta1_plus, lam)
    return as_freq(lo), as_freq(hi)


def solve_biggap(gap: GapData, lam: FreqLike, nu: FreqLike) -> RHSolution:
    """Solution when the spectral gap of ``g`` around zero is at least ``lam``.

    ``phi_+ = (e_{lam-nu}, -e_{-nu} g_+)``, ``phi_- = (e_{-nu}, e_{lam-nu} g_-)``
    for ``max(0, lam - eta1_-) <= nu <= min(eta1_+, lam)``.
    """
    lam = as_freq(lam)
    nu = as_freq(nu)
    if gap.gap_sum < lam:
        raise NotBigGap(f"eta1_+ + eta1_- = {gap.gap_sum} < lambda = {lam}")
    lo, hi = biggap_nu_range(gap, lam)
    if not lo <= nu <= hi:
        raise NuOutOfRange(f"nu={nu} outside [{lo}, {hi}]")
    sol = RHSolution(
        phi1_plus=APPoly.exp(lam - nu),
        phi2_plus=-gap.g_plus.shift(-nu),
        phi1_minus=APPoly.exp(-nu),
        phi2_minus=gap.g_minus.shift(lam - nu),
        provenance=Provenance.BIG_GAP,
        used_nu=nu,
    )
    return _assert_valid(lam, gap.g_minus + gap.g_plus, sol)


def one_sided_solutions(sym: TriangularSymbol) -> list[RHSolution]:
    """Solutions for ``g`` with a zero-frequency term, when ``g`` is one-sided.

    If ``spectrum(g)`` misses ``(-lam, 0)`` then ``g = a_- e_{-lam} + a_+`` and
    ``phi_+ = (e_lam, -a_+)``, ``phi_- = (1, a_-)``.  If it misses ``(0, lam)``
    then ``g = a_- + a_+ e_lam`` and ``phi_+ = (1, -a_+)``, ``phi_- = (e_{-lam}, a_-)``.
    Both components of each pair have a nonzero mean, so each pair is a
    corona vector.  Returns an empty list when neither form applies.
    """
    lam, g = sym.lam, sym.g
    out = []
    if not any(-lam < f < 0 for f in g.freqs):
        a_plus = APPoly._from_sorted(t for t in g if t[0] >= 0)
        a_minus = APPoly._from_sorted(t for t in g if t[0] < 0).shift(lam)
        out.append(RHSolution(APPoly.exp(lam), -a_plus, APPoly.const(1.0), a_minus,
                              Provenance.ONE_SIDED))
    if not any(0 < f < lam for f in g.freqs):
        a_minus = APPoly._from_sorted(t for t in g if t[0] <= 0)
        a_plus = APPoly._from_sorted(t for t in g if t[0] > 0).shift(-lam)
        out.append(RHSolution(APPoly.const(1.0), -a_plus, APPoly.exp(-lam), a_minus,
                              Provenance.ONE_SIDED))
    return [_assert_valid(lam, g, s) for s in out]


@dataclass(frozen=True)
class Reduction:
    mu1: Fraction
    mu2: Fraction
    psi_plus: tuple[APPoly, APPoly]
    psi_minus: tuple[APPoly, APPoly]

    @property
    def mu(self) -> Fraction:
        return self.mu1 + self.mu2


def exponential_reduction(sol: RHSolution, gap: Optional[GapData] = None,
                          lam: Optional[FreqLike] = None) -> Reduction:
    """Pull the largest exponential factors out of both sides of a solution.

    ``phi_+ = e_{mu1} psi_+`` and ``phi_- = e_{-mu2} psi_-`` where the shifted
    vectors have extreme frequency exactly 0.  Then ``G e_{mu1+mu2} psi_+ = psi_-``
    and ``mu1 + mu2`` is the candidate partial index.  The reduction reads the
    represented spectra; ``gap`` and ``lam`` are accepted for interface
    symmetry and ignored.
    """
    plus = [p for p in sol.phi_plus if p]
    minus = [p for p in sol.phi_minus if p]
    if not plus or not minus:
        raise ZeroSolution("solution has an identically zero side")
    mu1 = min(p.min_freq() for p in plus)
    mu2 = -max(p.max_freq() for p in minus)
    psi_p = (sol.phi1_plus.shift(-mu1), sol.phi2_plus.shift(-mu1))
    psi_m = (sol.phi1_minus.shift(mu2), sol.phi2_minus.shift(mu2))
    return Reduction(mu1, mu2, psi_p, psi_m)


def verify_solution(sym: TriangularSymbol, sol: RHSolution, points: int = 32,
                    seed: int = 0, tol: float = IDENTITY_TOL) -> VerificationReport:
    """Symbolic row identities, spectrum signs, and a numeric spot check."""
    report = VerificationReport()
    if sol.is_zero():
        report.flags.append("trivial")
    lam, g = sym.lam, sym.g
    for k, r in enumerate(row_defects(lam, g, sol), start=1):
        worst = max(r.terms, key=lambda t: abs(t[1]), default=None)
        if worst is None or abs(worst[1]) <= tol:
            report.add(f"row {k} identity", True)
        else:
            report.add(f"row {k} identity", False,
                       f"coefficient mismatch {abs(worst[1]):.3e} at frequency {worst[0]}")
    problems = _sign_problems(sol)
    report.add("spectrum signs", not problems, "; ".join(problems))

    x = sample_points(points, seed)
    if points > 0:
        G = sym.matrix()
        p1, p2 = sol.phi1_plus(x), sol.phi2_plus(x)
        m1, m2 = sol.phi1_minus(x), sol.phi2_minus(x)
        res1 = abs(G[0][0](x) * p1 - m1)
        res2 = abs(G[1][0](x) * p1 + G[1][1](x) * p2 - m2)
        res = res1 if res1.max() >= res2.max() else res2
        k = int(res.argmax())
        report.max_residual = float(max(res1.max(), res2.max()))
        report.worst_point = complex(x[k])
    report.sample_count = points
    return report
