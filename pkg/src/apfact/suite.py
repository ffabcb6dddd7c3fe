"""Curated acceptance battery, shared by the ``suite`` command and the test suite."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import mat2
from .appoly import APPoly
from .corona import Tri, binomial_strip_criterion, corona_pair, strip_condition
from .factorize import (
    SINGLE_EXP_GAP,
    Factorization,
    IndexStatus,
    Verdict,
    canonical_equivalence,
    classify_toeplitz,
    construct_factorization,
    indices_biggap,
    indices_structured,
    structured_index_candidates,
)
from .rhsolve import exponential_reduction, row_defects, solve_structured, verify_solution
from .symbol import (
    ClassMembership,
    DeclaredSpectrum,
    TriangularSymbol,
    classify,
    decompose,
)
from .verify import grid_residual, sample_points, strip_infimum_estimate

e = APPoly.exp

FAILS_BAND = 1e-2
HOLDS_BAND = 1e-3


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail}"

    def to_json(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


_R = math.exp(0.5)

# (g_minus, g_plus, expected strip verdict).  Every common zero of a Fails
# pair lies on the real line or at height 1/2, both rows of the sampling grid.
BINOMIAL_PAIRS: list[tuple[APPoly, APPoly, Tri]] = [
    (e(-2) + e(-1), e(1) + e(2), Tri.FAILS),
    (e(-2) + _R * e(-1), e(1) + _R * e(2), Tri.FAILS),
    (e(-3) + e(-2), e("1/2") + e("3/2"), Tri.FAILS),
    (e(-2) + e(-1), e(2) - e(4), Tri.FAILS),
    (e(-4) + e(-1), e(1) + e(4), Tri.FAILS),
    (e(-2) + e(-1), 3 * e(1) + 3 * e(2), Tri.FAILS),
    (e("-5/2") + e("-3/2"), e(1) + e(2), Tri.FAILS),
    (e(-2) + e(-1), e(3) + e(4), Tri.FAILS),
    (e(-2) + e(-1), 1j * e(1) + 1j * e(2), Tri.FAILS),
    (e(-2) + e(-1), e(1) - e(3), Tri.FAILS),
    (e(-2) + e(-1), e(1) + 2 * e(2), Tri.HOLDS),
    (e(-2) + e(-1), e(1) + e(3), Tri.HOLDS),
    (e(-3) + e(-1), e(1) + e(2), Tri.HOLDS),
    (e(-2) + _R * e(-1), e(1) + e(2), Tri.HOLDS),
    (e(-2) + 1j * e(-1), e(1) - 1j * e(2), Tri.HOLDS),
    (e(-3) + e(-1), e(1) + e(4), Tri.HOLDS),
    (e(-1) + e("-1/2"), e("1/2") + 3 * e(1), Tri.HOLDS),
    (e(-2) + e(-1), 2 * e(1) + e(2), Tri.HOLDS),
    (e(-2) + 2 * e(-1), 3 * e(1) + e(2), Tri.HOLDS),
    (e(-3) + e(-2), e("1/2") - e("3/2"), Tri.HOLDS),
]

# symbols of order N > 1 for the sampled comparison of the two strip infima
STRUCTURED_SET: list[TriangularSymbol] = [
    TriangularSymbol(4, e(-2) + e(-1) + e(1) + e(2)),
    TriangularSymbol(4, e(-2) + e(-1) + e(1) + 2 * e(2)),
    TriangularSymbol(4, e(-2) + e(-1) + 2 * e(1) + e(2)),
    TriangularSymbol(4, e(-2) + e(-1) + 1j * e(1) + 1j * e(2)),
    TriangularSymbol(4, e(-2) + e(-1) + 3 * e(1) + 3 * e(2)),
    TriangularSymbol(4, e(-2) + _R * e(-1) + e(1) + _R * e(2)),
    TriangularSymbol(4, e(-2) + _R * e(-1) + e(1) + e(2)),
    TriangularSymbol(4, e(-1) + e(1)),
    TriangularSymbol(3, e(-1) + e(1)),
    TriangularSymbol(4, e(-2) + 1j * e(-1) + e(1) - 1j * e(2)),
]

# dominant-binomial corona inputs: (omega1, omega2, side)
DOMINANT_PAIRS: list[tuple[APPoly, APPoly, str]] = [
    (e(2), 1 + 0.5 * e(1), "plus"),
    (e(1), 2 - e("1/2"), "plus"),
    (e(3) - e(1), 1 + 0.9 * e(2), "plus"),
    (e(-1), 1 + 0.5j * e(-2), "minus"),
    (e(-2) + e(-1), 3 + 2 * e("-1/3"), "minus"),
    (1 - 0.75 * e(2), e(1), "plus"),
]


def random_membership(rng: random.Random) -> ClassMembership:
    """An admissible class membership with random data.

    ``a_+`` lives in ``[0, nu/(N-1)]`` and ``a_-`` in ``[-beta/(N-1), 0]`` so
    both ``b_+`` and ``b_-`` land on the right side; coefficients are random
    complex numbers normalized to Wiener norm 1.
    """
    N = rng.randint(1, 5)
    nu = Fraction(rng.randint(1, 8), rng.choice((1, 2, 3, 4)))
    beta = Fraction(rng.randint(1, 8), rng.choice((1, 2, 3, 4)))
    lam = N * (nu + beta)
    top_p = nu / (N - 1) if N > 1 else nu
    top_m = beta / (N - 1) if N > 1 else beta

    def rand_poly(top: Fraction, sign: int) -> APPoly:
        k = rng.randint(1, 6)
        terms = []
        for _ in range(k):
            f = sign * top * Fraction(rng.randint(0, 12), 12)
            c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            terms.append((f, c))
        p = APPoly(terms)
        if p.is_zero():
            p = APPoly.const(1.0)
        return p / p.norm1()

    a_plus = rand_poly(top_p, 1)
    a_minus = rand_poly(top_m, -1)
    if N > 1:
        b_plus = a_minus.shift(beta / (N - 1))
        b_minus = a_plus.shift(-nu / (N - 1))
    else:
        b_plus = b_minus = None
    g = a_minus.shift(-beta) + a_plus.shift(nu)
    gap = decompose(TriangularSymbol(lam, g))
    return ClassMembership(lam, N, nu, nu, nu, beta, a_minus, a_plus, b_minus, b_plus, gap)


def criterion_1(count: int = 500, seed: int = 20240501) -> CriterionResult:
    rng = random.Random(seed)
    failures = 0
    worst = 0.0
    for k in range(count):
        m = random_membership(rng)
        sym = TriangularSymbol(m.lam, m.g())
        sol = solve_structured(m)
        rep = verify_solution(sym, sol, points=0)
        worst = max(worst, *(r.norm1() for r in row_defects(sym.lam, sym.g, sol)))
        if not rep.passed:
            failures += 1
    return CriterionResult(1, "solution identity on random memberships",
                           failures == 0 and worst <= 1e-12,
                           f"{count} cases, {failures} failures, worst coefficient error {worst:.1e}")


def criterion_2() -> CriterionResult:
    sym = TriangularSymbol(4, e(-1) + e(1))
    m = classify(sym)
    sol = solve_structured(m)
    red = exponential_reduction(sol)
    v = classify_toeplitz(sym)
    ok = (m.N == 2 and m.chosen_nu == 1
          and sol.phi1_plus == e(3) - e(1) and sol.phi2_plus == APPoly.const(-1)
          and sol.phi1_minus == e(-1) - e(-3) and sol.phi2_minus == APPoly.const(-1)
          and red.mu == 0 and v.verdict is Verdict.INVERTIBLE)
    return CriterionResult(2, "worked example lambda=4, g=e(-1)+e(1)", ok,
                           f"phi_+=({sol.phi1_plus}, {sol.phi2_plus}), "
                           f"phi_-=({sol.phi1_minus}, {sol.phi2_minus}), mu={red.mu}, "
                           f"verdict={v.verdict.value}")


def lambda2_factorization() -> tuple[TriangularSymbol, Factorization]:
    sym = TriangularSymbol(2, e(-1) + e(1))
    sol = solve_structured(classify(sym))
    return sym, construct_factorization(sym, sol)


def criterion_3() -> CriterionResult:
    sym, fac = lambda2_factorization()
    Gm = mat2.mat(e(-1), e(-2) - 1, 1, e(-1))
    Gp = mat2.mat(e(1), 1 - e(2), -1, e(1))
    exact = fac.G_minus == Gm and fac.G_plus == Gp
    dets = mat2.det(fac.G_minus) == 1 and mat2.det(fac.G_plus) == 1
    recon = fac.reconstruct() == sym.matrix()
    rep = grid_residual(sym, fac, points=100, seed=0)
    ok = exact and dets and recon and rep.max_residual < 1e-12
    return CriterionResult(3, "canonical factorization lambda=2", ok,
                           f"factors exact={exact}, det=1: {dets}, symbolic reconstruction={recon}, "
                           f"grid residual {rep.max_residual:.1e}")


def criterion_4() -> CriterionResult:
    g1 = decompose(TriangularSymbol(3, e(-2) + e(2)))
    r1 = indices_biggap(g1, 3)
    s2 = TriangularSymbol(3, e(-1) + e(1))
    m2 = classify(s2)
    strip2 = _strip(s2)
    r2 = indices_structured(m2.gap, 3, m2.N, strip2)
    cands = structured_index_candidates(m2.gap, 3, m2.N)
    s3 = TriangularSymbol(4, e(-1) + e(1))
    m3 = classify(s3)
    r3 = indices_structured(m3.gap, 4, m3.N, _strip(s3))
    ok = (r1.mu == 1 and r2.mu == 1 and set(cands.values()) == {1} and r3.mu == 0
          and r3.status is IndexStatus.CANONICAL)
    return CriterionResult(4, "index formulas", ok,
                           f"big gap mu={r1.mu}; lambda=3 mu={r2.mu} with expressions "
                           f"{sorted(str(v) for v in cands.values())}; lambda=4 mu={r3.mu}")


def _strip(sym):
    gap = decompose(sym)
    return strip_condition(gap.g_minus, gap.g_plus)


def criterion_5() -> CriterionResult:
    v4 = classify_toeplitz(TriangularSymbol(4, e(-2) + e(2)))
    v3 = classify_toeplitz(TriangularSymbol(3, e(-2) + e(2)))
    eq_branch = f"{SINGLE_EXP_GAP}:equals-lambda" in v4.justification
    endpoint = "gap-equals-lambda" in v4.justification
    gt_branch = f"{SINGLE_EXP_GAP}:exceeds-lambda" in v3.justification
    ok = (v4.verdict is Verdict.INVERTIBLE and eq_branch and endpoint
          and v3.verdict is Verdict.FACTORABLE_NON_CANONICAL and v3.mu == 1
          and v3.not_semi_fredholm and gt_branch)
    return CriterionResult(5, "cross-check of verdict routes", ok,
                           f"lambda=4: {v4.verdict.value} via {v4.justification}; "
                           f"lambda=3: {[x.value for x in v3.verdicts]} mu={v3.mu}")


def criterion_6(grid: tuple[int, int] = (2000, 20)) -> CriterionResult:
    disagree = []
    fails_max, holds_min = 0.0, math.inf
    for gm, gp, expected in BINOMIAL_PAIRS:
        v = binomial_strip_criterion(gm, gp).plus
        est = strip_infimum_estimate(gm, gp, 1.0, 1.0, grid)
        oracle = Tri.FAILS if est < FAILS_BAND else Tri.HOLDS if est > HOLDS_BAND else Tri.UNKNOWN
        if v is Tri.FAILS:
            fails_max = max(fails_max, est)
        else:
            holds_min = min(holds_min, est)
        if v is not expected or oracle is not v:
            disagree.append(f"({gm}, {gp})")
    named_f = strip_infimum_estimate(e(-2) + e(-1), e(1) + e(2), 1.0, 1.0, grid)
    named_h = strip_infimum_estimate(e(-2) + e(-1), e(1) + 2 * e(2), 1.0, 1.0, grid)
    ok = not disagree and named_f < 1e-2 and named_h > 1e-1
    return CriterionResult(6, "binomial strip criterion vs sampling", ok,
                           f"{len(BINOMIAL_PAIRS)} pairs, {len(disagree)} disagreements; "
                           f"max Fails minimum {fails_max:.1e}, min Holds minimum {holds_min:.2e}")


def criterion_7() -> CriterionResult:
    sym = TriangularSymbol(3, e(-2) + e(3),
                           DeclaredSpectrum(eta1_plus=Fraction(2), eta1_plus_attained=False))
    idx = indices_biggap(decompose(sym), 3)
    v = classify_toeplitz(sym)
    ok = idx.status is IndexStatus.NOT_AP_FACTORABLE and v.verdict is Verdict.NOT_AP_FACTORABLE
    return CriterionResult(7, "missing endpoint is not factorable", ok,
                           f"index status {idx.status.value}, verdict {v.verdict.value}")


def criterion_8(tol: float = 1e-10) -> CriterionResult:
    _, f1 = lambda2_factorization()
    S = mat2.mat(2, 0, 0, 1)
    f2 = Factorization(mat2.matmul(f1.G_minus, S), mat2.matmul(f1.G_plus, S), f1.D_exponents)
    Z = canonical_equivalence(f1, f2, tol)
    ok = bool(np.abs(Z - np.diag([2, 1])).max() < tol)
    return CriterionResult(8, "canonical factorizations differ by a constant", ok,
                           f"Z = {np.round(Z.real, 12).tolist()}")


def criterion_9(tol: float = 1e-6, points: int = 10_000) -> CriterionResult:
    x = sample_points(points, seed=9)
    worst = 0.0
    for w1, w2, side in DOMINANT_PAIRS:
        h = corona_pair(w1, w2, side, tol)
        r = np.abs(w1(x) * h.h1(x) + w2(x) * h.h2(x) - 1).max()
        worst = max(worst, float(r))
    ok = worst <= tol
    return CriterionResult(9, "corona pair residuals", ok,
                           f"{len(DOMINANT_PAIRS)} pairs, max sampled residual {worst:.1e}")


def criterion_10(grid: tuple[int, int] = (2000, 20)) -> CriterionResult:
    bad = []
    lines = []
    for sym in STRUCTURED_SET:
        m = classify(sym)
        sol = solve_structured(m)
        s_phi = strip_infimum_estimate(sol.phi1_plus, sol.phi2_plus, 1.0, 1.0, grid)
        s_a = strip_infimum_estimate(m.a_plus, m.a_minus, 1.0, 1.0, grid)
        side_phi = s_phi > HOLDS_BAND if s_phi > FAILS_BAND or s_phi < HOLDS_BAND else None
        side_a = s_a > HOLDS_BAND if s_a > FAILS_BAND or s_a < HOLDS_BAND else None
        if m.N < 2 or side_phi is None or side_a is None or side_phi != side_a:
            bad.append(str(sym.g))
        lines.append(f"{s_phi:.1e}/{s_a:.1e}")
    return CriterionResult(10, "sampled equivalence of strip infima", not bad,
                           f"{len(STRUCTURED_SET)} symbols, {len(bad)} split; minima {', '.join(lines)}")


CRITERIA: list[Callable[[], CriterionResult]] = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
]


def run_suite() -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        t0 = time.perf_counter()
        try:
            res = fn()
        except Exception as exc:  # a crash is a failed criterion, not a crashed battery
            num = CRITERIA.index(fn) + 1
            res = CriterionResult(num, fn.__name__, False, f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out
