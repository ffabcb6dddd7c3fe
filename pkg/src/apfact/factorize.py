"""Partial indices, Toeplitz verdicts and explicit factorizations ``G = G_- D G_+^{-1}``.

The construction goes through a solution ``(phi_+, phi_-)`` of ``G phi_+ = phi_-``:
exponential factors are pulled out, both reduced vectors are completed to
determinant-one matrices ``H_+`` and ``H_-``, and the remaining upper
triangular symbol is split by hand.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import mat2
from .appoly import INF, APPoly, FreqLike, as_freq, freq_str, split_at
from .corona import (
    CoronaPair,
    CoronaVerdict,
    Tri,
    build_H,
    corona_pair,
    spectral_corona_check,
    strip_condition,
)
from .errors import (
    CoronaUnsupported,
    NotBigGap,
    NotEquivalent,
    ReconstructionFailure,
)
from .rhsolve import (
    RHSolution,
    biggap_nu_range,
    exponential_reduction,
    one_sided_solutions,
    solve_biggap,
    solve_structured,
)
from .symbol import (
    ClassMembership,
    GapData,
    NotInClass,
    TriangularSymbol,
    classify,
    classify_exp_form,
    decompose,
    with_nu,
)

# justification tags
BIG_GAP_INDEX = "big-gap-index"
STRUCTURED_INDEX = "structured-index"
SINGLE_EXP_GAP = "single-exponential-gap"
SINGLE_EXP_WINDOW = "single-exponential-window"
ONE_SIDED = "one-sided"
SHIFTED_SOLUTION = "shifted-solution-and-transpose"
CANONICAL_FACTOR = "canonical-factorization"


class IndexStatus(enum.Enum):
    CANONICAL = "Canonical"
    NON_CANONICAL = "NonCanonical"
    NOT_AP_FACTORABLE = "NotAPFactorable"
    UNKNOWN = "Unknown"


class Verdict(enum.Enum):
    INVERTIBLE = "Invertible"
    FACTORABLE_NON_CANONICAL = "FactorableNonCanonical"
    NOT_SEMI_FREDHOLM = "NotSemiFredholm"
    NOT_AP_FACTORABLE = "NotAPFactorable"
    UNKNOWN = "Unknown"


@dataclass
class IndexResult:
    status: IndexStatus
    mu: Optional[Fraction] = None
    case_tag: str = ""
    first_columns: Optional[tuple] = None
    partial_indices: Optional[tuple[Fraction, Fraction]] = None
    detail: str = ""

    def __post_init__(self):
        if self.partial_indices is None and self.mu is not None:
            self.partial_indices = (-self.mu, self.mu)

    @property
    def factorable(self) -> bool:
        return self.status in (IndexStatus.CANONICAL, IndexStatus.NON_CANONICAL)

    def to_json(self) -> dict:
        return {
            "status": self.status.value,
            "mu": None if self.mu is None else freq_str(self.mu),
            "case_tag": self.case_tag,
            "partial_indices": None if self.partial_indices is None
            else [freq_str(d) for d in self.partial_indices],
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, data: dict) -> "IndexResult":
        mu = data.get("mu")
        pi = data.get("partial_indices")
        return cls(
            IndexStatus(data["status"]),
            None if mu is None else as_freq(mu),
            data.get("case_tag", ""),
            None,
            None if pi is None else tuple(as_freq(d) for d in pi),
            data.get("detail", ""),
        )


def _status_for(mu: Fraction) -> IndexStatus:
    return IndexStatus.CANONICAL if mu == 0 else IndexStatus.NON_CANONICAL


def indices_biggap(gap: GapData, lam: FreqLike) -> IndexResult:
    """Factorability and index when the gap around zero is at least ``lam``.

    Each inner endpoint must be in the spectrum or be at least ``lam`` away;
    then ``mu = min(lam, eta1_+, eta1_-, eta1_+ + eta1_- - lam)``.
    """
    lam = as_freq(lam)
    if gap.gap_sum < lam:
        raise NotBigGap(f"eta1_+ + eta1_- = {gap.gap_sum} < lambda = {lam}")
    sides = []
    for name, eta, att in (("plus", gap.eta1_plus, gap.att1_plus),
                           ("minus", gap.eta1_minus, gap.att1_minus)):
        if eta >= lam or att is True:
            sides.append(True)
        elif att is False:
            return IndexResult(IndexStatus.NOT_AP_FACTORABLE, case_tag=BIG_GAP_INDEX,
                               detail=f"eta1_{name}={freq_str(eta)} < lambda and not attained")
        else:
            sides.append(None)
    if None in sides:
        return IndexResult(IndexStatus.UNKNOWN, case_tag=BIG_GAP_INDEX,
                           detail="attainment of an inner endpoint is undeclared")
    mu = min(lam, gap.eta1_plus, gap.eta1_minus, gap.gap_sum - lam)
    mu = as_freq(mu)
    return IndexResult(_status_for(mu), mu, BIG_GAP_INDEX)


def structured_index_candidates(gap: GapData, lam: FreqLike, N: int) -> dict[str, Fraction]:
    """The four index expressions for a symbol of order ``N > 1``."""
    lam = as_freq(lam)
    e1p, e2p, e1m, e2m = gap.eta1_plus, gap.eta2_plus, gap.eta1_minus, gap.eta2_minus
    return {
        "inner": N * (e1p + e1m) - lam,
        "plus": N * e1p - (N - 1) * e2p,
        "minus": N * e1m - (N - 1) * e2m,
        "outer": lam - (N - 1) * (e2p + e2m),
    }


def indices_structured(gap: GapData, lam: FreqLike, N: int, strip: CoronaVerdict) -> IndexResult:
    """Index for a symbol of order ``N > 1`` once the strip condition holds.

    Four cases, keyed by which endpoints are attained and where ``lam`` sits
    relative to ``A = N eta1_+ + (N-1) eta2_-`` and ``B = N eta1_- + (N-1) eta2_+``.
    Cases meeting at a boundary give the same value, which is also the
    minimum of all four expressions.
    """
    lam = as_freq(lam)
    if N < 2:
        raise ValueError("structured indices need N > 1")
    if strip.verdict is not Tri.HOLDS:
        return IndexResult(IndexStatus.UNKNOWN, case_tag=STRUCTURED_INDEX,
                           detail=f"strip condition {strip.verdict.value}")
    if gap.plus_empty or gap.minus_empty:
        return IndexResult(IndexStatus.UNKNOWN, case_tag=STRUCTURED_INDEX,
                           detail="an empty side has no order N > 1 structure")
    e1p, e2p, e1m, e2m = gap.eta1_plus, gap.eta2_plus, gap.eta1_minus, gap.eta2_minus
    A = N * e1p + (N - 1) * e2m
    B = N * e1m + (N - 1) * e2p
    vals = structured_index_candidates(gap, lam, N)
    cases = {
        "inner": (gap.att1_plus, gap.att1_minus, lam >= max(A, B)),
        "plus": (gap.att1_plus, gap.att2_plus, A <= lam <= B),
        "minus": (gap.att1_minus, gap.att2_minus, B <= lam <= A),
        "outer": (gap.att2_plus, gap.att2_minus, lam <= min(A, B)),
    }
    fired = [k for k, (a1, a2, ok) in cases.items() if ok and a1 is True and a2 is True]
    if not fired:
        undecided = [k for k, (a1, a2, ok) in cases.items() if ok and None in (a1, a2)]
        detail = ("attainment undeclared for case " + ", ".join(undecided)) if undecided \
            else "no case applies"
        return IndexResult(IndexStatus.UNKNOWN, case_tag=STRUCTURED_INDEX, detail=detail)
    fired_vals = {vals[k] for k in fired}
    if len(fired_vals) != 1:
        raise AssertionError(f"index cases {fired} disagree: {fired_vals}")
    mu = as_freq(fired_vals.pop())
    if mu != min(vals.values()):
        raise AssertionError(f"index {mu} is not the minimum of {vals}")
    return IndexResult(_status_for(mu), mu, f"{STRUCTURED_INDEX}:{'+'.join(fired)}")


@dataclass
class ToeplitzVerdict:
    verdict: Verdict
    mu: Optional[Fraction] = None
    justification: list[str] = field(default_factory=list)
    not_semi_fredholm: bool = False
    only_if: bool = False
    notes: list[str] = field(default_factory=list)
    index: Optional[IndexResult] = None
    corona: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> list[Verdict]:
        out = [self.verdict]
        if self.not_semi_fredholm and self.verdict is not Verdict.NOT_SEMI_FREDHOLM:
            out.append(Verdict.NOT_SEMI_FREDHOLM)
        return out

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "verdicts": [v.value for v in self.verdicts],
            "mu": None if self.mu is None else freq_str(self.mu),
            "justification": list(self.justification),
            "not_semi_fredholm": self.not_semi_fredholm,
            "only_if": self.only_if,
            "notes": list(self.notes),
            "index": None if self.index is None else self.index.to_json(),
            "corona": {k: v.to_json() for k, v in self.corona.items()},
        }


def _single_exp_gap(gap: GapData, lam: Fraction) -> tuple[Optional[bool], bool, str]:
    """Big-gap test for ``g_-`` a single exponential ``c e_{-sigma}``.

    Returns (invertible, not_semi_fredholm, note).  Invertibility needs
    ``eta1_+ + sigma = lam`` and ``eta1_+`` in the spectrum, which makes the
    mean of ``e_{-eta1_+} g_+`` nonzero.
    """
    s = gap.eta1_minus + gap.eta1_plus
    if s > lam:
        return False, True, f"eta1_+ + sigma = {s} > lambda"
    if gap.att1_plus is None:
        return None, False, "attainment of eta1_+ undeclared"
    return bool(gap.att1_plus), False, f"eta1_+ + sigma = lambda, eta1_+ attained={gap.att1_plus}"


def _exp_window_nsf(sym: TriangularSymbol) -> bool:
    """No semi-Fredholm property when the exponent window has interior.

    For ``g = c e_{-sigma} + g_+`` of order ``N > 1`` the exponent ``mu`` of
    ``g_+ = e_mu a_+`` may range over an interval; if it has interior one of
    the strict inequalities that shift a solution by a positive exponential
    can be met.
    """
    try:
        m = classify_exp_form(sym)
    except Exception:
        return False
    return bool(m) and m.N > 1 and m.nu_min < m.nu_max


def classify_toeplitz(sym: TriangularSymbol, apw_flag: bool = False) -> ToeplitzVerdict:
    """Invertibility / factorability verdict for the Toeplitz operator with symbol ``G``.

    "Only if" strength is recorded in ``only_if``: it holds for input known to
    be absolutely convergent, which includes every native exponential
    polynomial.
    """
    only_if = bool(apw_flag or sym.is_native)
    lam = sym.lam
    gap = decompose(sym)

    if gap.has_zero_frequency:
        sols = one_sided_solutions(sym)
        if sols:
            return ToeplitzVerdict(Verdict.INVERTIBLE, Fraction(0), [ONE_SIDED], False, only_if,
                                   [f"corona solution phi_+ = ({sols[0].phi1_plus}, "
                                    f"{sols[0].phi2_plus}), phi_- = ({sols[0].phi1_minus}, "
                                    f"{sols[0].phi2_minus})"])
        return ToeplitzVerdict(Verdict.UNKNOWN, None, [], False, only_if,
                               ["zero frequency present but g is not one-sided"])

    if gap.gap_sum >= lam:
        idx = indices_biggap(gap, lam)
        sc = spectral_corona_check(gap, 1, lam)
        just = [BIG_GAP_INDEX] + list(sc.fired_conditions)
        notes = []
        nsf = False
        single = None
        if gap.g_minus.is_single_exponential() and not gap.plus_empty:
            single, nsf_exp, note = _single_exp_gap(gap, lam)
            notes.append(note)
            branch = "exceeds-lambda" if nsf_exp else {True: "equals-lambda", False: "endpoint-missing",
                                                        None: "undecided"}[single]
            just.append(f"{SINGLE_EXP_GAP}:{branch}")
            nsf = nsf or nsf_exp
        if idx.status is IndexStatus.NOT_AP_FACTORABLE:
            return ToeplitzVerdict(Verdict.NOT_AP_FACTORABLE, None, just, nsf, only_if,
                                   notes + [idx.detail], idx, {"spectral": sc})
        if idx.status is IndexStatus.UNKNOWN:
            v = Verdict.NOT_SEMI_FREDHOLM if nsf else Verdict.UNKNOWN
            if single is True:
                v = Verdict.INVERTIBLE
            return ToeplitzVerdict(v, None, just, nsf, only_if, notes + [idx.detail], idx,
                                   {"spectral": sc})
        if idx.mu == 0:
            if single is False or sc.plus is Tri.FAILS:
                raise AssertionError("canonical index disagrees with the endpoint test")
            return ToeplitzVerdict(Verdict.INVERTIBLE, idx.mu, just + [CANONICAL_FACTOR], False,
                                   only_if, notes, idx, {"spectral": sc})
        just.append(SHIFTED_SOLUTION)
        return ToeplitzVerdict(Verdict.FACTORABLE_NON_CANONICAL, idx.mu, just, True, only_if,
                               notes, idx, {"spectral": sc})

    m = classify(sym)
    if isinstance(m, NotInClass):
        return ToeplitzVerdict(Verdict.UNKNOWN, None, [], False, only_if,
                               [f"not in any structured class: {m.reason}"])
    N = m.N
    sc = spectral_corona_check(gap, N, lam)
    st = strip_condition(gap.g_minus, gap.g_plus)
    corona = {"spectral": sc, "strip": st}
    just = list(sc.fired_conditions) + list(st.fired_conditions)
    notes = [f"order N={N}"]
    if sc.verdict is Tri.HOLDS and st.verdict is Tri.HOLDS:
        idx = indices_structured(gap, lam, N, st)
        if idx.factorable and idx.mu != 0:
            raise AssertionError("invertible symbol with nonzero structured index")
        return ToeplitzVerdict(Verdict.INVERTIBLE, Fraction(0), just + [CANONICAL_FACTOR], False,
                               only_if, notes, idx, corona)
    if st.verdict is Tri.HOLDS:
        idx = indices_structured(gap, lam, N, st)
        just.append(idx.case_tag)
        if idx.status is IndexStatus.NON_CANONICAL:
            return ToeplitzVerdict(Verdict.FACTORABLE_NON_CANONICAL, idx.mu,
                                   just + [SHIFTED_SOLUTION], True, only_if, notes, idx, corona)
        if idx.status is IndexStatus.CANONICAL:
            return ToeplitzVerdict(Verdict.INVERTIBLE, idx.mu, just + [CANONICAL_FACTOR], False,
                                   only_if, notes, idx, corona)
        if idx.detail:
            notes.append(idx.detail)
        if _exp_window_nsf(sym):
            return ToeplitzVerdict(Verdict.NOT_SEMI_FREDHOLM, None, just + [SINGLE_EXP_WINDOW],
                                   True, only_if, notes, idx, corona)
        if sc.verdict is Tri.FAILS and only_if:
            notes.append("endpoint conditions fail: not invertible")
        return ToeplitzVerdict(Verdict.UNKNOWN, None, just, False, only_if, notes, idx, corona)
    if st.verdict is Tri.FAILS:
        notes.append("strip condition fails: not invertible for absolutely convergent symbols"
                     if only_if else "strip condition fails")
    else:
        notes.append("strip condition undecided")
    return ToeplitzVerdict(Verdict.UNKNOWN, None, just, False, only_if, notes, None, corona)


@dataclass
class Factorization:
    G_minus: mat2.Mat2
    G_plus: mat2.Mat2
    D_exponents: tuple[Fraction, Fraction]
    truncation_residual: float = 0.0
    reconstruction_residual: float = 0.0
    first_columns: Optional[tuple] = None
    corona_pairs: Optional[tuple[CoronaPair, CoronaPair]] = None

    @property
    def mu(self) -> Fraction:
        return self.D_exponents[1]

    @property
    def canonical(self) -> bool:
        return self.D_exponents == (0, 0)

    def D(self) -> mat2.Mat2:
        return mat2.mat(APPoly.exp(self.D_exponents[0]), 0, 0, APPoly.exp(self.D_exponents[1]))

    def reconstruct(self) -> mat2.Mat2:
        """``G_- D G_+^{-1}`` with ``G_+^{-1}`` taken from its adjugate."""
        inv = mat2.inverse_const_det(self.G_plus, tol=1e-12)
        return mat2.matmul(mat2.matmul(self.G_minus, self.D()), inv)

    def to_json(self) -> dict:
        return {
            "G_minus": mat2.to_json(self.G_minus),
            "G_plus": mat2.to_json(self.G_plus),
            "D_exponents": [freq_str(d) for d in self.D_exponents],
            "truncation_residual": self.truncation_residual,
            "reconstruction_residual": self.reconstruction_residual,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Factorization":
        return cls(
            mat2.from_json(data["G_minus"]),
            mat2.from_json(data["G_plus"]),
            tuple(as_freq(d) for d in data["D_exponents"]),
            float(data.get("truncation_residual", 0.0)),
            float(data.get("reconstruction_residual", 0.0)),
        )


def _mat_norm(A: mat2.Mat2) -> float:
    return max(A[i][0].norm1() + A[i][1].norm1() for i in range(2))


def factorization_problems(sym: TriangularSymbol, fac: Factorization, tol: float) -> list[str]:
    """Invariant checks on a factorization; an empty list means it is valid."""
    out = []
    for name, M, ok in (("G_plus", fac.G_plus, APPoly.in_upper),
                        ("G_minus", fac.G_minus, APPoly.in_lower)):
        bad = [f"({i + 1},{j + 1})" for (i, j), e in mat2.entries(M) if not ok(e)]
        if bad:
            out.append(f"{name} entries {', '.join(bad)} on the wrong side")
        d = mat2.det(M)
        c = d.coefficient(0)
        if abs(c) < 1e-12 or (d - APPoly.const(c)).norm1() > tol:
            out.append(f"det {name} is not a nonzero constant: {d}")
    if fac.D_exponents[0] + fac.D_exponents[1] != 0:
        out.append("partial indices do not sum to zero")
    if not out:
        R = fac.reconstruct()
        G = sym.matrix()
        err = max(R[i][j].max_abs_diff(G[i][j]) for i in range(2) for j in range(2))
        wiener = max((R[i][j] - G[i][j]).norm1() for i in range(2) for j in range(2))
        fac.reconstruction_residual = wiener
        if err > tol and wiener > tol:
            out.append(f"reconstruction residual {wiener:.3e} exceeds {tol:.1e}")
    return out


def factor_from_columns(sym: TriangularSymbol, psi_plus_tilde: tuple[APPoly, APPoly],
                        psi_minus: tuple[APPoly, APPoly], mu: FreqLike, tol: float = 1e-10,
                        pairs: Optional[tuple[CoronaPair, CoronaPair]] = None) -> Factorization:
    """Factor ``G`` from corona vectors with ``G e_mu psi~_+ = psi_-``.

    ``pairs`` may supply the Bezout pairs for the plus and minus vectors;
    otherwise they are constructed.  The first columns of ``G_+`` and ``G_-``
    are ``psi~_+`` and ``psi_-``.
    """
    mu = as_freq(mu)
    if mu < 0:
        raise ValueError("mu must be non-negative")
    inner_tol = tol / 100
    if pairs is None:
        hp = corona_pair(psi_plus_tilde[0], psi_plus_tilde[1], "plus", inner_tol)
        hm = corona_pair(psi_minus[0], psi_minus[1], "minus", inner_tol)
    else:
        hp, hm = pairs
    psi_plus = (psi_plus_tilde[0].shift(mu), psi_plus_tilde[1].shift(mu))
    Hp = build_H(psi_plus, hp, mu, "plus", tol)
    Hm = build_H(psi_minus, hm, 0, "minus", tol)

    G1 = mat2.matmul(mat2.matmul(mat2.adjugate(Hm), sym.matrix()), Hp)
    # G1 is [[e_{-mu}, g1], [0, e_mu]] up to truncation
    trunc = max(
        G1[1][0].norm1(),
        (G1[0][0] - APPoly.exp(-mu)).norm1(),
        (G1[1][1] - APPoly.exp(mu)).norm1(),
    )
    if trunc > tol:
        raise ReconstructionFailure(f"reduced symbol is not upper triangular (defect {trunc:.3e})")
    parts = split_at(G1[0][1].shift(mu), 0, include_boundary_in_upper=True)
    g_plus = parts.upper
    g_minus = parts.lower.shift(-2 * mu)
    L_minus = mat2.mat(1, g_minus, 0, 1)
    L_plus = mat2.mat(1, -g_plus, 0, 1)
    fac = Factorization(
        G_minus=mat2.matmul(Hm, L_minus),
        G_plus=mat2.matmul(Hp, L_plus),
        D_exponents=(-mu, mu),
        truncation_residual=max(trunc, hp.residual_bound, hm.residual_bound),
        first_columns=(psi_plus_tilde, psi_minus),
        corona_pairs=(hp, hm),
    )
    problems = factorization_problems(sym, fac, max(tol, 1e-12))
    if problems:
        raise ReconstructionFailure("; ".join(problems))
    return fac


def construct_factorization(sym: TriangularSymbol, sol: RHSolution, tol: float = 1e-10) -> Factorization:
    """Factor ``G`` from one solution of ``G phi_+ = phi_-``."""
    red = exponential_reduction(sol)
    return factor_from_columns(sym, red.psi_plus, red.psi_minus, red.mu, tol)


def default_solution(sym: TriangularSymbol, nu: Optional[FreqLike] = None) -> Optional[RHSolution]:
    """The solution the pipeline factors from, or ``None`` when no formula applies."""
    gap = decompose(sym)
    if gap.has_zero_frequency:
        sols = one_sided_solutions(sym)
        return sols[0] if sols else None
    if gap.gap_sum >= sym.lam:
        lo, hi = biggap_nu_range(gap, sym.lam)
        return solve_biggap(gap, sym.lam, lo if nu is None else nu)
    m = classify(sym)
    if isinstance(m, NotInClass):
        return None
    if nu is not None:
        m = with_nu(m, nu)
    return solve_structured(m)


def canonical_equivalence(f1: Factorization, f2: Factorization, tol: float = 1e-10) -> np.ndarray:
    """Constant ``Z`` with ``f2.G_pm = f1.G_pm Z``, or :class:`NotEquivalent`."""
    if not (f1.canonical and f2.canonical):
        raise NotEquivalent("both factorizations must be canonical")
    Zs = []
    for name in ("G_plus", "G_minus"):
        A, B = getattr(f1, name), getattr(f2, name)
        Z = mat2.matmul(mat2.inverse_const_det(A, tol), B)
        for (i, j), e in mat2.entries(Z):
            rest = e - APPoly.const(e.coefficient(0))
            if rest.norm1() > tol:
                raise NotEquivalent(f"entry ({i + 1},{j + 1}) of {name} ratio is not constant: {e}")
        Zs.append(np.array([[Z[i][j].coefficient(0) for j in range(2)] for i in range(2)]))
    if np.abs(Zs[0] - Zs[1]).max() > tol:
        raise NotEquivalent(f"plus and minus ratios differ: {Zs[0].tolist()} vs {Zs[1].tolist()}")
    return Zs[0]


def mean_motion_balance(result: IndexResult) -> bool:
    """Partial indices add up to the mean motion of ``det G = 1``, which is 0."""
    if result.partial_indices is None:
        raise ValueError("result carries no partial indices")
    d1, d2 = result.partial_indices
    return d1 + d2 == 0


_J = mat2.mat(0, -1, 1, 0)
_J_INV = mat2.mat(0, 1, -1, 0)


def transposed_inverse(G: mat2.Mat2) -> mat2.Mat2:
    """``(G^{-1})^T`` for a matrix with determinant 1."""
    return mat2.transpose(mat2.adjugate(G))


def gt_conjugate(G: mat2.Mat2) -> mat2.Mat2:
    """``J G J^{-1}`` with ``J = [[0, -1], [1, 0]]``; equals ``G^{-T}`` when det G = 1."""
    return mat2.matmul(mat2.matmul(_J, G), _J_INV)
