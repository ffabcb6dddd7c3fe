from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apfact.appoly import APPoly
from apfact.errors import InvariantViolation, NotBigGap, NuOutOfRange, ZeroSolution
from apfact.rhsolve import (
    Provenance,
    RHSolution,
    exponential_reduction,
    one_sided_solutions,
    regrouped_phi1_minus,
    regrouped_phi1_plus,
    row_defects,
    solve_biggap,
    solve_structured,
    verify_solution,
)
from apfact.suite import random_membership
from apfact.symbol import CriterionCase, TriangularSymbol, choose_nu, classify, decompose, with_nu

from conftest import e

F = Fraction
ONE = APPoly.const(1)


def sym(lam, g) -> TriangularSymbol:
    return TriangularSymbol(F(lam), g)


class TestStructured:
    def test_order_two_degenerate(self):
        sol = solve_structured(classify(sym(4, e(-1) + e(1))))
        assert sol.phi_plus == (e(3) - e(1), -ONE)
        assert sol.phi_minus == (e(-1) - e(-3), -ONE)
        assert sol.provenance is Provenance.STRUCTURED

    def test_order_one(self):
        sol = solve_structured(classify(sym(2, e(-1) + e(1))))
        assert sol.phi_plus == (e(1), -ONE)
        assert sol.phi_minus == (e(-1), ONE)

    def test_order_two_with_nu_one(self):
        m = with_nu(classify(sym(3, e(-1) + e(1))), 1)
        assert m.beta == F(1, 2) and m.a_minus == e(F(-1, 2))
        sol = solve_structured(m)
        assert sol.phi_plus == (e(2) - 1, -ONE)
        assert sol.phi_minus == (e(-1) - e(-3), -e(-1))
        assert sol.used_nu == 1

    def test_corrupted_membership(self):
        m = classify(sym(4, e(-1) + e(1)))
        bad = type(m)(m.lam, m.N, m.nu_min, m.nu_max, m.chosen_nu, m.beta,
                      m.a_minus.shift(1), m.a_plus, m.b_minus, m.b_plus, m.gap)
        with pytest.raises(InvariantViolation):
            solve_structured(bad)

    def test_regrouped_forms(self):
        for lam, g in [(4, e(-1) + e(1)), (3, e(-1) + e(1)), (4, e(-1) + e(F(1, 2))),
                       (5, 2 * e(-1) + e(1) + e(F(5, 4)))]:
            m = classify(sym(lam, g))
            sol = solve_structured(m)
            assert regrouped_phi1_plus(m) == sol.phi1_plus
            assert regrouped_phi1_minus(m) == sol.phi1_minus


class TestBigGap:
    def test_example(self):
        gap = decompose(sym(3, e(-2) + e(2)))
        sol = solve_biggap(gap, 3, 1)
        assert sol.phi_plus == (e(2), -e(1))
        assert sol.phi_minus == (e(-1), ONE)
        assert sol.provenance is Provenance.BIG_GAP

    def test_nu_out_of_range(self):
        gap = decompose(sym(3, e(-2) + e(2)))
        with pytest.raises(NuOutOfRange):
            solve_biggap(gap, 3, F(7, 2))

    def test_not_big_gap(self):
        gap = decompose(sym(4, e(-1) + e(1)))
        for nu in (0, 1, 2):
            with pytest.raises(NotBigGap):
                solve_biggap(gap, 4, nu)

    def test_agrees_with_structured_up_to_scale(self):
        for lam, g in [(2, e(-1) + e(1)), (3, e(-2) + 3 * e(2)), (2, 2j * e(-3) + e(1) - e(5))]:
            s = sym(lam, g)
            m = classify(s)
            a = solve_structured(m)
            b = solve_biggap(m.gap, lam, m.nu)
            # proportional vectors have vanishing 2x2 minors
            assert a.phi1_plus * b.phi2_plus == a.phi2_plus * b.phi1_plus
            assert a.phi1_minus * b.phi2_minus == a.phi2_minus * b.phi1_minus


class TestOneSided:
    def test_gap_below_zero(self):
        sols = one_sided_solutions(sym(2, 1 + e(1) + e(-3)))
        assert len(sols) == 1
        s = sols[0]
        assert s.phi_plus == (e(2), -(1 + e(1)))
        assert s.phi_minus == (ONE, e(-1))

    def test_gap_above_zero(self):
        sols = one_sided_solutions(sym(2, 1 + e(-1) + e(3)))
        assert len(sols) == 1
        assert sols[0].phi_plus == (ONE, -e(1))
        assert sols[0].phi_minus == (e(-2), 1 + e(-1))

    def test_both_forms_gap_below_first(self):
        sols = one_sided_solutions(sym(2, 1 + e(2)))
        assert len(sols) == 2
        assert sols[0].phi_plus == (e(2), -(1 + e(2)))
        assert sols[0].phi_minus == (ONE, APPoly.zero())
        assert sols[1].phi_plus == (ONE, -ONE)

    def test_neither_form(self):
        assert one_sided_solutions(sym(2, 1 + e(-1) + e(1))) == []


class TestReduction:
    def test_big_gap(self):
        sol = solve_biggap(decompose(sym(3, e(-2) + e(2))), 3, 1)
        r = exponential_reduction(sol)
        assert (r.mu1, r.mu2, r.mu) == (1, 0, 1)
        assert r.psi_plus == (e(1), -ONE)

    def test_order_two_degenerate(self):
        r = exponential_reduction(solve_structured(classify(sym(4, e(-1) + e(1)))))
        assert (r.mu1, r.mu2, r.mu) == (0, 0, 0)

    def test_order_two_nu_one(self):
        m = with_nu(classify(sym(3, e(-1) + e(1))), 1)
        r = exponential_reduction(solve_structured(m))
        assert (r.mu1, r.mu2, r.mu) == (0, 1, 1)
        assert r.psi_minus == (1 - e(-2), -ONE)

    def test_zero_solution(self):
        z = APPoly.zero()
        with pytest.raises(ZeroSolution):
            exponential_reduction(RHSolution(z, z, z, z, Provenance.STRUCTURED))

    def test_extremes_are_zero(self):
        r = exponential_reduction(solve_biggap(decompose(sym(3, e(-2) + e(2))), 3, 1))
        assert min(p.min_freq() for p in r.psi_plus if p) == 0
        assert max(p.max_freq() for p in r.psi_minus if p) == 0


class TestVerify:
    def test_structured_output_passes(self):
        s = sym(3, e(-1) + e(1))
        rep = verify_solution(s, solve_structured(choose_nu(classify(s), CriterionCase.II)))
        assert rep.passed
        assert rep.max_residual < 1e-12
        assert rep.sample_count == 32

    def test_perturbed_solution_is_located(self):
        s = sym(4, e(-1) + e(1))
        sol = solve_structured(classify(s))
        bad = RHSolution(sol.phi1_plus, sol.phi2_plus + 1e-6, sol.phi1_minus, sol.phi2_minus,
                         sol.provenance, sol.used_nu)
        rep = verify_solution(s, bad)
        assert not rep.passed
        failed = {c.name: c.detail for c in rep.checks if not c.passed}
        assert list(failed) == ["row 2 identity"]
        assert "frequency 4" in failed["row 2 identity"]

    def test_zero_solution_is_trivial(self):
        z = APPoly.zero()
        rep = verify_solution(sym(2, e(1)), RHSolution(z, z, z, z, Provenance.STRUCTURED))
        assert rep.passed
        assert "trivial" in rep.flags

    def test_json_round_trip(self):
        sol = solve_biggap(decompose(sym(3, e(-2) + e(2))), 3, 1)
        assert RHSolution.from_json(sol.to_json()) == sol


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_memberships_solve_exactly(seed):
    m = random_membership(random.Random(seed))
    sol = solve_structured(m)
    r1, r2 = row_defects(m.lam, m.g(), sol)
    assert r1.is_zero() and r2.norm1() <= 1e-12
    rep = verify_solution(TriangularSymbol(m.lam, m.g()), sol, seed=seed)
    assert rep.passed, [c for c in rep.checks if not c.passed]
    assert regrouped_phi1_plus(m).allclose(sol.phi1_plus, 1e-12)
    assert regrouped_phi1_minus(m).allclose(sol.phi1_minus, 1e-12)
