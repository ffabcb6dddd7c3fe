from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from apfact import mat2
from apfact.appoly import APPoly
from apfact.errors import SingularFactor
from apfact.factorize import Factorization, construct_factorization, default_solution
from apfact.symbol import TriangularSymbol
from apfact.verify import (
    VerificationReport,
    grid_residual,
    spectrum_sign_audit,
    strip_grid,
    strip_infimum_estimate,
)

from conftest import e

ZERO = APPoly.zero()


@pytest.fixture(scope="module")
def lambda_two():
    s = TriangularSymbol(Fraction(2), e(-1) + e(1))
    return s, construct_factorization(s, default_solution(s))


def perturbed(fac: Factorization, delta: float) -> Factorization:
    Gp = [list(r) for r in fac.G_plus]
    Gp[0][0] = Gp[0][0] + delta * e(1)
    return Factorization(fac.G_minus, (tuple(Gp[0]), tuple(Gp[1])), fac.D_exponents)


class TestGridResidual:
    def test_exact_factorization(self, lambda_two):
        s, fac = lambda_two
        rep = grid_residual(s, fac, points=100)
        assert rep.passed and rep.max_residual < 1e-12 and rep.sample_count == 100

    def test_injected_fault(self, lambda_two):
        s, fac = lambda_two
        assert grid_residual(s, perturbed(fac, 1e-3), points=100).max_residual > 1e-4

    def test_no_points(self, lambda_two):
        s, fac = lambda_two
        rep = grid_residual(s, fac, points=0)
        assert rep.passed and "vacuous" in rep.flags and rep.sample_count == 0

    def test_deterministic(self, lambda_two):
        s, fac = lambda_two
        bad = perturbed(fac, 1e-4)
        a, b = grid_residual(s, bad, seed=7), grid_residual(s, bad, seed=7)
        assert a.max_residual == b.max_residual and a.worst_point == b.worst_point

    def test_linear_in_perturbation(self, lambda_two):
        s, fac = lambda_two
        deltas = np.logspace(-8, -2, 7)
        ratios = [grid_residual(s, perturbed(fac, d)).max_residual / d for d in deltas]
        assert max(ratios) / min(ratios) < 1.1

    def test_singular_factor(self, lambda_two):
        s, fac = lambda_two
        zero = Factorization(fac.G_minus, mat2.mat(0, 0, 0, 0), fac.D_exponents)
        with pytest.raises(SingularFactor):
            grid_residual(s, zero, points=10)

    def test_report_round_trip(self, lambda_two):
        s, fac = lambda_two
        rep = grid_residual(s, fac)
        assert VerificationReport.from_json(rep.to_json()) == rep


class TestStripEstimate:
    def test_common_zeros(self):
        assert strip_infimum_estimate(e(-2) + e(-1), e(1) + e(2)) < 1e-2

    def test_separated_zeros(self):
        assert strip_infimum_estimate(e(-2) + e(-1), e(1) + 2 * e(2)) > 1e-1

    def test_constant(self):
        assert strip_infimum_estimate(APPoly.const(1), ZERO) == pytest.approx(1)

    def test_refinement_is_monotone(self):
        f1, f2 = e(-3) + 0.7 * e(-1), e(Fraction(1, 2)) - 1.3 * e(2)
        grids = [(250, 5), (499, 10), (997, 20), (1993, 40)]
        ests = [strip_infimum_estimate(f1, f2, grid=g) for g in grids]
        assert all(b <= a for a, b in zip(ests, ests[1:]))

    def test_refined_grid_is_superset(self):
        x1, y1 = strip_grid(1, 1, (250, 5))
        x2, y2 = strip_grid(1, 1, (499, 10))
        assert np.isin(np.round(x1, 9), np.round(x2, 9)).all()
        assert np.isin(np.round(y1, 9), np.round(y2, 9)).all()

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            strip_grid(1, 1, (0, 5))


class TestSignAudit:
    def test_plus_factor(self, lambda_two):
        _, fac = lambda_two
        assert spectrum_sign_audit(fac.G_plus, "plus").passed

    def test_wrong_side(self, lambda_two):
        _, fac = lambda_two
        rep = spectrum_sign_audit(fac.G_plus, "minus")
        assert not rep.passed
        assert rep.checks[0].detail.startswith("(1,1)")

    def test_zero_matrix(self):
        assert spectrum_sign_audit(mat2.mat(0, 0, 0, 0), "plus").passed
        assert spectrum_sign_audit(mat2.mat(0, 0, 0, 0), "minus").passed
