from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apfact.appoly import (
    APPoly,
    add,
    as_freq,
    bohr_coefficient,
    evaluate,
    freq_str,
    mean_value,
    mul,
    neumann_inverse,
    neumann_terms_needed,
    shift,
    spectrum_bounds,
    split_at,
)
from apfact.errors import NotDominantBinomial, TruncationBudgetExceeded

from conftest import e, freqs, polys


class TestFrequencies:
    def test_string_is_normalized(self):
        assert as_freq("2/4") == Fraction(1, 2)
        assert freq_str(as_freq("2/4")) == "1/2"

    def test_float_goes_through_repr(self):
        assert as_freq(3.5) == Fraction(7, 2)
        assert as_freq(0.1) == Fraction(1, 10)

    def test_rejects_bool_and_nan(self):
        with pytest.raises(TypeError):
            as_freq(True)
        with pytest.raises(ValueError):
            as_freq(float("nan"))

    def test_big_integers_stay_exact(self):
        big = Fraction(2**80 + 1, 3)
        p = e(big) * e(-big)
        assert p == APPoly.const(1)


class TestArithmetic:
    def test_cancellation(self):
        assert add(e(1), -e(1)).is_zero()

    def test_disjoint_spectra(self):
        p = add(2 * e(-1) + 3, e(1))
        assert p.terms == ((-1, 2), (0, 3), (1, 1))

    def test_partial_cancellation(self):
        assert (1 + e(2)) + (1 - e(2)) == APPoly.const(2)

    def test_exponent_addition(self):
        assert mul(e(1), e(2)) == e(3)

    def test_product_with_internal_cancellation(self):
        assert (e(-1) + e(1)) * (e(3) - e(1)) == e(4) - 1

    def test_zero_absorbs(self):
        assert (e(1) + 2 * e("1/3")) * APPoly.zero() == APPoly.zero()

    def test_pruning_threshold(self):
        p = e(1) + 1e-15 * e(2)
        assert p.freqs == (1,)
        assert (e(1) * 1e-13).freqs == (1,)

    def test_power(self):
        assert (1 + e(1)) ** 2 == 1 + 2 * e(1) + e(2)
        assert (e(1) ** 0) == APPoly.const(1)


class TestInspection:
    def test_mean_value(self):
        assert mean_value(3 + 2 * e(1)) == 3
        assert mean_value(e(-1) + e(1)) == 0
        assert mean_value(APPoly.zero()) == 0

    def test_bohr_coefficient(self):
        assert bohr_coefficient(2 * e(-1) + 3 * e(2), 2) == 3
        assert bohr_coefficient(e(1), 0) == 0
        assert bohr_coefficient(e(1), 1) == 1

    def test_spectrum_bounds(self):
        assert spectrum_bounds(e(-2) + e(1) + 2 * e(3)) == (-2, 3)
        assert spectrum_bounds(APPoly.const(5)) == (0, 0)
        assert spectrum_bounds(APPoly.zero()) == (None, None)

    def test_formatting(self):
        assert str(e(-1) + 3 + 2 * e(1)) == "e(-1) + 3 + 2*e(1)"
        assert str(APPoly.zero()) == "0"


class TestEvaluation:
    def test_at_imaginary_unit(self):
        assert evaluate(e(1), 1j) == pytest.approx(math.exp(-1))

    def test_at_zero(self):
        assert evaluate(1 + e(2), 0) == pytest.approx(2)

    def test_cosine(self):
        assert evaluate(e(-1) + e(1), math.pi) == pytest.approx(-2)

    def test_vectorized_shape(self):
        z = np.zeros((3, 4))
        assert evaluate(e(1) + 1, z).shape == (3, 4)


class TestShiftAndSplit:
    def test_shift(self):
        assert shift(e(-1) + e(1), 1) == 1 + e(2)
        p = e("1/3") - 2
        assert shift(p, 0) == p
        assert shift(APPoly.const(3), -2) == 3 * e(-2)

    def test_split_boundary_upper(self):
        r = split_at(2 * e(-1) + 3 + 4 * e(2), 0, True)
        assert r.upper == 3 + 4 * e(2) and r.lower == 2 * e(-1)

    def test_split_boundary_lower(self):
        r = split_at(2 * e(-1) + 3 + 4 * e(2), 0, False)
        assert r.upper == 4 * e(2) and r.lower == 2 * e(-1) + 3

    def test_split_zero(self):
        r = split_at(APPoly.zero(), 5)
        assert r.upper.is_zero() and r.lower.is_zero()


class TestNeumann:
    def test_geometric_series(self):
        q = neumann_inverse(1 + 0.5 * e(1), tol=1e-6)
        n = neumann_terms_needed(0.5, 1e-6)
        expected = APPoly([(k, (-0.5) ** k) for k in range(n + 1)])
        assert q.allclose(expected, 1e-15)
        x = np.linspace(-50, 50, 10_000)
        assert np.abs((1 + 0.5 * e(1))(x) * q(x) - 1).max() <= 1e-6

    def test_closed_form_oracle(self):
        p = 2 * e(-1) + 0.5j * e("1/2")
        q = neumann_inverse(p, tol=1e-12)
        z = np.linspace(-20, 20, 101)
        assert np.allclose(q(z), 1 / p(z), atol=1e-11)

    def test_dominant_term_may_be_second(self):
        p = 0.25 + e(1)
        q = neumann_inverse(p, tol=1e-10)
        x = np.linspace(-10, 10, 1001)
        assert np.abs(p(x) * q(x) - 1).max() <= 1e-10

    def test_single_term_rejected(self):
        with pytest.raises(NotDominantBinomial):
            neumann_inverse(APPoly.const(2))

    def test_equal_moduli_rejected(self):
        with pytest.raises(NotDominantBinomial):
            neumann_inverse(e(1) + e(2))

    def test_budget(self):
        with pytest.raises(TruncationBudgetExceeded):
            neumann_inverse(1 + 0.999 * e(1), tol=1e-12, max_terms=100)


class TestSerialization:
    def test_round_trip(self):
        p = 2 * e("-1/3") + (1 - 2j) * e(5)
        assert APPoly.from_json(p.to_json()) == p

    def test_json_shape(self):
        assert e("1/2").to_json() == [{"freq": "1/2", "re": 1.0, "im": 0.0}]


@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@given(polys(), polys())
def test_spectrum_of_product(p, q):
    sums = {a + b for a in p.spectrum() for b in q.spectrum()}
    assert (p * q).spectrum() <= sums


@given(polys(), freqs)
def test_mean_of_shift_is_coefficient(p, lam):
    assert mean_value(p.shift(-lam)) == bohr_coefficient(p, lam)


@settings(max_examples=50)
@given(polys(), polys(), st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False))
def test_eval_is_multiplicative(p, q, z):
    z = complex(z.real, max(min(z.imag, 3.0), -3.0))
    lhs = (p * q)(z)
    rhs = p(z) * q(z)
    assert cmath.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-9)


@given(polys(), freqs, st.booleans())
def test_split_reassembles(p, tau, flag):
    r = split_at(p, tau, flag)
    assert r.upper + r.lower == p
    assert all(f >= tau for f in r.upper.freqs) if flag else all(f > tau for f in r.upper.freqs)


@given(polys())
def test_shift_composes(p):
    assert p.shift(Fraction(1, 3)).shift(Fraction(-1, 3)) == p
