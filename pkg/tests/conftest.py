from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from apfact.appoly import APPoly

e = APPoly.exp

freqs = st.fractions(min_value=-4, max_value=4, max_denominator=4)
gauss = st.builds(complex, st.integers(-3, 3), st.integers(-3, 3))


@st.composite
def polys(draw, max_terms: int = 5, freq=freqs) -> APPoly:
    """APPoly with Gaussian-integer coefficients, so ring identities hold exactly."""
    n = draw(st.integers(0, max_terms))
    return APPoly([(draw(freq), draw(gauss)) for _ in range(n)])


def upper_polys(max_terms: int = 4):
    return polys(max_terms, st.fractions(min_value=0, max_value=3, max_denominator=3))


def lower_polys(max_terms: int = 4):
    return polys(max_terms, st.fractions(min_value=-3, max_value=0, max_denominator=3))


def F(x) -> Fraction:
    return Fraction(x)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
