"""Almost periodic polynomials: finite sums ``sum_j c_j e_{lambda_j}``.

Here ``e_lambda(z) = exp(i*lambda*z)``.  Frequencies are exact rationals
(:class:`fractions.Fraction`), coefficients are complex doubles.  After every
arithmetic step coefficients with modulus below :data:`PRUNE_TOL` are dropped,
so the spectrum of a value is exactly the set of frequencies it stores.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Union

import numpy as np

from .errors import NotDominantBinomial, TruncationBudgetExceeded

Frequency = Fraction
FreqLike = Union[Fraction, int, str, float]

PRUNE_TOL = 1e-14
INF = math.inf


def as_freq(x: FreqLike) -> Fraction:
    """Coerce ``x`` to an exact rational frequency.

    Strings are parsed exactly ("3/4", "-2", "0.5"); floats go through their
    shortest decimal representation so that ``3.5`` becomes ``7/2``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("frequency cannot be a bool")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"frequency must be finite, got {x!r}")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as a frequency")


def freq_str(f) -> str:
    """Serialize a frequency as ``"num/den"`` (``"inf"`` for infinity)."""
    if isinstance(f, float):
        if f == INF:
            return "inf"
        if f == -INF:
            return "-inf"
        f = as_freq(f)
    f = as_freq(f)
    return f"{f.numerator}/{f.denominator}"


def parse_eta(s) -> Union[Fraction, float]:
    """Parse a frequency that may also be ``"inf"``."""
    if isinstance(s, str) and s.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    if isinstance(s, float) and s == INF:
        return INF
    return as_freq(s)


class APPoly:
    """Immutable exponential polynomial with rational frequencies.

    >>> e = APPoly.exp
    >>> (e(-1) + e(1)) * (e(3) - e(1)) == e(4) - 1
    True
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[FreqLike, complex]] = ()):
        acc: dict[Fraction, complex] = {}
        for f, c in terms:
            f = as_freq(f)
            acc[f] = acc.get(f, 0j) + complex(c)
        self._terms = tuple(
            (f, c) for f, c in sorted(acc.items()) if abs(c) >= PRUNE_TOL
        )

    # -- constructors -----------------------------------------------------
    @classmethod
    def exp(cls, freq: FreqLike, coef: complex = 1.0) -> "APPoly":
        return cls([(freq, coef)])

    @classmethod
    def const(cls, c: complex) -> "APPoly":
        return cls([(0, c)])

    @classmethod
    def zero(cls) -> "APPoly":
        return cls()

    @classmethod
    def _from_sorted(cls, terms) -> "APPoly":
        obj = cls.__new__(cls)
        obj._terms = tuple(terms)
        return obj

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> tuple[tuple[Fraction, complex], ...]:
        return self._terms

    @property
    def freqs(self) -> tuple[Fraction, ...]:
        return tuple(f for f, _ in self._terms)

    @property
    def coeffs(self) -> tuple[complex, ...]:
        return tuple(c for _, c in self._terms)

    def spectrum(self) -> frozenset[Fraction]:
        return frozenset(self.freqs)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return len(self._terms) == 1 and self._terms[0][0] == 0

    def is_single_exponential(self) -> bool:
        return len(self._terms) == 1

    def min_freq(self) -> Fraction | None:
        return self._terms[0][0] if self._terms else None

    def max_freq(self) -> Fraction | None:
        return self._terms[-1][0] if self._terms else None

    def coefficient(self, freq: FreqLike) -> complex:
        f = as_freq(freq)
        for g, c in self._terms:
            if g == f:
                return c
            if g > f:
                break
        return 0j

    def norm1(self) -> float:
        """Wiener norm; bounds the sup of ``|p|`` on the real line."""
        return float(sum(abs(c) for _, c in self._terms))

    def in_upper(self) -> bool:
        """Spectrum in ``[0, inf)``: analytic and bounded in the upper half-plane."""
        return not self._terms or self._terms[0][0] >= 0

    def in_lower(self) -> bool:
        return not self._terms or self._terms[-1][0] <= 0

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[Fraction, complex]]:
        return iter(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "APPoly":
        if isinstance(other, APPoly):
            return other
        if isinstance(other, (int, float, complex)):
            return APPoly.const(other)
        return NotImplemented

    def __add__(self, other) -> "APPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return APPoly(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> "APPoly":
        return APPoly._from_sorted((f, -c) for f, c in self._terms)

    def __sub__(self, other) -> "APPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "APPoly":
        return (-self) + other

    def __mul__(self, other) -> "APPoly":
        if isinstance(other, (int, float, complex)):
            return APPoly((f, c * other) for f, c in self._terms)
        if not isinstance(other, APPoly):
            return NotImplemented
        acc: dict[Fraction, complex] = {}
        for f, c in self._terms:
            for g, d in other._terms:
                k = f + g
                acc[k] = acc.get(k, 0j) + c * d
        return APPoly(acc.items())

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "APPoly":
        if isinstance(scalar, APPoly):
            return NotImplemented
        return self * (1.0 / complex(scalar))

    def __pow__(self, n: int) -> "APPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are defined")
        result = APPoly.const(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def shift(self, gamma: FreqLike) -> "APPoly":
        """Multiply by ``e_gamma``."""
        g = as_freq(gamma)
        return APPoly._from_sorted((f + g, c) for f, c in self._terms)

    # -- comparison -------------------------------------------------------
    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def max_abs_diff(self, other: "APPoly") -> float:
        """Largest coefficient-wise modulus of ``self - other`` (0 for equal)."""
        d = self - other
        return max((abs(c) for _, c in d._terms), default=0.0)

    def allclose(self, other: "APPoly", atol: float = 1e-12) -> bool:
        return self.max_abs_diff(self._coerce(other)) <= atol

    # -- evaluation -------------------------------------------------------
    def __call__(self, z):
        """Evaluate the entire extension ``sum c_j exp(i lambda_j z)``.

        ``z`` may be a scalar or any numpy array; the result has its shape.
        """
        z_arr = np.asarray(z, dtype=complex)
        if not self._terms:
            out = np.zeros(z_arr.shape, dtype=complex)
        else:
            f = np.array([float(fr) for fr, _ in self._terms])
            c = np.array([c for _, c in self._terms], dtype=complex)
            out = np.exp(1j * np.multiply.outer(z_arr, f)) @ c
        if np.ndim(z) == 0:
            return complex(out)
        return out

    eval = __call__

    # -- formatting -------------------------------------------------------
    def __repr__(self) -> str:
        return f"APPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for f, c in self._terms:
            cs = _fmt_coef(c)
            if f == 0:
                parts.append(cs)
            else:
                fs = str(f)
                if cs == "1":
                    parts.append(f"e({fs})")
                elif cs == "-1":
                    parts.append(f"-e({fs})")
                else:
                    parts.append(f"{cs}*e({fs})")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> list[dict]:
        return [
            {"freq": freq_str(f), "re": c.real, "im": c.imag} for f, c in self._terms
        ]

    @classmethod
    def from_json(cls, data) -> "APPoly":
        return cls(
            (as_freq(t["freq"]), complex(float(t.get("re", 0.0)), float(t.get("im", 0.0))))
            for t in data
        )


def _fmt_coef(c: complex) -> str:
    if c.imag == 0:
        r = c.real
        return str(int(r)) if r == int(r) and abs(r) < 1e15 else repr(r)
    return repr(c).strip("()")


@dataclass(frozen=True)
class SplitResult:
    upper: APPoly
    lower: APPoly


def add(p: APPoly, q: APPoly) -> APPoly:
    return p + q


def mul(p: APPoly, q: APPoly) -> APPoly:
    return p * q


def mean_value(p: APPoly) -> complex:
    return p.coefficient(0)


def bohr_coefficient(p: APPoly, lam: FreqLike) -> complex:
    return p.coefficient(lam)


def spectrum_bounds(p: APPoly) -> tuple[Fraction | None, Fraction | None]:
    return p.min_freq(), p.max_freq()


def evaluate(p: APPoly, z):
    return p(z)


def shift(p: APPoly, gamma: FreqLike) -> APPoly:
    return p.shift(gamma)


def split_at(p: APPoly, tau: FreqLike, include_boundary_in_upper: bool = True) -> SplitResult:
    """Split ``p`` into the terms above ``tau`` and the rest.

    The boundary frequency goes to ``upper`` when the flag is set.
    """
    t = as_freq(tau)
    if include_boundary_in_upper:
        up = [(f, c) for f, c in p if f >= t]
        lo = [(f, c) for f, c in p if f < t]
    else:
        up = [(f, c) for f, c in p if f > t]
        lo = [(f, c) for f, c in p if f <= t]
    return SplitResult(APPoly._from_sorted(up), APPoly._from_sorted(lo))


def neumann_terms_needed(ratio: float, tol: float) -> int:
    """Smallest ``N`` with ``ratio**(N+1) / (1 - ratio) <= tol``."""
    if ratio == 0.0:
        return 0
    n = 0
    bound = ratio / (1.0 - ratio)
    while bound > tol:
        n += 1
        bound *= ratio
    return n


def neumann_inverse(p: APPoly, tol: float = 1e-12, max_terms: int = 10_000) -> APPoly:
    """Approximate inverse of a binomial with one strictly dominant coefficient.

    Writing ``p = c1 e_a1 + c2 e_a2`` with ``|c2| < |c1|``, returns the
    truncated geometric series ``(1/c1) e_{-a1} sum_n (-c2/c1)^n e_{n(a2-a1)}``.
    The truncation point is chosen from the tail bound, so
    ``sup_R |p*q - 1| <= tol``.
    """
    if len(p) != 2:
        raise NotDominantBinomial(f"expected exactly two terms, got {len(p)}: {p}")
    (f0, c0), (f1, c1) = p.terms
    if abs(c0) == abs(c1):
        raise NotDominantBinomial(f"no strictly dominant coefficient in {p}")
    if abs(c0) > abs(c1):
        (a1, k1), (a2, k2) = (f0, c0), (f1, c1)
    else:
        (a1, k1), (a2, k2) = (f1, c1), (f0, c0)
    q = -k2 / k1
    n = neumann_terms_needed(abs(q), tol)
    if n + 1 > max_terms:
        raise TruncationBudgetExceeded(
            f"{n + 1} terms needed for tol={tol}, budget is {max_terms}"
        )
    step = a2 - a1
    terms = [(-a1 + j * step, (q**j) / k1) for j in range(n + 1)]
    return APPoly(terms)
