"""2x2 matrices with :class:`APPoly` entries.

Matrices are plain nested tuples ``((a, b), (c, d))``; these helpers keep the
algebra exact and cover what the factorization pipeline needs.
"""

from __future__ import annotations

import numpy as np

from .appoly import APPoly

Mat2 = tuple[tuple[APPoly, APPoly], tuple[APPoly, APPoly]]


def _p(x) -> APPoly:
    return x if isinstance(x, APPoly) else APPoly.const(x)


def mat(a, b, c, d) -> Mat2:
    return ((_p(a), _p(b)), (_p(c), _p(d)))


def identity() -> Mat2:
    return mat(1, 0, 0, 1)


def matmul(A: Mat2, B: Mat2) -> Mat2:
    return (
        (A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
        (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]),
    )


def det(A: Mat2) -> APPoly:
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


def adjugate(A: Mat2) -> Mat2:
    return ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))


def transpose(A: Mat2) -> Mat2:
    return ((A[0][0], A[1][0]), (A[0][1], A[1][1]))


def scale(A: Mat2, s: complex) -> Mat2:
    return tuple(tuple(e * s for e in row) for row in A)  # type: ignore[return-value]


def inverse_const_det(A: Mat2, tol: float = 1e-10) -> Mat2:
    """Inverse of a matrix whose determinant is a nonzero constant."""
    d = det(A)
    c = d.coefficient(0)
    if abs(c) < tol or (d - APPoly.const(c)).norm1() > tol * max(1.0, abs(c)):
        raise ValueError(f"determinant is not a nonzero constant: {d}")
    return scale(adjugate(A), 1.0 / c)


def max_abs_diff(A: Mat2, B: Mat2) -> float:
    return max(A[i][j].max_abs_diff(B[i][j]) for i in range(2) for j in range(2))


def entries(A: Mat2):
    for i in range(2):
        for j in range(2):
            yield (i, j), A[i][j]


def evaluate(A: Mat2, x) -> np.ndarray:
    """Evaluate at points ``x``; returns an array of shape ``x.shape + (2, 2)``."""
    x = np.asarray(x, dtype=complex)
    out = np.empty(x.shape + (2, 2), dtype=complex)
    for (i, j), e in entries(A):
        out[..., i, j] = e(x)
    return out


def to_json(A: Mat2) -> list[list[list[dict]]]:
    return [[A[i][j].to_json() for j in range(2)] for i in range(2)]


def from_json(data) -> Mat2:
    return tuple(tuple(APPoly.from_json(e) for e in row) for row in data)  # type: ignore[return-value]


def format_mat(A: Mat2) -> str:
    return f"[[{A[0][0]}, {A[0][1]}], [{A[1][0]}, {A[1][1]}]]"
