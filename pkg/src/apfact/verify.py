"""Numeric evidence: grid residuals, strip sampling and spectrum-sign audits.

Nothing here certifies anything; the exact checks live next to the
constructions.  These routines provide independent floating-point evidence
and the sampling oracle used to cross-check the exact corona criteria.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import mat2
from .appoly import APPoly
from .errors import SingularFactor

RESIDUAL_RANGE = 50.0
STRIP_RANGE = 200.0


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class VerificationReport:
    max_residual: float = 0.0
    sample_count: int = 0
    worst_point: Optional[complex] = None
    checks: list[Check] = field(default_factory=list)
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        wp = self.worst_point
        return {
            "passed": self.passed,
            "max_residual": self.max_residual,
            "sample_count": self.sample_count,
            "worst_point": None if wp is None else [wp.real, wp.imag],
            "checks": [c.to_json() for c in self.checks],
            "flags": list(self.flags),
        }

    @classmethod
    def from_json(cls, data: dict) -> "VerificationReport":
        wp = data.get("worst_point")
        return cls(
            max_residual=data["max_residual"],
            sample_count=data["sample_count"],
            worst_point=None if wp is None else complex(wp[0], wp[1]),
            checks=[Check(c["name"], c["passed"], c.get("detail", "")) for c in data["checks"]],
            flags=list(data.get("flags", [])),
        )


def sample_points(points: int, seed: int = 0, half_width: float = RESIDUAL_RANGE) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-half_width, half_width, size=points)


def grid_residual(sym, fac, points: int = 100, seed: int = 0,
                  half_width: float = RESIDUAL_RANGE) -> VerificationReport:
    """Sup-norm of ``G - G_- D G_+^{-1}`` at random real points.

    ``fac`` needs ``G_minus``, ``G_plus`` and ``D_exponents`` attributes.
    """
    report = VerificationReport()
    if points <= 0:
        report.add("reconstruction", True, "no sample points")
        report.flags.append("vacuous")
        return report
    x = sample_points(points, seed, half_width)
    G = mat2.evaluate(sym.matrix(), x)
    Gm = mat2.evaluate(fac.G_minus, x)
    Gp = mat2.evaluate(fac.G_plus, x)
    d1, d2 = (float(d) for d in fac.D_exponents)

    det_p = Gp[:, 0, 0] * Gp[:, 1, 1] - Gp[:, 0, 1] * Gp[:, 1, 0]
    bad = np.abs(det_p) < 1e-13
    if bad.any():
        raise SingularFactor(f"det G_+ vanishes numerically at x={x[bad][0]}")
    Gp_inv = np.empty_like(Gp)
    Gp_inv[:, 0, 0] = Gp[:, 1, 1] / det_p
    Gp_inv[:, 0, 1] = -Gp[:, 0, 1] / det_p
    Gp_inv[:, 1, 0] = -Gp[:, 1, 0] / det_p
    Gp_inv[:, 1, 1] = Gp[:, 0, 0] / det_p
    D = np.zeros_like(Gp)
    D[:, 0, 0] = np.exp(1j * d1 * x)
    D[:, 1, 1] = np.exp(1j * d2 * x)

    R = Gm @ D @ Gp_inv - G
    per_point = np.abs(R).reshape(points, -1).max(axis=1)
    k = int(per_point.argmax())
    report.max_residual = float(per_point[k])
    report.sample_count = points
    report.worst_point = complex(x[k])
    report.add("reconstruction", True, f"max |G - G_- D G_+^-1| = {report.max_residual:.3e}")
    return report


def strip_grid(eps1: float, eps2: float, grid: tuple[int, int] = (2000, 20),
               half_width: float = STRIP_RANGE) -> tuple[np.ndarray, np.ndarray]:
    """Sample points of the strip ``-eps2 < Im z < eps1``.

    Real parts are ``linspace(-w, w, nx)``; imaginary parts are
    ``-eps2 + k (eps1 + eps2) / ny`` for ``k < ny``.  Refining ``nx -> 2 nx - 1``
    and ``ny -> 2 ny`` gives a superset of points.
    """
    nx, ny = grid
    if nx <= 0 or ny <= 0:
        raise ValueError("grid sizes must be positive")
    if eps1 < 0 or eps2 < 0:
        raise ValueError("strip half-widths must be non-negative")
    x = np.linspace(-half_width, half_width, nx)
    y = -eps2 + (eps1 + eps2) * np.arange(ny) / ny
    return x, y


def strip_sample(f1: APPoly, f2: APPoly, eps1: float = 1.0, eps2: float = 1.0,
                 grid: tuple[int, int] = (2000, 20),
                 half_width: float = STRIP_RANGE) -> tuple[float, complex]:
    """Minimum of ``|f1| + |f2|`` over the strip grid and where it occurs."""
    x, y = strip_grid(eps1, eps2, grid, half_width)
    z = x[:, None] + 1j * y[None, :]
    vals = np.abs(f1(z)) + np.abs(f2(z))
    k = np.unravel_index(np.argmin(vals), vals.shape)
    return float(vals[k]), complex(z[k])


def strip_infimum_estimate(f1: APPoly, f2: APPoly, eps1: float = 1.0, eps2: float = 1.0,
                           grid: tuple[int, int] = (2000, 20),
                           half_width: float = STRIP_RANGE) -> float:
    return strip_sample(f1, f2, eps1, eps2, grid, half_width)[0]


def spectrum_sign_audit(matrix: mat2.Mat2, side: str) -> VerificationReport:
    if side not in ("plus", "minus"):
        raise ValueError("side must be 'plus' or 'minus'")
    report = VerificationReport()
    offending = []
    for (i, j), e in mat2.entries(matrix):
        ok = e.in_upper() if side == "plus" else e.in_lower()
        if not ok:
            offending.append(f"({i + 1},{j + 1}): {e}")
    report.add(f"spectra in {'[0,inf)' if side == 'plus' else '(-inf,0]'}",
               not offending, "; ".join(offending))
    return report
