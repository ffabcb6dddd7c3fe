"""Factorization of triangular almost periodic matrix symbols."""

from .appoly import APPoly, as_freq
from .symbol import DeclaredSpectrum, TriangularSymbol, classify, decompose

__all__ = ["APPoly", "as_freq", "DeclaredSpectrum", "TriangularSymbol", "classify", "decompose"]
__version__ = "0.1.0"
