"""Elliptic curves over Z/NZ, elliptic pseudoprime tests and exact
proportion statistics for 2-adic point orders."""

from .curve import CM_TABLE, Curve, CurveGroup, Point, PointClass, classify, make_point
from .modarith import FactorFound, Factorization, ZeroDivisorTotal

__all__ = [
    "CM_TABLE", "Curve", "CurveGroup", "FactorFound", "Factorization", "Point", "PointClass",
    "ZeroDivisorTotal", "classify", "make_point",
]
__version__ = "0.1.0"
