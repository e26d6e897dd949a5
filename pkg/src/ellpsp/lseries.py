"""Dirichlet coefficients a_n of the L-series of a curve over Q."""

from __future__ import annotations

import threading

from .curve import Curve
from .fp import count_points
from .modarith import Factorization, as_factorization


class LCoeffs:
    """Coefficient context for one curve, caching a_{p^e} by prime power.

    The cache is guarded by a lock; values are deterministic so concurrent
    recomputation would be harmless anyway.
    """

    def __init__(self, curve: Curve):
        self.curve = curve
        self._cache: dict[tuple[int, int], int] = {}
        self._lock = threading.Lock()

    def good_reduction(self, p: int) -> bool:
        return self.curve.has_good_reduction(p)

    def a_p(self, p: int) -> int:
        """p + 1 - #E(F_p), also at primes of bad reduction."""
        return self.a_prime_power(p, 1)

    def a_prime_power(self, p: int, e: int) -> int:
        if e < 0:
            raise ValueError("exponent must be non-negative")
        if e == 0:
            return 1
        key = (p, e)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        if e == 1:
            value = p + 1 - count_points(self.curve, p, allow_singular=True)
        else:
            # iterate upward so deep exponents do not recurse
            prev2, prev = 1, self.a_p(p)
            ap = prev
            eps = 1 if self.good_reduction(p) else 0
            for _ in range(2, e + 1):
                prev2, prev = prev, ap * prev - eps * p * prev2
            value = prev
        with self._lock:
            self._cache[key] = value
        return value

    def a_n(self, n) -> int:
        F = n if isinstance(n, Factorization) else as_factorization(n)
        value = 1
        for p, e in F.factors:
            value *= self.a_prime_power(p, e)
        return value


def a_n(curve: Curve, n) -> int:
    return LCoeffs(curve).a_n(n)
