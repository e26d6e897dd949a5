"""Curves over prime fields: point counts, group structure, cubic roots and
the census of cubic polynomials."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .curve import Curve, count_fp, group
from .modarith import Factorization, is_prime, lcm, nu


def legendre(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def _require_prime(p: int, low: int = 5):
    if p < low or not is_prime(p):
        raise ValueError(f"{p} is not a prime >= {low}")


def count_points(E: Curve, p: int, allow_singular: bool = False) -> int:
    """#E(F_p) including the point at infinity.

    With allow_singular the same count is taken on a singular cubic (used for
    trace values at bad primes); p = 2 and 3 are then handled by brute force.
    """
    if not allow_singular:
        _require_prime(p)
        if not E.has_good_reduction(p):
            raise ValueError(f"{E} has bad reduction at {p}")
        return count_fp(E, p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1 + sum(1 for x in range(2) for y in range(2) if (y * y - E.rhs(x)) % 2 == 0)
    return count_fp(E, p)


def is_anomalous(E: Curve, p: int) -> bool:
    return count_points(E, p) == p


@dataclass(frozen=True)
class GroupStructure:
    """Z/(2^s t) + Z/(2^r w) with s <= r, t and w odd, 2^s t | 2^r w."""

    s: int
    r: int
    t: int
    w: int

    def __post_init__(self):
        if not 0 <= self.s <= self.r:
            raise ValueError("need 0 <= s <= r")
        if self.t < 1 or self.w < 1 or self.t % 2 == 0 or self.w % 2 == 0:
            raise ValueError("t and w must be odd and positive")
        if (2**self.r * self.w) % (2**self.s * self.t):
            raise ValueError("first factor must divide the second")

    @property
    def order(self) -> int:
        return 2 ** (self.r + self.s) * self.t * self.w

    @property
    def invariants(self) -> tuple[int, int]:
        return 2**self.s * self.t, 2**self.r * self.w

    @property
    def exponent(self) -> int:
        return 2**self.r * self.w

    def is_cyclic(self) -> bool:
        return self.invariants[0] == 1

    @classmethod
    def from_invariants(cls, n1: int, n2: int) -> "GroupStructure":
        """Structure of Z/n1 + Z/n2 with n1 | n2."""
        s, r = nu(2, n1), nu(2, n2)
        return cls(s, r, n1 >> s, n2 >> r)


@lru_cache(maxsize=4096)
def group_structure(E: Curve, p: int) -> GroupStructure:
    """Structure of E(F_p) from the exponent (lcm of all point orders)."""
    _require_prime(p, low=3)
    if not E.has_good_reduction(p):
        raise ValueError(f"{E} has bad reduction at {p}")
    G = group(E.reduced(p), Factorization.from_factors([(p, 1)]))
    exponent = lcm(*(G.point_order(P) for P in G.points()))
    return GroupStructure.from_invariants(G.order() // exponent, exponent)


class RootCount(enum.Enum):
    NO_ROOTS = 0
    ONE_ROOT = 1
    THREE_ROOTS = 3


def cubic_roots(a: int, b: int, p: int) -> RootCount:
    """Number of roots of x^3 + a x + b mod p (distinct roots required)."""
    _require_prime(p)
    if (4 * a**3 + 27 * b**2) % p == 0:
        raise ValueError(f"x^3 + {a}x + {b} has a repeated root mod {p}")
    roots = sum(1 for x in range(p) if (x**3 + a * x + b) % p == 0)
    return RootCount(roots)


@dataclass(frozen=True)
class Census:
    """Counts of cubic polynomials over F_p by number of distinct roots."""

    p: int
    no_roots: int
    one_root: int
    three_roots: int
    singular: int
    space: str = "monic"

    @property
    def nonsingular(self) -> int:
        return self.no_roots + self.one_root + self.three_roots

    def proportions(self) -> tuple[Fraction, Fraction, Fraction]:
        n = self.nonsingular
        return (Fraction(self.no_roots, n), Fraction(self.one_root, n), Fraction(self.three_roots, n))

    def as_row(self) -> list[int]:
        return [self.p, self.no_roots, self.one_root, self.three_roots, self.singular]


CENSUS_FIELDS = ["p", "no_roots", "one_root", "three_roots", "singular"]


def census_closed_form(p: int) -> Census:
    """The census counts predicted in closed form for the monic space."""
    three = comb(p, 3)
    one = p * (p * p - comb(p, 2) - p)
    none = (p**3 - p) // 3
    return Census(p, none, one, three, p * p)


def census_proportions(p: int) -> tuple[Fraction, Fraction, Fraction]:
    """(p+1)/3p, 1/2, (p-2)/6p for no, one and three roots."""
    return Fraction(p + 1, 3 * p), Fraction(1, 2), Fraction(p - 2, 6 * p)


def curve_census(p: int, space: str = "monic") -> Census:
    """Exhaustive census of cubics over F_p.

    space="monic" walks all x^3 + a x^2 + b x + c; space="short" walks all
    x^3 + a x + b.
    """
    _require_prime(p)
    counts = [0, 0, 0, 0]  # roots 0, 1, 3 and singular
    if space == "short":
        for a in range(p):
            for b in range(p):
                if (4 * a**3 + 27 * b * b) % p == 0:
                    counts[3] += 1
                else:
                    counts[_slot(sum(1 for x in range(p) if (x**3 + a * x + b) % p == 0))] += 1
        return Census(p, counts[0], counts[1], counts[2], counts[3], space)
    if space != "monic":
        raise ValueError(f"unknown census space {space!r}")
    for a in range(p):
        for b in range(p):
            # f(x) = v(x) + c, so the roots of f are the x with v(x) = -c and
            # a root is repeated when f'(x) = 3x^2 + 2ax + b vanishes there too.
            hits = [0] * p
            double = [False] * p
            for x in range(p):
                v = (x**3 + a * x * x + b * x) % p
                hits[v] += 1
                if (3 * x * x + 2 * a * x + b) % p == 0:
                    double[v] = True
            for v in range(p):
                if double[v]:
                    counts[3] += 1
                else:
                    counts[_slot(hits[v])] += 1
    return Census(p, counts[0], counts[1], counts[2], counts[3], space)


def _slot(roots: int) -> int:
    return {0: 0, 1: 1, 3: 2}[roots]


def census_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CENSUS_FIELDS)
    for c in rows:
        w.writerow(c.as_row())
    return buf.getvalue()


def census_json(c: Census) -> str:
    d = asdict(c)
    d["proportions"] = [str(x) for x in c.proportions()]
    return json.dumps(d, sort_keys=True)
