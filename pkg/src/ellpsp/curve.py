"""Short Weierstrass curves and projective points over Z/NZ.

The group law on E(Z/NZ) is computed through the CRT isomorphism with the
product of the E(Z/p^e Z).  Over a prime field the usual chord-tangent
formulas are used; over Z/p^e with e >= 2 two projective addition laws are
combined so that at least one of them is defined for every pair of points.
Points are kept in a canonical representative so equality and hashing are
plain tuple comparisons.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .modarith import (
    FactorFound,
    Factorization,
    ZeroDivisorTotal,
    as_factorization,
    factor_int,
    inverse_or_factor,
    jacobi,
    lcm,
)

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class Curve:
    """y^2 = x^3 + a x + b, with an optional CM discriminant supplied as data."""

    a: int
    b: int
    cm_disc: int | None = None

    @property
    def disc_core(self) -> int:
        """4a^3 + 27b^2; the curve is nonsingular mod p iff p does not divide it."""
        return 4 * self.a**3 + 27 * self.b**2

    @property
    def discriminant(self) -> int:
        return -16 * self.disc_core

    def rhs(self, x: int) -> int:
        return x**3 + self.a * x + self.b

    def reduced(self, m: int) -> "Curve":
        return Curve(self.a % m, self.b % m, self.cm_disc)

    def has_good_reduction(self, p: int) -> bool:
        return self.disc_core % p != 0

    def as_dict(self) -> dict:
        return {"A": self.a, "B": self.b, "d": self.cm_disc}

    def __str__(self) -> str:
        return f"y^2 = x^3 + {self.a}x + {self.b}"


# Curves with complex multiplication by the maximal order of Q(sqrt(-d)).
CM_TABLE = {
    "x3-x": Curve(-1, 0, 1),
    "x3-25x": Curve(-25, 0, 1),
    "x3+x": Curve(1, 0, 1),
    "x3+1": Curve(0, 1, 3),
    "x3+2": Curve(0, 2, 3),
    "x3-2": Curve(0, -2, 3),
}


def cm_disc_for(a: int, b: int) -> int | None:
    """The CM discriminant for the two classical families, else None."""
    if b == 0 and a != 0:
        return 1
    if a == 0 and b != 0:
        return 3
    return None


class PointClass(enum.Enum):
    ZERO = "Zero"
    NON_ZERO_NOT_STRONG = "NonZeroNotStrong"
    STRONGLY_NON_ZERO = "StronglyNonZero"


@dataclass(frozen=True)
class Point:
    """A canonical projective point (x:y:z) modulo n.

    Strongly non-zero points have z = 1 and the identity is (0:1:0).  In
    general z = 1 modulo every prime power where z is a unit and y = 1 at the
    remaining prime powers.
    """

    x: int
    y: int
    z: int
    n: int

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.y == 1 % self.n

    def is_strong(self) -> bool:
        return math.gcd(self.z, self.n) == 1

    def coords(self) -> tuple[int, int, int]:
        return self.x, self.y, self.z

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z, "n": self.n}

    def __str__(self) -> str:
        return f"{self.x}:{self.y}:{self.z} mod {self.n}"


def classify(P: Point) -> PointClass:
    g = math.gcd(P.z, P.n)
    if g == 1:
        return PointClass.STRONGLY_NON_ZERO
    if g == P.n:
        return PointClass.ZERO
    return PointClass.NON_ZERO_NOT_STRONG


def identity(n: int) -> Point:
    return Point(0, 1 % n, 0, n)


def _unit_split(z: int, n: int) -> tuple[int, int]:
    """Write n = r * s where s collects the primes dividing gcd(z, n)."""
    g = math.gcd(z, n)
    r = n
    h = math.gcd(r, g)
    while h > 1:
        r //= h
        h = math.gcd(r, g)
    return r, n // r


def on_curve(E: Curve, n: int, x: int, y: int, z: int) -> bool:
    return (y * y * z - x**3 - E.a * x * z * z - E.b * z**3) % n == 0


def make_point(E: Curve, n: int, x: int, y: int, z: int = 1) -> Point:
    """Validate (x:y:z) on E mod n and return its canonical representative."""
    n = int(n)
    x, y, z = x % n, y % n, z % n
    if math.gcd(math.gcd(x, y), math.gcd(z, n)) != 1:
        raise ValueError(f"({x}:{y}:{z}) is not primitive mod {n}")
    if not on_curve(E, n, x, y, z):
        raise ValueError(f"({x}:{y}:{z}) is not on {E} mod {n}")
    return _canonical(n, x, y, z)


def _canonical(n: int, x: int, y: int, z: int) -> Point:
    r, s = _unit_split(z, n)
    # Where z is not a unit the curve equation forces y to be one.
    u, _ = _crt2(pow(z, -1, r) if r > 1 else 0, r, pow(y, -1, s) if s > 1 else 0, s)
    return Point(x * u % n, y * u % n, z * u % n, n)


def _crt2(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    if m2 == 1:
        return r1 % m1, m1
    if m1 == 1:
        return r2 % m2, m2
    k = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * k, m1 * m2


def reduce_rational_point(E: Curve, n: int, x, y) -> Point:
    """Reduce an affine rational point of E(Q) modulo n."""
    x, y = Fraction(x), Fraction(y)
    if y * y != x**3 + E.a * x + E.b:
        raise ValueError(f"({x}, {y}) is not a rational point of {E}")
    den = lcm(x.denominator, y.denominator)
    if math.gcd(den, n) != 1:
        raise ValueError(f"denominators of ({x}, {y}) are not prime to {n}")
    return make_point(E, n, int(x * den), int(y * den), den)


def rational_torsion_order(E: Curve, x, y, bound: int = 12) -> int | None:
    """Order of the rational point (x, y) if it is at most bound, else None.

    Torsion points of E(Q) have order at most 12, so None means the point
    has infinite order.
    """
    x, y = Fraction(x), Fraction(y)
    if y * y != x**3 + E.a * x + E.b:
        raise ValueError(f"({x}, {y}) is not a rational point of {E}")
    P = (x, y)
    Q = None
    for k in range(1, bound + 1):
        Q = _add_q(E, Q, P)
        if Q is None:
            return k
    return None


def _add_q(E: Curve, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    (x1, y1), (x2, y2) = P, Q
    if x1 == x2:
        if y1 + y2 == 0:
            return None
        lam = (3 * x1 * x1 + E.a) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return x3, lam * (x1 - x3) - y1


# ---------------------------------------------------------------------------
# Arithmetic on a single prime-power component.  Points are triples in the
# canonical form of Point; helpers take the curve coefficients already
# reduced modulo the component modulus.


def _local_canon(p: int, m: int, P):
    x, y, z = P
    if z % p:
        u = pow(z, -1, m)
        return x * u % m, y * u % m, 1
    u = pow(y, -1, m)
    return x * u % m, 1, z * u % m


def _law_y(P, Q, a, b, m):
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    b3 = 3 * b
    t0 = X1 * X2
    t2 = Z1 * Z2
    s = X1 * Z2 + X2 * Z1
    u = Y1 * Y2 - a * s - b3 * t2
    v = a * t0 + b3 * s - a * a * t2
    w = Y1 * Y2 + a * s + b3 * t2
    c = 3 * t0 + a * t2
    e1 = X1 * Y2 + X2 * Y1
    e2 = Y1 * Z2 + Y2 * Z1
    return (e1 * u - e2 * v) % m, (c * v + w * u) % m, (e2 * w + e1 * c) % m


def _law_z(P, Q, a, b, m):
    # Degenerate only on the diagonal P = Q.
    X1, Y1, Z1 = P
    X2, Y2, Z2 = Q
    b3 = 3 * b
    X3 = (b3 * Z1 * Z1 * X2 * Z2 + a * Z1 * Z1 * X2 * X2 - 2 * Y1 * Z1 * X2 * Y2
          - Y1 * Y1 * X2 * Z2 - b3 * X1 * Z1 * Z2 * Z2 + X1 * Z1 * Y2 * Y2
          + 2 * X1 * Y1 * Y2 * Z2 - a * X1 * X1 * Z2 * Z2)
    Y3 = (-b3 * Z1 * Z1 * Y2 * Z2 - a * Z1 * Z1 * X2 * Y2 + b3 * Y1 * Z1 * Z2 * Z2
          + Y1 * Z1 * Y2 * Y2 + 2 * a * Y1 * Z1 * X2 * Z2 - Y1 * Y1 * Y2 * Z2
          - 2 * a * X1 * Z1 * Y2 * Z2 + a * X1 * Y1 * Z2 * Z2 + 3 * X1 * Y1 * X2 * X2
          - 3 * X1 * X1 * X2 * Y2)
    Z3 = (Z1 * Z1 * Y2 * Y2 - a * Z1 * Z1 * X2 * Z2 - Y1 * Y1 * Z2 * Z2
          + a * X1 * Z1 * Z2 * Z2 - 3 * X1 * Z1 * X2 * X2 + 3 * X1 * X1 * X2 * Z2)
    return X3 % m, Y3 % m, Z3 % m


def _proj_add(P, Q, a, b, p, m):
    R = _law_y(P, Q, a, b, m)
    if R[0] % p or R[1] % p or R[2] % p:
        return R
    R = _law_z(P, Q, a, b, m)
    if R[0] % p or R[1] % p or R[2] % p:
        return R
    raise ArithmeticError("no addition law applies; modulus is not admissible")


def _affine_add(P, Q, a, p):
    if P[2] == 0:
        return Q
    if Q[2] == 0:
        return P
    x1, y1, _ = P
    x2, y2, _ = Q
    if x1 == x2:
        if (y1 + y2) % p == 0:
            return (0, 1, 0)
        lam = (3 * x1 * x1 + a) * pow(2 * y1, -1, p) % p
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, p) % p
    x3 = (lam * lam - x1 - x2) % p
    return x3, (lam * (x1 - x3) - y1) % p, 1


class _Local:
    """E(Z/p^e Z) for one admissible prime power."""

    def __init__(self, E: Curve, p: int, e: int):
        self.p, self.e = p, e
        self.m = p**e
        self.a, self.b = E.a % self.m, E.b % self.m
        self.curve = E
        self.zero = (0, 1 % self.m, 0)

    def add(self, P, Q):
        if self.e == 1:
            return _affine_add(P, Q, self.a, self.p)
        if P == self.zero:
            return Q
        if Q == self.zero:
            return P
        return _local_canon(self.p, self.m, _proj_add(P, Q, self.a, self.b, self.p, self.m))

    def neg(self, P):
        if P[2] % self.p:
            return P[0], (-P[1]) % self.m, P[2]
        return (-P[0]) % self.m, P[1], (-P[2]) % self.m

    def mul(self, k: int, P):
        if k < 0:
            k, P = -k, self.neg(P)
        if self.e == 1:
            R = self.zero
            while k:
                if k & 1:
                    R = _affine_add(R, P, self.a, self.p)
                k >>= 1
                if k:
                    P = _affine_add(P, P, self.a, self.p)
            return R
        R = None
        while k:
            if k & 1:
                R = P if R is None else _proj_add(R, P, self.a, self.b, self.p, self.m)
            k >>= 1
            if k:
                P = _proj_add(P, P, self.a, self.b, self.p, self.m)
        return self.zero if R is None else _local_canon(self.p, self.m, R)

    def order(self) -> int:
        return self.p ** (self.e - 1) * count_fp(self.curve, self.p)

    def point_order(self, P) -> int:
        k = n = self.order()
        for q in _prime_divisors(n):
            while k % q == 0 and self.mul(k // q, P) == self.zero:
                k //= q
        return k


@lru_cache(maxsize=4096)
def _prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(q for q, _ in factor_int(n))


@lru_cache(maxsize=4096)
def count_fp(E: Curve, p: int) -> int:
    """#E(F_p) by the Legendre-sum formula; works for any odd prime p."""
    a, b = E.a % p, E.b % p
    total = 1
    for x in range(p):
        total += 1 + jacobi((x * x * x + a * x + b) % p, p)
    return total


def _check_admissible(E: Curve, F: Factorization):
    for p, e in F.factors:
        if p == 2:
            raise ValueError("the modulus must be odd")
        if p == 3 and e > 1:
            raise ValueError("9 may not divide the modulus")
    if math.gcd(F.n, E.disc_core) != 1:
        raise ValueError(f"{E} has bad reduction at a prime dividing {F.n}")


class CurveGroup:
    """E(Z/NZ) realised as the product of its prime-power components."""

    def __init__(self, E: Curve, N):
        F = as_factorization(N)
        _check_admissible(E, F)
        self.curve = E
        self.factorization = F
        self.n = F.n
        self.locals = [_Local(E, p, e) for p, e in F.factors]
        # CRT idempotents: basis[i] = 1 mod m_i and 0 mod the others
        self._basis = []
        for loc in self.locals:
            rest = self.n // loc.m
            self._basis.append(rest * pow(rest, -1, loc.m) % self.n if loc.m < self.n else 1)

    def split(self, P: Point):
        if P.n != self.n:
            raise ValueError(f"point is mod {P.n}, group is mod {self.n}")
        return [(P.x % L.m, P.y % L.m, P.z % L.m) for L in self.locals]

    def join(self, parts) -> Point:
        n = self.n
        x = y = z = 0
        for c, (px, py, pz) in zip(self._basis, parts):
            x += c * px
            y += c * py
            z += c * pz
        return Point(x % n, y % n, z % n, n)

    @property
    def identity(self) -> Point:
        return identity(self.n)

    def point(self, x: int, y: int, z: int = 1) -> Point:
        return make_point(self.curve, self.n, x, y, z)

    def contains(self, P: Point) -> bool:
        return P.n == self.n and on_curve(self.curve, self.n, P.x, P.y, P.z)

    def add(self, P: Point, Q: Point) -> Point:
        if not (self.contains(P) and self.contains(Q)):
            raise ValueError("point is not on the curve")
        return self.join(L.add(u, v) for L, u, v in zip(self.locals, self.split(P), self.split(Q)))

    def neg(self, P: Point) -> Point:
        return self.join(L.neg(u) for L, u in zip(self.locals, self.split(P)))

    def mul(self, k: int, P: Point) -> Point:
        return self.join(L.mul(k, u) for L, u in zip(self.locals, self.split(P)))

    def order(self) -> int:
        return math.prod(L.order() for L in self.locals)

    def point_order(self, P: Point) -> int:
        return lcm(*(L.point_order(u) for L, u in zip(self.locals, self.split(P))))

    def component_orders(self, P: Point) -> list[int]:
        return [L.point_order(u) for L, u in zip(self.locals, self.split(P))]

    def component_points(self, i: int) -> list:
        L = self.locals[i]
        return local_points(L.curve.reduced(L.m), L.p, L.e)

    def points(self, cap: int = DEFAULT_CAP) -> list[Point]:
        """Every point of E(Z/NZ), in a deterministic order."""
        if self.order() > cap:
            raise CapExceeded(f"#E(Z/{self.n}Z) = {self.order()} exceeds cap {cap}")
        lists = [self.component_points(i) for i in range(len(self.locals))]
        out = [[]]
        for lst in lists:
            out = [acc + [q] for acc in out for q in lst]
        return [self.join(parts) for parts in out]

    def strong_points(self, cap: int = DEFAULT_CAP) -> list[Point]:
        return [P for P in self.points(cap) if P.is_strong()]


class CapExceeded(RuntimeError):
    """An enumeration would exceed the configured size cap."""


@lru_cache(maxsize=1024)
def group(E: Curve, N) -> CurveGroup:
    return CurveGroup(E, N)


def _group(E: Curve, N) -> CurveGroup:
    return group(E, as_factorization(N))


def add(E: Curve, N, P: Point, Q: Point) -> Point:
    return _group(E, N).add(P, Q)


def neg(E: Curve, N, P: Point) -> Point:
    return _group(E, N).neg(P)


def scalar_mul(E: Curve, N, k: int, P: Point) -> Point:
    G = _group(E, N)
    if not G.contains(P):
        raise ValueError("point is not on the curve")
    return G.mul(k, P)


def point_order(E: Curve, N, P: Point) -> int:
    return _group(E, N).point_order(P)


def group_order(E: Curve, N) -> int:
    return _group(E, N).order()


def points(E: Curve, N, cap: int = DEFAULT_CAP) -> list[Point]:
    return _group(E, N).points(cap)


def add_affine_attempt(E: Curve, n: int, P: Point, Q: Point) -> Point:
    """Chord-tangent addition over Z/nZ with no factorization of n.

    Returns the sum when every denominator is a unit; raises FactorFound
    when a denominator shares a proper factor with n.
    """
    if P.is_identity():
        return Q
    if Q.is_identity():
        return P
    if P.z != 1 or Q.z != 1:
        raise ValueError("affine addition needs strongly non-zero points")
    x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
    if (x1 - x2) % n == 0:
        if (y1 + y2) % n == 0:
            return identity(n)
        if (y1 - y2) % n:
            # y1^2 = y2^2 with y1 != +-y2: both factors are zero divisors
            raise FactorFound(math.gcd(y1 - y2, n), n)
        lam = (3 * x1 * x1 + E.a) * inverse_or_factor(2 * y1, n) % n
    else:
        lam = (y2 - y1) * inverse_or_factor(x2 - x1, n) % n
    x3 = (lam * lam - x1 - x2) % n
    return Point(x3, (lam * (x1 - x3) - y1) % n, 1, n)


def reduce_point(P: Point, m: int) -> Point:
    """Coordinatewise reduction to a divisor m of the modulus.

    Canonical forms reduce to canonical forms, so no renormalisation is
    needed.
    """
    if m < 1 or P.n % m:
        raise ValueError(f"{m} does not divide {P.n}")
    return Point(P.x % m, P.y % m, P.z % m, m)


# ---------------------------------------------------------------------------
# Enumeration of E(Z/p^n Z) by lifting through the reduction maps.


def lift_points(E: Curve, p: int, n: int, Q: Point) -> list[Point]:
    """All preimages of Q (mod p^(n-1)) in E(Z/p^n Z)."""
    if n < 2:
        raise ValueError("lifting needs n >= 2")
    lo, hi = p ** (n - 1), p**n
    if Q.n != lo:
        raise ValueError(f"point must be mod {lo}")
    return [Point(*c, hi) for c in _lift(E.a % hi, E.b % hi, p, hi, lo, Q.coords())]


def _lift(a: int, b: int, p: int, hi: int, lo: int, Q):
    x, y, z = Q
    out = []
    if z % p:
        for i in range(p):
            X = x + lo * i
            f = (X * X * X + a * X + b) % hi
            for j in range(p):
                Y = y + lo * j
                if (Y * Y - f) % hi == 0:
                    out.append((X, Y, 1))
    else:
        for i in range(p):
            X = x + lo * i
            for j in range(p):
                Z = z + lo * j
                if (Z - X**3 - a * X * Z * Z - b * Z**3) % hi == 0:
                    out.append((X, 1 % hi, Z))
    return out


@lru_cache(maxsize=512)
def local_points(E: Curve, p: int, e: int) -> list:
    """E(Z/p^e Z) as canonical triples, identity first."""
    pts = [(0, 1 % p, 0)]
    a, b = E.a % p, E.b % p
    for x in range(p):
        f = (x * x * x + a * x + b) % p
        for y in range(p):
            if (y * y - f) % p == 0:
                pts.append((x, y, 1))
    m = p
    for _ in range(1, e):
        hi = m * p
        A, B = E.a % hi, E.b % hi
        pts = [c for Q in pts for c in _lift(A, B, p, hi, m, Q)]
        m = hi
    return pts


def prime_power_points(E: Curve, p: int, e: int) -> list[Point]:
    m = p**e
    return [Point(*c, m) for c in local_points(E.reduced(m), p, e)]


# ---------------------------------------------------------------------------
# Strongly non-zero points inside E(Z/p^n Z).


def p_torsion_count(E: Curve, p: int, n: int) -> int:
    G = group(E, Factorization.from_factors([(p, n)]))
    return sum(1 for P in G.points() if G.mul(p, P).is_identity())


def snz_reachable(E: Curve, p: int, n: int, Q: Point) -> bool:
    """Whether Q = kP for some integer k and strongly non-zero P mod p^n.

    Decided structurally: always true off the anomalous case; when
    #E(F_p) = p it depends on whether E(Z/p^n Z) is cyclic, and in the split
    case on whether Q has less than the maximal order p^(n-1).
    """
    if Q.n != p**n:
        raise ValueError(f"point must be mod {p ** n}")
    if Q.is_strong():
        raise ValueError("question only applies to points that are not strongly non-zero")
    if count_fp(E, p) != p:
        return True
    if p_torsion_count(E, p, n) == p:
        return True
    return point_order(E, Factorization.from_factors([(p, n)]), Q) < p ** (n - 1)


def snz_dominator(E: Curve, N, Q: Point) -> Point:
    """A strongly non-zero P with order(Q) dividing order(P)."""
    G = _group(E, N)
    parts = []
    for i, (L, q) in enumerate(zip(G.locals, G.split(Q))):
        if q[2] % L.p:
            parts.append(q)
            continue
        need = L.point_order(q)
        best = None
        for c in G.component_points(i):
            if c[2] % L.p and L.point_order(c) % need == 0:
                best = c
                break
        if best is None:
            raise ValueError(f"no strongly non-zero point mod {L.m} dominates the component")
        parts.append(best)
    return G.join(parts)


__all__ = [
    "CM_TABLE", "CapExceeded", "Curve", "CurveGroup", "FactorFound", "Point", "PointClass",
    "ZeroDivisorTotal", "add", "add_affine_attempt", "classify", "cm_disc_for", "count_fp",
    "group", "group_order", "identity", "lift_points", "local_points", "make_point", "neg",
    "on_curve", "point_order", "points", "prime_power_points", "rational_torsion_order",
    "reduce_point", "reduce_rational_point", "scalar_mul", "snz_dominator", "snz_reachable",
]
