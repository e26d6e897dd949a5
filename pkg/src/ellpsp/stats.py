"""Exact proportion statistics for 2-adic point orders.

Everything here is a Fraction; floats appear only in the binomial error
radius of the Monte Carlo check.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .curve import DEFAULT_CAP, CapExceeded, Curve, group
from .modarith import Factorization, as_factorization, odd_part
from .psp import strong_gpsp_test


class BoundViolation(AssertionError):
    """An exact or sampled proportion exceeded the bound it is claimed to obey."""


def _nu2(n: int) -> int:
    return odd_part(n)[0]


# ---------------------------------------------------------------------------
# Distributions of 2-adic valuations of point orders on actual curves.


@lru_cache(maxsize=4096)
def j_distribution(E: Curve, p: int, a: int = 1, strong_only: bool = False,
                   cap: int = DEFAULT_CAP) -> tuple[Fraction, ...]:
    """Entry x is the share of points of E(Z/p^a Z) whose order has 2-adic
    valuation x; with strong_only the share among strongly non-zero points."""
    G = group(E.reduced(p**a), Factorization.from_factors([(p, a)]))
    pts = G.strong_points(cap) if strong_only else G.points(cap)
    if not pts:
        raise ValueError(f"no points to count on {E} mod {p}^{a}")
    counts: dict[int, int] = {}
    for P in pts:
        v = _nu2(G.point_order(P))
        counts[v] = counts.get(v, 0) + 1
    top = max(counts)
    return tuple(Fraction(counts.get(x, 0), len(pts)) for x in range(top + 1))


def j_stat(E: Curve, p: int, a: int, x: int) -> Fraction:
    dist = j_distribution(E, p, a)
    return dist[x] if x < len(dist) else Fraction(0)


def h_stat(E: Curve, N, x: int) -> Fraction:
    F = as_factorization(N)
    return math.prod((j_stat(E, p, a, x) for p, a in F.factors), start=Fraction(1))


def g_stat(E: Curve, N) -> Fraction:
    """Probability that a random point has equal 2-adic order valuation in
    every component."""
    F = as_factorization(N)
    dists = [j_distribution(E, p, a) for p, a in F.factors]
    top = min(len(d) for d in dists)
    return sum((math.prod((d[x] for d in dists), start=Fraction(1)) for x in range(top)), Fraction(0))


# ---------------------------------------------------------------------------
# Closed-form distributions on abstract groups Z/(2^s t) + Z/(2^r w).


@dataclass(frozen=True)
class HVector:
    entries: tuple[Fraction, ...]
    source: tuple[int, ...] = ()

    def __getitem__(self, k: int) -> Fraction:
        return self.entries[k] if 0 <= k < len(self.entries) else Fraction(0)

    def __len__(self) -> int:
        return len(self.entries)

    def total(self) -> Fraction:
        return sum(self.entries, Fraction(0))

    def dot(self, other: "HVector") -> Fraction:
        return dot(self, other)


def h_vector(s: int, r: int) -> HVector:
    """2-adic valuation distribution of orders over all points."""
    if not 0 <= s <= r:
        raise ValueError("need 0 <= s <= r")
    den = 2 ** (r + s)
    out = [Fraction(1, den)]
    for k in range(1, r + 1):
        if k <= s:
            out.append(Fraction(3 * 2 ** (2 * k - 2), den))
        else:
            out.append(Fraction(2 ** (s + k - 1), den))
    return HVector(tuple(out), (s, r))


def h_prime_vector(s: int, r: int, t: int, w: int) -> HVector:
    """Same distribution restricted to the non-identity elements."""
    if not 0 <= s <= r:
        raise ValueError("need 0 <= s <= r")
    if t % 2 == 0 or w % 2 == 0 or t < 1 or w < 1:
        raise ValueError("t and w must be odd and positive")
    tw = t * w
    den = 2 ** (r + s) * tw - 1
    if den == 0:
        raise ValueError("the trivial group has no non-identity elements")
    out = [Fraction(tw - 1, den)]
    for k in range(1, r + 1):
        if k <= s:
            out.append(Fraction(3 * 2 ** (2 * k - 2) * tw, den))
        else:
            out.append(Fraction(2 ** (s + k - 1) * tw, den))
    return HVector(tuple(out), (s, r, t, w))


def dot(u: HVector, v: HVector) -> Fraction:
    return sum((u[k] * v[k] for k in range(min(len(u), len(v)))), Fraction(0))


def abstract_census(s: int, r: int, t: int = 1, w: int = 1, skip_identity: bool = False) -> HVector:
    """Brute-force valuation census over the elements of Z/(2^s t) + Z/(2^r w)."""
    n1, n2 = 2**s * t, 2**r * w
    counts: dict[int, int] = {}
    total = 0
    for a in range(n1):
        for b in range(n2):
            if skip_identity and a == 0 and b == 0:
                continue
            order = math.lcm(n1 // math.gcd(a, n1), n2 // math.gcd(b, n2))
            v = _nu2(order)
            counts[v] = counts.get(v, 0) + 1
            total += 1
    top = max(counts)
    return HVector(tuple(Fraction(counts.get(x, 0), total) for x in range(top + 1)), (s, r, t, w))


def _trim(v: HVector) -> tuple[Fraction, ...]:
    e = list(v.entries)
    while len(e) > 1 and e[-1] == 0:
        e.pop()
    return tuple(e)


def same_distribution(u: HVector, v: HVector) -> bool:
    return _trim(u) == _trim(v)


# ---------------------------------------------------------------------------
# Grid verification of the maximisation statements.


@dataclass
class GridReport:
    bound: Fraction
    maximum: Fraction
    argmax: list[tuple]
    violations: list[tuple] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "bound": str(self.bound),
            "maximum": str(self.maximum),
            "argmax": [list(a) for a in self.argmax],
            "violations": [[list(a), str(v)] for a, v in self.violations],
            "checked": self.checked,
            "ok": self.ok,
        }


def verify_max_h(grid_bound: int) -> GridReport:
    """Check h(s1,r1).h(s2,r2) <= 5/8 over 0 <= s_i <= r_i <= grid_bound
    with r1 >= 1."""
    if grid_bound < 2:
        raise ValueError("grid_bound must be at least 2")
    pairs = [(s, r) for r in range(grid_bound + 1) for s in range(r + 1)]
    vecs = {sr: h_vector(*sr) for sr in pairs}
    bound = Fraction(5, 8)
    rep = GridReport(bound, Fraction(0), [])
    for a, b in product(pairs, repeat=2):
        if a[1] < 1:
            continue
        val = dot(vecs[a], vecs[b])
        rep.checked += 1
        if val > rep.maximum:
            rep.maximum, rep.argmax = val, [a + b]
        elif val == rep.maximum:
            rep.argmax.append(a + b)
        if val > bound:
            rep.violations.append((a + b, val))
    return rep


def structures(grid_bound: int, tw_bound: int) -> list[tuple[int, int, int, int]]:
    """All (s, r, t, w) with s <= r <= grid_bound, odd t, w <= tw_bound,
    2^s t | 2^r w and more than one element."""
    odds = range(1, tw_bound + 1, 2)
    out = []
    for r in range(grid_bound + 1):
        for s in range(r + 1):
            for t in odds:
                for w in odds:
                    if (2**r * w) % (2**s * t) == 0 and 2 ** (r + s) * t * w > 1:
                        out.append((s, r, t, w))
    return out


def strong_cap_admissible(first: tuple, second: tuple = ()) -> bool:
    """Pairs covered by the 9/11 cap.

    The first group has at least one factor of two (r >= 1) and at least six
    elements, which is what a group of order p+1 with p >= 5 provides.  Two
    groups of exponent two give a dot product of 1, so the cap cannot hold
    without the size condition.
    """
    s, r, t, w = first
    return r >= 1 and 2 ** (r + s) * t * w >= 6


def _prime_numerators(s: int, r: int, tw: int) -> tuple[list[int], int]:
    den = 2 ** (r + s) * tw - 1
    nums = [tw - 1]
    for k in range(1, r + 1):
        nums.append(3 * 2 ** (2 * k - 2) * tw if k <= s else 2 ** (s + k - 1) * tw)
    return nums, den


def verify_max_h_prime(grid_bound: int, tw_bound: int) -> GridReport:
    """Grid check of the strongly non-zero analogue.

    For every admissible pair the product must not exceed the product with
    both 2-parts replaced by (1,1), and must not exceed 9/11.  The closed
    form depends on t and w only through tw, so structures are grouped by
    (s, r, tw) and compared in integers.
    """
    if grid_bound < 2 or tw_bound < 2:
        raise ValueError("bounds must be at least 2")
    reps: dict[tuple[int, int, int], tuple] = {}
    for g in structures(grid_bound, tw_bound):
        reps.setdefault((g[0], g[1], g[2] * g[3]), g)
    keys = sorted(reps)
    table = {k: _prime_numerators(*k) for k in keys}
    top = {tw: _prime_numerators(1, 1, tw) for tw in {k[2] for k in keys}}
    bound = Fraction(9, 11)
    rep = GridReport(bound, Fraction(0), [])
    best_num, best_den = 0, 1
    for ka in keys:
        a = reps[ka]
        if not strong_cap_admissible(a):
            continue
        na, da = table[ka]
        ta, tda = top[ka[2]]
        for kb in keys:
            nb, db = table[kb]
            num = sum(x * y for x, y in zip(na, nb))
            den = da * db
            rep.checked += 1
            if num * best_den > best_num * den:
                best_num, best_den = num, den
                rep.argmax = [a + reps[kb]]
            elif num * best_den == best_num * den:
                rep.argmax.append(a + reps[kb])
            if 11 * num > 9 * den:
                rep.violations.append((a + reps[kb], Fraction(num, den)))
                continue
            tb, tdb = top[kb[2]]
            cap = sum(x * y for x, y in zip(ta, tb))
            if num * tda * tdb > cap * den:
                rep.violations.append((a + reps[kb], Fraction(num, den)))
    rep.maximum = Fraction(best_num, best_den)
    return rep


# ---------------------------------------------------------------------------
# Point-level bounds on actual curves.


def incompat_proportion(E: Curve, p: int, alpha: int, enforce: bool = True) -> Fraction:
    """Share of E(Z/p^alpha Z) whose order is divisible by p."""
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    G = group(E.reduced(p**alpha), Factorization.from_factors([(p, alpha)]))
    pts = G.points()
    frac = Fraction(sum(1 for P in pts if G.point_order(P) % p == 0), len(pts))
    lower = Fraction(p ** (alpha - 1) - 1, p ** (alpha - 1))
    if enforce and frac < lower:
        raise BoundViolation(f"{frac} < {lower} on {E} mod {p}^{alpha}")
    return frac


def strong_g_point_fraction(E: Curve, N, mode: str = "all", check_gates: bool = True,
                            cap: int = DEFAULT_CAP) -> Fraction:
    """Share of points (mode="all") or strongly non-zero points
    (mode="strong") at which the strong G test passes."""
    F = as_factorization(N)
    G = group(E, F)
    if mode == "all":
        pts = G.points(cap)
    elif mode == "strong":
        pts = G.strong_points(cap)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not pts:
        raise ValueError("no points in the selected set")
    passed = sum(1 for P in pts if strong_gpsp_test(E, F, P, check_gates, trace=False).passed)
    return Fraction(passed, len(pts))


# ---------------------------------------------------------------------------
# Random-curve bounds.


def bound_all_points(p: int, q: int) -> Fraction:
    return Fraction(17 * p * q + 2 * p + 2 * q + 4, 32 * p * q)


def bound_strong_points(p: int, q: int) -> Fraction:
    return Fraction(78 * p * q - 5 * p - 5 * q + 12, 120 * p * q)


def good_curves(p: int) -> list[Curve]:
    return [Curve(a, b) for a in range(p) for b in range(p) if (4 * a**3 + 27 * b * b) % p]


@lru_cache(maxsize=256)
def average_distribution(p: int, strong_only: bool = False) -> tuple[Fraction, ...]:
    """Valuation distribution of a uniform point on a uniform nonsingular
    short curve over F_p."""
    curves = good_curves(p)
    acc: list[Fraction] = []
    for E in curves:
        d = j_distribution(E, p, 1, strong_only)
        if len(d) > len(acc):
            acc.extend([Fraction(0)] * (len(d) - len(acc)))
        for i, v in enumerate(d):
            acc[i] += v
    return tuple(v / len(curves) for v in acc)


def census_probability(primes, strong_only: bool = False) -> Fraction:
    """Exact probability, over independent uniform curves per prime and a
    uniform point, that all component valuations agree."""
    dists = [average_distribution(p, strong_only) for p in primes]
    top = min(len(d) for d in dists)
    return sum((math.prod((d[x] for d in dists), start=Fraction(1)) for x in range(top)), Fraction(0))


@dataclass
class ExperimentRecord:
    seed: int
    n: Factorization
    p: int
    q: int
    sample_size: int
    hits: int
    bound: Fraction
    mode: str = "all"
    space: str = "short-uniform"
    generator: str = "python-random-mt19937"

    @property
    def observed(self) -> Fraction:
        return Fraction(self.hits, self.sample_size)

    def error_radius(self, sigmas: float = 3.0) -> float:
        b = float(self.bound)
        return sigmas * math.sqrt(max(b * (1 - b), 0.0) / self.sample_size)

    def within_bound(self, sigmas: float = 3.0) -> bool:
        return float(self.observed - self.bound) <= self.error_radius(sigmas)

    def as_dict(self) -> dict:
        obs = self.observed
        return {
            "seed": self.seed,
            "N": self.n.n,
            "factors": [list(f) for f in self.n.factors],
            "p": self.p,
            "q": self.q,
            "mode": self.mode,
            "space": self.space,
            "generator": self.generator,
            "samples": self.sample_size,
            "observed_num": obs.numerator,
            "observed_den": obs.denominator,
            "bound_num": self.bound.numerator,
            "bound_den": self.bound.denominator,
            "within_3_sigma": self.within_bound(),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _curve_points(p: int):
    """Per nonsingular short curve over F_p, the order valuations of its points."""
    out = []
    for E in good_curves(p):
        G = group(E, Factorization.from_factors([(p, 1)]))
        out.append([(_nu2(G.point_order(P)), P.is_strong()) for P in G.points()])
    return out


def random_curve_bound_check(N, p: int, q: int, samples: int, seed: int, mode: str = "all",
                             enforce: bool = True) -> ExperimentRecord:
    """Monte Carlo estimate of the probability that a random point on a
    random curve has equal order valuations in every component.

    Each distinct prime gets an independent uniform nonsingular short curve;
    prime powers are sampled through their prime (the valuation distribution
    does not change under lifting).
    """
    F = as_factorization(N)
    if p == q or F.n % p or F.n % q:
        raise ValueError("p and q must be distinct primes dividing N")
    if samples < 1:
        raise ValueError("need at least one sample")
    if mode not in ("all", "strong"):
        raise ValueError(f"unknown mode {mode!r}")
    tables = [_curve_points(r) for r in F.primes]
    if mode == "strong":
        tables = [[[pt for pt in c if pt[1]] for c in tab] for tab in tables]
        tables = [[c for c in tab if c] for tab in tables]
    rng = random.Random(seed)
    hits = 0
    for _ in range(samples):
        vals = set()
        for tab in tables:
            curve = tab[rng.randrange(len(tab))]
            vals.add(curve[rng.randrange(len(curve))][0])
        hits += len(vals) == 1
    bound = bound_all_points(p, q) if mode == "all" else bound_strong_points(p, q)
    rec = ExperimentRecord(seed, F, p, q, samples, hits, bound, mode)
    if enforce and not rec.within_bound():
        raise BoundViolation(f"observed {float(rec.observed):.4f} exceeds {bound} beyond 3 sigma")
    return rec


__all__ = [
    "BoundViolation", "CapExceeded", "ExperimentRecord", "GridReport", "HVector", "abstract_census",
    "average_distribution", "bound_all_points", "bound_strong_points", "census_probability", "dot",
    "g_stat", "good_curves", "h_prime_vector", "h_stat", "h_vector", "incompat_proportion",
    "j_distribution", "j_stat", "random_curve_bound_check", "same_distribution",
    "strong_cap_admissible", "strong_g_point_fraction", "structures", "verify_max_h",
    "verify_max_h_prime",
]
