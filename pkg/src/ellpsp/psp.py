"""Elliptic pseudoprime tests in the Gordon (CM, target N+1) and Silverman
(target N+1-a_N) flavours, their strong variants, Carmichael checks, and
the structural results about strongly non-zero points."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

from .curve import (
    DEFAULT_CAP,
    CapExceeded,
    Curve,
    Point,
    PointClass,
    add_affine_attempt,
    classify,
    cm_disc_for,
    count_fp,
    group,
    identity,
)
from .fp import group_structure
from .lseries import LCoeffs
from .modarith import FactorFound, Factorization, as_factorization, is_prime, jacobi, lcm, odd_part


class NotComposite(ValueError):
    """The modulus is prime (or 1), so the pseudoprime question is void."""


class Reason(str, enum.Enum):
    ORDER_KILLS = "OrderKills"
    TWO_TORSION_HIT = "TwoTorsionHit"
    FAILS = "Fails"
    JACOBI = "JacobiNotMinusOne"
    BAD_REDUCTION = "BadReduction"
    SIX_DELTA = "GcdSixDeltaNotOne"
    TOO_FEW_PRIMES = "TooFewDistinctPrimes"
    NON_POSITIVE_TARGET = "NonPositiveTarget"
    NOT_COMPOSITE = "NotComposite"


GATE_REASONS = {Reason.JACOBI, Reason.BAD_REDUCTION, Reason.SIX_DELTA,
                Reason.TOO_FEW_PRIMES, Reason.NON_POSITIVE_TARGET, Reason.NOT_COMPOSITE}


@dataclass(frozen=True)
class TraceStep:
    r: int
    point: Point
    cls: PointClass


@dataclass
class Verdict:
    test: str
    n: Factorization
    curve: Curve
    point: Point | None
    passed: bool
    reason: Reason
    s: int | None = None
    t: int | None = None
    trace: list[TraceStep] = field(default_factory=list)
    hit_r: int | None = None
    bad_prime: int | None = None

    @property
    def gate_failed(self) -> bool:
        return self.reason in GATE_REASONS

    def reason_text(self) -> str:
        if self.reason is Reason.TWO_TORSION_HIT:
            return f"TwoTorsionHit({self.hit_r})"
        if self.reason is Reason.BAD_REDUCTION and self.bad_prime:
            return f"BadReduction({self.bad_prime})"
        return self.reason.value

    def as_dict(self) -> dict:
        return {
            "test": self.test,
            "N": self.n.n,
            "curve": self.curve.as_dict(),
            "point": None if self.point is None else self.point.as_dict(),
            "passed": self.passed,
            "reason": self.reason_text(),
            "s": self.s,
            "t": self.t,
            "trace": [{"r": st.r, "point": st.point.as_dict(), "class": st.cls.value}
                      for st in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _verdict(test, F, E, P, reason, **kw):
    passed = reason in (Reason.ORDER_KILLS, Reason.TWO_TORSION_HIT)
    return Verdict(test, F, E, P, passed, reason, **kw)


def _bad_prime(E: Curve, F: Factorization) -> int | None:
    for p in F.primes:
        if not E.has_good_reduction(p):
            return p
    return None


def _g_gate(E: Curve, F: Factorization, check_gates: bool) -> tuple[Reason | None, int | None]:
    if check_gates and not F.is_composite():
        raise NotComposite(f"{F.n} is not composite")
    if check_gates and E.cm_disc is None:
        raise ValueError("the CM discriminant d is required for this test")
    bad = _bad_prime(E, F)
    if bad is not None:
        return Reason.BAD_REDUCTION, bad
    if check_gates:
        if math.gcd(F.n, 6 * E.discriminant) != 1:
            return Reason.SIX_DELTA, None
        if jacobi(-E.cm_disc, F.n) != -1:
            return Reason.JACOBI, None
    return None, None


def g_gates_hold(E: Curve, N) -> bool:
    F = as_factorization(N)
    try:
        return _g_gate(E, F, True)[0] is None
    except (NotComposite, ValueError):
        return False


def s_target(E: Curve, N, coeffs: LCoeffs | None = None) -> int:
    F = as_factorization(N)
    coeffs = coeffs or LCoeffs(E)
    return F.n + 1 - coeffs.a_n(F)


def _s_gate(E: Curve, F: Factorization, check_gates: bool) -> tuple[Reason | None, int | None]:
    if check_gates and not F.is_composite():
        raise NotComposite(f"{F.n} is not composite")
    bad = _bad_prime(E, F)
    if bad is not None:
        return Reason.BAD_REDUCTION, bad
    if check_gates and len(F.factors) < 2:
        return Reason.TOO_FEW_PRIMES, None
    return None, None


def _weak_kernel(test, E, F, P, target):
    G = group(E, F)
    _check_point(G, P)
    kills = G.mul(target, P).is_identity()
    return _verdict(test, F, E, P, Reason.ORDER_KILLS if kills else Reason.FAILS)


def _strong_kernel(test, E, F, P, target, with_trace=True):
    G = group(E, F)
    _check_point(G, P)
    s, t = odd_part(target)
    Q = G.mul(t, P)
    trace = [TraceStep(0, Q, classify(Q))] if with_trace else []
    if Q.is_identity():
        return _verdict(test, F, E, P, Reason.ORDER_KILLS, s=s, t=t, trace=trace)
    for r in range(s):
        if r:
            Q = G.add(Q, Q)
            if with_trace:
                trace.append(TraceStep(r, Q, classify(Q)))
        if Q.z == 1 and Q.y == 0:
            return _verdict(test, F, E, P, Reason.TWO_TORSION_HIT, s=s, t=t, trace=trace, hit_r=r)
        if Q.is_identity():
            break
    return _verdict(test, F, E, P, Reason.FAILS, s=s, t=t, trace=trace)


def _check_point(G, P: Point):
    if not G.contains(P):
        raise ValueError(f"{P} is not on the curve")


def gpsp_test(E: Curve, N, P: Point, check_gates: bool = True) -> Verdict:
    """(N+1)P = O together with the CM Jacobi and gcd(N, 6 disc) gates."""
    F = as_factorization(N)
    gate, bad = _g_gate(E, F, check_gates)
    if gate:
        return _verdict("g", F, E, P, gate, bad_prime=bad)
    return _weak_kernel("g", E, F, P, F.n + 1)


def strong_gpsp_test(E: Curve, N, P: Point, check_gates: bool = True, trace: bool = True) -> Verdict:
    F = as_factorization(N)
    gate, bad = _g_gate(E, F, check_gates)
    if gate:
        s, t = odd_part(F.n + 1)
        return _verdict("strong-g", F, E, P, gate, s=s, t=t, bad_prime=bad)
    return _strong_kernel("strong-g", E, F, P, F.n + 1, trace)


def spsp_test(E: Curve, N, P: Point, check_gates: bool = True, coeffs: LCoeffs | None = None) -> Verdict:
    """(N+1-a_N)P = O for N with at least two distinct prime factors."""
    F = as_factorization(N)
    gate, bad = _s_gate(E, F, check_gates)
    if gate:
        return _verdict("s", F, E, P, gate, bad_prime=bad)
    target = s_target(E, F, coeffs)
    if target == 0:
        return _verdict("s", F, E, P, Reason.NON_POSITIVE_TARGET)
    return _weak_kernel("s", E, F, P, abs(target))


def strong_spsp_test(E: Curve, N, P: Point, check_gates: bool = True, coeffs: LCoeffs | None = None,
                     trace: bool = True) -> Verdict:
    F = as_factorization(N)
    gate, bad = _s_gate(E, F, check_gates)
    if gate:
        return _verdict("strong-s", F, E, P, gate, bad_prime=bad)
    target = s_target(E, F, coeffs)
    if target <= 0:
        return _verdict("strong-s", F, E, P, Reason.NON_POSITIVE_TARGET)
    return _strong_kernel("strong-s", E, F, P, target, trace)


FLAVORS = ("g", "s", "strong-g", "strong-s")


def run_test(flavor: str, E: Curve, N, P: Point, check_gates: bool = True, coeffs=None) -> Verdict:
    if flavor == "g":
        return gpsp_test(E, N, P, check_gates)
    if flavor == "strong-g":
        return strong_gpsp_test(E, N, P, check_gates, trace=False)
    if flavor == "s":
        return spsp_test(E, N, P, check_gates, coeffs)
    if flavor == "strong-s":
        return strong_spsp_test(E, N, P, check_gates, coeffs, trace=False)
    raise ValueError(f"unknown flavour {flavor!r}")


def epsilon(E: Curve, N, p: int) -> int:
    """Exponent of the component E(Z/p^v Z), v the valuation of p in N."""
    F = as_factorization(N)
    for q, e in F.factors:
        if q == p:
            G = group(E, Factorization.from_factors([(p, e)]))
            return lcm(*(G.point_order(P) for P in G.points()))
    raise ValueError(f"{p} does not divide {F.n}")


@dataclass(frozen=True)
class CarmichaelResult:
    holds: bool
    witness: Point | None
    checked: int


def carmichael_test(E: Curve, N, flavor: str, mode: str = "all", check_gates: bool = True,
                    cap: int = DEFAULT_CAP) -> CarmichaelResult:
    """Does the flavour's test pass at every point (mode="all") or at every
    strongly non-zero point (mode="strong")?"""
    F = as_factorization(N)
    G = group(E, F)
    if mode == "all":
        pts = G.points(cap)
    elif mode == "strong":
        pts = G.strong_points(cap)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    coeffs = LCoeffs(E) if flavor in ("s", "strong-s") else None
    for i, P in enumerate(pts):
        if not run_test(flavor, E, F, P, check_gates, coeffs).passed:
            return CarmichaelResult(False, P, i + 1)
    return CarmichaelResult(True, None, len(pts))


# ---------------------------------------------------------------------------
# Witnesses against the strong G test at strongly non-zero points.


def _nu2(n: int) -> int:
    return odd_part(n)[0]


def _kernel_fails(E, F, P) -> bool:
    return not strong_gpsp_test(E, F, P, check_gates=False, trace=False).passed


def _component_snz(G, i):
    L = G.locals[i]
    return [c for c in G.component_points(i) if c[2] % L.p]


def _witness_candidates(E: Curve, F: Factorization):
    """Candidate points following the three constructive cases."""
    G = group(E, F)
    snz = [_component_snz(G, i) for i in range(len(G.locals))]
    if any(not c for c in snz):
        return
    base = [c[0] for c in snz]
    # square factor: a point whose order is divisible by p is never killed
    # by a multiple of N+1 and never lands on 2-torsion
    for i, L in enumerate(G.locals):
        if L.e >= 2:
            for c in snz[i]:
                if L.point_order(c) % L.p == 0:
                    parts = list(base)
                    parts[i] = c
                    yield G.join(parts)
                    break
    # a component point whose odd order does not divide t: no multiple
    # (2^r t)P can be the identity or 2-torsion there
    _, t = odd_part(F.n + 1)
    for i, L in enumerate(G.locals):
        for c in snz[i]:
            if t % odd_part(L.point_order(c))[1]:
                parts = list(base)
                parts[i] = c
                yield G.join(parts)
                break
    # mismatched 2-adic valuations of component orders: an odd order point
    # against an even one, or an order-4 point against an order-2 point
    by_val = []
    for i, L in enumerate(G.locals):
        vals = {}
        for c in snz[i]:
            vals.setdefault(_nu2(L.point_order(c)), c)
        by_val.append(vals)
    for i in range(len(G.locals)):
        for j in range(len(G.locals)):
            if i == j:
                continue
            if 0 in by_val[i]:
                for v, c in sorted(by_val[j].items()):
                    if v >= 1:
                        parts = list(base)
                        parts[i], parts[j] = by_val[i][0], c
                        yield G.join(parts)
                        break
            if 2 in by_val[i] and 1 in by_val[j]:
                parts = list(base)
                parts[i], parts[j] = by_val[i][2], by_val[j][1]
                yield G.join(parts)


def strong_g_witness(E: Curve, N, check_gates: bool = True, allow_scan: bool = True) -> Point:
    """A strongly non-zero point at which the strong G test fails.

    Candidates from the constructive cases are verified against the test
    kernel; if none applies the strongly non-zero points are scanned.
    """
    F = as_factorization(N)
    if check_gates and not F.is_composite():
        raise NotComposite(f"{F.n} is not composite")
    for P in _witness_candidates(E, F):
        if _kernel_fails(E, F, P):
            return P
    if allow_scan:
        for P in group(E, F).strong_points():
            if not strong_gpsp_test(E, F, P, check_gates, trace=False).passed:
                return P
    raise RuntimeError(f"no strongly non-zero witness on {E} mod {F.n}")


def scan_strong_g_witnesses(E: Curve, N, check_gates: bool = True) -> list[Point]:
    F = as_factorization(N)
    return [P for P in group(E, F).strong_points()
            if not strong_gpsp_test(E, F, P, check_gates, trace=False).passed]


class StrongSClass(str, enum.Enum):
    HOLDS_VIA_I = "HoldsViaI"
    HOLDS_VIA_II = "HoldsViaII"
    FAILS = "Fails"


def strong_s_snz_characterization(E: Curve, N) -> StrongSClass:
    """Classify from component exponents whether the strong S test passes at
    every strongly non-zero point."""
    F = as_factorization(N)
    target = s_target(E, F)
    if target <= 0:
        return StrongSClass.FAILS
    _, t = odd_part(target)
    eps = [epsilon(E, F, p) for p in F.primes]
    if all(t % ep == 0 for ep in eps):
        return StrongSClass.HOLDS_VIA_I
    small = all(group_structure(E, p).invariants in ((1, 2), (2, 2)) for p in F.primes)
    if small and all((2 * t) % ep == 0 for ep in eps):
        return StrongSClass.HOLDS_VIA_II
    return StrongSClass.FAILS


def strong_s_snz_bruteforce(E: Curve, N) -> bool:
    F = as_factorization(N)
    coeffs = LCoeffs(E)
    return all(strong_spsp_test(E, F, P, coeffs=coeffs, trace=False).passed
               for P in group(E, F).strong_points())


def search_pseudoprimes(flavor: str, E: Curve, x, y, lo: int, hi: int, check_gates: bool = True):
    """Yield every odd composite N in [lo, hi] at which the rational point
    (x, y), reduced mod N, passes the flavour's test."""
    from .curve import reduce_rational_point

    coeffs = LCoeffs(E) if flavor in ("s", "strong-s") else None
    for n in range(max(lo, 3) | 1, hi + 1, 2):
        if is_prime(n):
            continue
        try:
            F = Factorization.of(n)
            P = reduce_rational_point(E, n, x, y)
            if run_test(flavor, E, F, P, check_gates, coeffs).passed:
                yield n
        except ValueError:
            # bad reduction, a point denominator sharing a factor with n,
            # or a modulus divisible by 9
            continue


def sweep_curves(F: Factorization):
    """Every short curve mod N with good reduction and at least one strongly
    non-zero point, coefficients in lexicographic order."""
    for a in range(F.n):
        for b in range(F.n):
            E = Curve(a, b)
            try:
                G = group(E, F)
            except ValueError:
                continue
            if G.strong_points():
                yield E


def supersingular_somewhere(E: Curve, F: Factorization) -> bool:
    """Some prime p | N with #E(F_p) = p + 1.

    This is what the CM Jacobi condition guarantees for a genuine CM curve,
    and it is the gate used when sweeping curves that carry no CM data.
    """
    return any(e == 1 and count_fp(E, p) == p + 1 for p, e in F.factors)


def with_sweep_disc(E: Curve, n: int) -> Curve:
    """Attach the CM discriminant of the classical families, otherwise the
    smallest d with (-d/n) = -1, or None when no d works (n a square)."""
    d = cm_disc_for(E.a % n, E.b % n)
    if d is None or jacobi(-d, n) != -1:
        d = next((k for k in range(1, 4 * n) if jacobi(-k, n) == -1), None)
    return Curve(E.a, E.b, d)


# ---------------------------------------------------------------------------
# Goldwasser-Kilian certificates.


def gk_size_ok(N: int, M: int) -> bool:
    """M > (N^(1/4) + 1)^2, decided in integers.

    Equivalent to (sqrt(M) - 1)^4 > N, i.e. L > 4 (M+1) sqrt(M) with
    L = M^2 + 6M + 1 - N.
    """
    if M <= 1:
        return False
    L = M * M + 6 * M + 1 - N
    return L > 0 and L * L > 16 * (M + 1) ** 2 * M


def _affine_mul(E: Curve, n: int, k: int, P: Point) -> Point:
    R = identity(n)
    while k:
        if k & 1:
            R = add_affine_attempt(E, n, R, P)
        k >>= 1
        if k:
            P = add_affine_attempt(E, n, P, P)
    return R


def gk_certificate_check(E: Curve, N: int, M: int, P: Point, M_factors: Factorization) -> bool:
    """Verify an elliptic primality certificate without factoring N.

    All arithmetic is chord-tangent mod N, so a non-invertible denominator
    simply rejects the certificate.
    """
    if math.gcd(N, E.discriminant) != 1 or M_factors.n != M or P.n != N:
        return False
    if not gk_size_ok(N, M):
        return False
    try:
        if classify(_affine_mul(E, N, M, P)) is not PointClass.ZERO:
            return False
        for q in M_factors.primes:
            if not _affine_mul(E, N, M // q, P).is_strong():
                return False
    except (FactorFound, ZeroDivisionError):
        return False
    return True


def find_gk_certificate(N: int, max_coeff: int = 50):
    """Search small curves for a certificate (E, M, P, factors of M) for prime N."""
    if not is_prime(N):
        raise ValueError(f"{N} is not prime")
    F = Factorization.from_factors([(N, 1)])
    for a in range(1, max_coeff):
        for b in range(1, max_coeff):
            E = Curve(a, b)
            if not E.has_good_reduction(N):
                continue
            G = group(E, F)
            order = G.order()
            for M in sorted({d for d in range(2, order + 1) if order % d == 0}):
                if not gk_size_ok(N, M):
                    continue
                Mf = Factorization.of(M)
                for x in range(N):
                    R = _point_at(E, N, x)
                    if R is None:
                        continue
                    P = G.mul(order // M, R)
                    if gk_certificate_check(E, N, M, P, Mf):
                        return E, M, P, Mf
    raise RuntimeError(f"no certificate found for {N}")


def _point_at(E: Curve, p: int, x: int) -> Point | None:
    from .modarith import sqrt_mod_prime

    y = sqrt_mod_prime(E.rhs(x) % p, p)
    return None if y is None else Point(x % p, y, 1, p)


__all__ = [
    "CarmichaelResult", "FLAVORS", "NotComposite", "Reason", "StrongSClass", "TraceStep", "Verdict",
    "carmichael_test", "epsilon", "find_gk_certificate", "g_gates_hold", "gk_certificate_check",
    "gk_size_ok", "gpsp_test", "run_test", "s_target", "scan_strong_g_witnesses", "search_pseudoprimes", "spsp_test",
    "strong_g_witness", "strong_gpsp_test", "strong_s_snz_bruteforce",
    "strong_s_snz_characterization", "strong_spsp_test", "CapExceeded", "supersingular_somewhere",
    "sweep_curves", "with_sweep_disc",
]
