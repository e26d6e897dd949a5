"""Integer primitives shared by the curve code: Jacobi symbol, inverses that
report factors, valuations, CRT, and a deterministic primality check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

# Exact rationals are the currency of every proportion in the package.
Ratio = Fraction

# Jaeschke / Sorenson-Webster: these bases are deterministic below 3.3e24,
# which covers every 64-bit input.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
MAX_PRIME = 2**64
DEFAULT_TRIAL_BOUND = 10**6


class FactorFound(ArithmeticError):
    """A non-invertible residue exposed a proper divisor of the modulus."""

    def __init__(self, factor: int, modulus: int):
        super().__init__(f"{factor} divides {modulus}")
        self.factor = factor
        self.modulus = modulus


class ZeroDivisorTotal(ZeroDivisionError):
    """The residue is 0 modulo the whole modulus."""


def jacobi(a: int, n: int) -> int:
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs a positive odd modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def inverse_or_factor(a: int, n: int) -> int:
    """Return u with a*u = 1 (mod n).

    Raises FactorFound when 1 < gcd(a, n) < n and ZeroDivisorTotal when
    a = 0 (mod n).
    """
    if n < 2:
        raise ValueError("modulus must be at least 2")
    g = math.gcd(a, n)
    if g == 1:
        return pow(a, -1, n)
    if g == n:
        raise ZeroDivisorTotal(f"{a} = 0 mod {n}")
    raise FactorFound(g, n)


def nu(p: int, n: int) -> int:
    """p-adic valuation of n >= 1."""
    if n < 1:
        raise ValueError("valuation needs n >= 1")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def odd_part(n: int) -> tuple[int, int]:
    """Split n > 0 as 2**s * t with t odd; returns (s, t)."""
    s = nu(2, n)
    return s, n >> s


def crt_combine(residues) -> tuple[int, int]:
    """Solve x = r_i (mod m_i) for pairwise coprime m_i; returns (x, prod m_i)."""
    x, m = 0, 1
    for r, mi in residues:
        if math.gcd(m, mi) != 1:
            raise ValueError(f"moduli {m} and {mi} are not coprime")
        # x + m*k = r (mod mi)
        k = (r - x) * pow(m, -1, mi) % mi if mi > 1 else 0
        x += m * k
        m *= mi
    return x % m, m


def lcm(*values: int) -> int:
    return reduce(lambda u, v: u * v // math.gcd(u, v), values, 1)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= 3_317_044_064_679_887_385_961_981:
        raise ValueError("primality check is only deterministic below 3.3e24")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """A square root of a modulo an odd prime p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def factor_int(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND) -> list[tuple[int, int]]:
    """Trial division up to trial_bound; the leftover cofactor must be prime.

    Raises ValueError if a composite cofactor survives (no general factoring
    engine here) or if a prime factor exceeds 64 bits.
    """
    if n < 1:
        raise ValueError("can only factor positive integers")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = nu(p, n)
            out.append((p, e))
            n //= p**e
    p = 5
    step = 2
    while p * p <= n and p <= trial_bound:
        if n % p == 0:
            e = nu(p, n)
            out.append((p, e))
            n //= p**e
        p += step
        step = 6 - step
    if n > 1:
        if not is_prime(n):
            raise ValueError(f"cofactor {n} is composite beyond the trial bound")
        if n >= MAX_PRIME:
            raise ValueError(f"prime factor {n} exceeds 64 bits")
        out.append((n, 1))
    return out


@dataclass(frozen=True)
class Factorization:
    """A positive integer together with its prime-power factorization."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("modulus must be positive")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last:
                raise ValueError("primes must be strictly increasing")
            if e < 1:
                raise ValueError("exponents must be positive")
            if p >= MAX_PRIME or not is_prime(p):
                raise ValueError(f"{p} is not an admissible prime")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @classmethod
    def of(cls, n: int, trial_bound: int = DEFAULT_TRIAL_BOUND) -> "Factorization":
        return cls(n, tuple(factor_int(n, trial_bound)))

    @classmethod
    def from_factors(cls, factors) -> "Factorization":
        factors = tuple(sorted((int(p), int(e)) for p, e in factors))
        n = 1
        for p, e in factors:
            n *= p**e
        return cls(n, factors)

    @classmethod
    def parse(cls, text: str) -> "Factorization":
        """Parse '161', '161=7*23' or '175=5^2*7'."""
        text = text.strip().replace(" ", "")
        if "=" not in text:
            return cls.of(int(text))
        lhs, rhs = text.split("=", 1)
        factors = []
        for part in rhs.split("*"):
            p, _, e = part.partition("^")
            factors.append((int(p), int(e) if e else 1))
        f = cls.from_factors(factors)
        if f.n != int(lhs):
            raise ValueError(f"{rhs} does not multiply to {lhs}")
        return f

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**e for p, e in self.factors)

    def is_prime(self) -> bool:
        return len(self.factors) == 1 and self.factors[0][1] == 1

    def is_composite(self) -> bool:
        return self.n > 1 and not self.is_prime()

    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def without_last(self) -> "Factorization":
        return Factorization.from_factors(self.factors[:-1])

    def __str__(self) -> str:
        body = "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)
        return f"{self.n}={body}" if body else str(self.n)


def as_factorization(n) -> Factorization:
    return n if isinstance(n, Factorization) else Factorization.of(int(n))
