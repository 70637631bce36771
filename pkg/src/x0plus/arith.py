"""Multiplicative functions and the genus formula for X0(N).

Everything in this module is a pure function of the factorization of the
level: the index psi(N), elliptic point counts nu2/nu3, the cusp count
nu_inf, the genus of X0(N) and Ogg's lower bound L_p(N) on the number of
points of X0(N) over the field with p^2 elements.
"""

from dataclasses import dataclass
from math import gcd

from .rationals import QQ


@dataclass(frozen=True)
class Level:
    """A positive integer together with its canonical factorization."""

    N: int
    factorization: tuple  # ((p, e), ...) with primes increasing

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factorization:
            if p <= last:
                raise ValueError("primes must be distinct and increasing")
            if e < 1 or any(p % r == 0 for r in range(2, int(p**0.5) + 1)):
                raise ValueError(f"{p}^{e} is not a prime power")
            last = p
            prod *= p**e
        if prod != self.N:
            raise ValueError(f"factorization does not multiply to {self.N}")

    @property
    def primes(self):
        return tuple(p for p, _ in self.factorization)

    def __int__(self):
        return self.N


def factorize(N):
    """Trial-division factorization; returns a :class:`Level`.

    Levels in this package stay below a few thousand, so nothing smarter
    is warranted.
    """
    if N < 1:
        raise ValueError("N must be a positive integer")
    n = N
    factors = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        factors.append((n, 1))
    return Level(N, tuple(factors))


def as_level(N):
    return N if isinstance(N, Level) else factorize(N)


def divisors(level):
    level = as_level(level)
    divs = [1]
    for p, e in level.factorization:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def exact_divisors(level):
    """All Q with Q | N and gcd(Q, N/Q) = 1 (the Hall divisors), including 1."""
    level = as_level(level)
    divs = [1]
    for p, e in level.factorization:
        divs = [d * q for d in divs for q in (1, p**e)]
    return sorted(divs)


def euler_phi(n):
    result = n
    for p, _ in factorize(n).factorization:
        result -= result // p
    return result


def psi(level):
    """Index of Gamma_0(N) in SL_2(Z): N * prod_{q | N} (1 + 1/q)."""
    level = as_level(level)
    result = level.N
    for p, _ in level.factorization:
        result = result // p * (p + 1)
    return result


def omega(level):
    """Number of distinct prime divisors of N."""
    return len(as_level(level).factorization)


def kronecker(a, n):
    """Kronecker symbol (a|n), n > 0, via quadratic reciprocity."""
    if n <= 0:
        raise ValueError("only positive n supported")
    result = 1
    # strip factors of two from n, using (a|2) = 0, 1, -1 for a even, +-1, +-3 mod 8
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    if n == 1:
        return result
    a %= n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    if n != 1:
        return 0
    return result


def nu2(level):
    """Number of elliptic points of order 2 on X0(N)."""
    level = as_level(level)
    if level.N % 4 == 0:
        return 0
    result = 1
    for p, _ in level.factorization:
        if p == 2:
            continue
        result *= 1 + kronecker(-1, p)
    return result


def nu3(level):
    """Number of elliptic points of order 3 on X0(N)."""
    level = as_level(level)
    if level.N % 9 == 0:
        return 0
    result = 1
    for p, _ in level.factorization:
        if p == 3:
            continue
        result *= 1 + kronecker(-3, p)
    return result


def nu_inf(level):
    """Number of cusps of X0(N): sum over d | N of phi(gcd(d, N/d))."""
    level = as_level(level)
    return sum(euler_phi(gcd(d, level.N // d)) for d in divisors(level))


def genus_x0(level):
    """Genus of X0(N) by the standard index/elliptic-point/cusp formula."""
    level = as_level(level)
    twelve_g = 12 + psi(level) - 3 * nu2(level) - 4 * nu3(level) - 6 * nu_inf(level)
    if twelve_g % 12 != 0:
        raise ArithmeticError(f"genus formula non-integral at N={level.N}")
    g = twelve_g // 12
    if g < 0:
        raise ArithmeticError(f"negative genus at N={level.N}")
    return g


def ogg_L(level, p):
    """Ogg's bound L_p(N) = (p-1)/12 * psi(N) + 2^omega(N), exact rational.

    Requires p not dividing N (good reduction).
    """
    level = as_level(level)
    if level.N % p == 0:
        raise ValueError(f"p={p} divides N={level.N}")
    return QQ(p - 1, 12) * psi(level) + 2 ** omega(level)
