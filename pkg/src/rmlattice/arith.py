"""Small exact integer helpers: primality, factorization, square parts."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
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


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division, {prime: exponent}."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        if is_prime(n):
            break
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    return all(e == 1 for e in factorize(n).values())


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, in {-1, 0, 1}."""
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def sqrt_upper(n: int, scale: int = 10**8) -> Fraction:
    """A rational upper bound on sqrt(n), tight to about 1/scale."""
    if n < 0:
        raise ValueError("negative radicand")
    return Fraction(isqrt(n * scale * scale) + 1, scale)


def sqrt_lower(n: int, scale: int = 10**8) -> Fraction:
    """A rational lower bound on sqrt(n)."""
    if n < 0:
        raise ValueError("negative radicand")
    return Fraction(isqrt(n * scale * scale), scale)


def sqrt_upper_frac(q: Fraction, scale: int = 10**8) -> Fraction:
    """A rational upper bound on sqrt(q) for a nonnegative rational q."""
    if q < 0:
        raise ValueError("negative radicand")
    # sqrt(n/d) = sqrt(n*d)/d
    n, d = q.numerator, q.denominator
    return Fraction(isqrt(n * d * scale * scale) + 1, d * scale)
