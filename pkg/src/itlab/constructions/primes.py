"""Deterministic primality and prime search in arithmetic progressions."""

from __future__ import annotations

from math import gcd

# Witness set that makes Miller-Rabin deterministic for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
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


def find_prime_in_ap(x: int, a: int, q: int, cap: int = 10**7) -> int:
    """Smallest prime p >= x with p = a (mod q).

    Scans at most ``cap`` candidates of the progression.
    """
    if q < 1:
        raise ValueError(f"modulus must be positive, got q={q}")
    if x < 2:
        raise ValueError(f"search start must be >= 2, got x={x}")
    if gcd(a, q) != 1:
        raise ValueError(f"gcd(a, q) must be 1, got gcd({a}, {q}) = {gcd(a, q)}")
    p = x + ((a - x) % q)
    for _ in range(cap):
        if is_prime(p):
            return p
        p += q
    raise RuntimeError(f"no prime = {a} mod {q} among {cap} candidates from {x}")
