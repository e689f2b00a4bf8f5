"""Brute-force reference implementations, deliberately naive."""

from fractions import Fraction
from functools import lru_cache

import mpmath


@lru_cache(maxsize=None)
def ordered_tuples(k: int, n: int) -> int:
    """Number of ordered k-tuples of positive integers with product n."""
    if k == 1:
        return 1
    return sum(ordered_tuples(k - 1, n // d) for d in range(1, n + 1) if n % d == 0)


def trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1 if d == 2 else 2
    return True


def fracsum_brute(k: int, x: int) -> int:
    return sum(ordered_tuples(k, x // n) for n in range(1, x + 1))


def zeta_constant(k: int, dps: int = 40):
    """C_k = 1/2 + sum_{j>=2} (-1)^j (zeta(j)^k - 1), from 1/(n(n+1)) = sum_j (-1)^j n^-j."""
    with mpmath.workdps(dps):
        if k == 1:
            return mpmath.mpf(1)
        total = mpmath.mpf(1) / 2
        j = 2
        while True:
            term = mpmath.zeta(j) ** k - 1
            total += term if j % 2 == 0 else -term
            if term < mpmath.mpf(10) ** (-dps - 5):
                break
            j += 1
        return total


def to_mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator
