"""The k-fold divisor function tau_k.

Two routes are provided and are kept independent of each other:

* ``sieve_tau_k`` builds a table for every n up to a limit by repeated
  Dirichlet convolution with the constant function 1.
* ``tau_k_at`` / ``tau_k_batch`` evaluate single arguments from the prime
  factorisation, using tau_k(p^a) = C(a + k - 1, k - 1).

All counts are unsigned 64-bit.  Anything that would not fit raises
``OverflowError`` instead of wrapping.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, gcd, isqrt
from pathlib import Path

import numpy as np

U64_MAX = 2**64 - 1

# (bound, bases): Miller-Rabin with these bases is exact for n < bound.
_MR_TIERS = (
    (2047, (2,)),
    (1373653, (2, 3)),
    (25326001, (2, 3, 5)),
    (3215031751, (2, 3, 5, 7)),
    (2152302898747, (2, 3, 5, 7, 11)),
    (3474749660383, (2, 3, 5, 7, 11, 13)),
    (341550071728321, (2, 3, 5, 7, 11, 13, 17)),
    (3825123056546413051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318665857834031151167461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3317044064679887385961981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
)
_SMALL_PRIMES = _MR_TIERS[-1][1]
# column-wise trial division is cheap up to here, Miller-Rabin beyond
_BATCH_TRIAL_CAP = 4096


def iroot(n: int, r: int) -> int:
    """Largest integer m with m**r <= n."""
    if n < 0 or r < 1:
        raise ValueError("iroot needs n >= 0 and r >= 1")
    if n < 2 or r == 1:
        return n
    m = int(round(n ** (1.0 / r)))
    while m**r > n:
        m -= 1
    while (m + 1) ** r <= n:
        m += 1
    return m


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (plain Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, isqrt(n) + 1, 2):
        if sieve[i]:
            sieve[i * i :: 2 * i] = False
    return np.flatnonzero(sieve).astype(np.int64)


@lru_cache(maxsize=8)
def _prime_list(bound: int) -> tuple[int, ...]:
    return tuple(primes_upto(bound).tolist())


def _primes_for(n: int) -> tuple[int, ...]:
    # round the bound up to a power of two so the cache stays small
    need = iroot(n, 3) + 2
    return _prime_list(max(1024, 1 << (need - 1).bit_length()))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test for n < 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    for bound, bases in _MR_TIERS:
        if n < bound:
            break
    else:
        raise ValueError(f"is_prime is only deterministic below 3.3e24, got {n}")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        y = pow(a, d, n)
        if y == 1 or y == n - 1:
            continue
        for _ in range(s - 1):
            y = y * y % n
            if y == n - 1:
                break
        else:
            return False
    return True


def _check_n(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if n > U64_MAX:
        raise ValueError(f"n={n} exceeds the supported 64-bit range")
    return n


def _check_k(k: int) -> int:
    k = int(k)
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k}")
    return k


# ---------------------------------------------------------------------------
# factorisation


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        prod = 1
        last = 0
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"factors of {self.n} not sorted/positive: {self.factors}")
            if not is_prime(p):
                raise ValueError(f"{p} listed as a prime factor of {self.n} is composite")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError(f"factors {self.factors} multiply to {prod}, not {self.n}")

    def tau_k(self, k: int) -> int:
        out = 1
        for _, e in self.factors:
            out *= comb(e + k - 1, k - 1)
        return out


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n."""
    rng = random.Random(n)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


def _trial_divide(n: int) -> tuple[list[tuple[int, int]], int, int]:
    """Strip small primes from n until p**3 exceeds the cofactor.

    Returns (prime powers found, cofactor, first untried prime).  The cofactor
    then has at most two prime factors, all >= the returned prime.
    """
    found = []
    m = n
    p = 2
    for p in _primes_for(n):
        if p * p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found.append((p, e))
    return found, m, p


def factorize(n: int) -> Factorization:
    n = _check_n(n)
    found, c, p = _trial_divide(n)
    if c > 1:
        if c < p * p or is_prime(c):
            found.append((c, 1))
        else:
            r = isqrt(c)
            if r * r == c:
                found.append((r, 2))
            else:
                a = _pollard_brent(c)
                found.extend(sorted([(a, 1), (c // a, 1)]))
    return Factorization(n, tuple(found))


# ---------------------------------------------------------------------------
# point evaluation


def _cofactor_tau(k: int, c: int, next_prime: int) -> int:
    """tau_k of a cofactor with < 3 prime factors, all >= next_prime."""
    if c == 1:
        return 1
    if c < next_prime * next_prime or is_prime(c):
        return k
    r = isqrt(c)
    if r * r == c:
        return k * (k + 1) // 2
    return k * k


def tau_k_at(k: int, n: int) -> int:
    """tau_k(n) for a single n < 2**64.

    Trial division runs only while p**3 <= remaining cofactor; what is left
    is 1, a prime, a prime square or a product of two distinct primes, and
    tau_k of each of those shapes is known without splitting it.

    >>> tau_k_at(3, 8)
    10
    """
    k = _check_k(k)
    n = _check_n(n)
    found, c, p = _trial_divide(n)
    out = _cofactor_tau(k, c, p)
    for _, e in found:
        out *= comb(e + k - 1, k - 1)
    if out > U64_MAX:
        raise OverflowError(f"tau_{k}({n}) = {out} exceeds 64 bits")
    return out


def _exponent_table(k: int) -> np.ndarray:
    vals = [comb(a + k - 1, k - 1) for a in range(65)]
    # 0 marks "does not fit"; a genuine factor is never 0
    return np.array([v if v <= U64_MAX else 0 for v in vals], dtype=np.uint64)


def tau_k_batch(k: int, ns) -> np.ndarray:
    """Vectorised tau_k over an array of arguments (each 1 <= n < 2**64).

    Same algorithm as ``tau_k_at`` but the trial division by every prime up
    to at least cbrt(max(ns)) is done column-wise with numpy.
    """
    k = _check_k(k)
    ns = np.asarray(ns)
    if ns.size == 0:
        return np.zeros(0, dtype=np.uint64)
    if ns.dtype.kind not in "iu":
        raise TypeError("tau_k_batch needs an integer array")
    if ns.dtype.kind == "i" and int(ns.min()) < 1:
        raise ValueError("tau_k_batch arguments must be >= 1")
    m = ns.astype(np.uint64)
    if int(m.min()) < 1:
        raise ValueError("tau_k_batch arguments must be >= 1")
    top = int(m.max())
    bound = max(iroot(top, 3), min(isqrt(top), _BATCH_TRIAL_CAP))
    table = _exponent_table(k)
    tau = np.ones(m.size, dtype=np.uint64)

    for p in primes_upto(bound).tolist():
        p = np.uint64(p)
        idx = np.flatnonzero(m % p == 0)
        if idx.size == 0:
            continue
        sub = m[idx]
        e = np.zeros(idx.size, dtype=np.int64)
        hit = np.ones(idx.size, dtype=bool)
        while hit.any():
            sub = np.where(hit, sub // p, sub)
            e += hit
            hit = sub % p == 0
        m[idx] = sub
        f = table[e]
        if not f.all():
            bad = int(ns[idx[np.flatnonzero(f == 0)[0]]])
            raise OverflowError(f"tau_{k}({bad}) exceeds 64 bits")
        old = tau[idx]
        new = old * f
        wrapped = new // f != old
        if wrapped.any():
            bad = int(ns[idx[np.flatnonzero(wrapped)[0]]])
            raise OverflowError(f"tau_{k}({bad}) exceeds 64 bits")
        tau[idx] = new

    # smallest prime not tried
    nxt = bound + 1
    while not is_prime(nxt):
        nxt += 1
    # cofactors below nxt**2 are 1 or prime; only the rest need Miller-Rabin
    mult = np.where(m == 1, np.uint64(1), np.uint64(k))
    hard = np.flatnonzero(m >= np.uint64(nxt) * np.uint64(nxt))
    for i, c in zip(hard.tolist(), m[hard].tolist()):
        mult[i] = _cofactor_tau(k, c, nxt)
    out = tau * mult
    wrapped = out // mult != tau
    if wrapped.any():
        bad = int(ns[np.flatnonzero(wrapped)[0]])
        raise OverflowError(f"tau_{k}({bad}) exceeds 64 bits")
    return out


# ---------------------------------------------------------------------------
# bulk sieve


@dataclass(frozen=True)
class DivisorTable:
    """tau_k(n) for 1 <= n <= limit; ``values[0]`` is an unused 0 slot."""

    k: int
    limit: int
    values: np.ndarray = field(repr=False)

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return self.limit


def _convolve_with_one(prev: np.ndarray, k: int, target: int) -> np.ndarray:
    """out[n] = sum of prev[d] over d | n, in O(sqrt(N)) numpy slice ops."""
    N = prev.size - 1
    s = isqrt(N)
    safe = float(prev.sum(dtype=np.float64)) < 2.0**63
    if safe:
        out = np.zeros_like(prev)
        src = prev
    else:
        # exact fallback; only reachable for huge k on small limits
        out = np.zeros(N + 1, dtype=object)
        src = prev.astype(object)
    for d in range(1, s + 1):
        out[d::d] += src[d]
    for m in range(1, N // (s + 1) + 1):
        hi = N // m
        out[m * (s + 1) : m * hi + 1 : m] += src[s + 1 : hi + 1]
    if not safe:
        over = np.flatnonzero(out > U64_MAX)
        if over.size:
            n = int(over[0])
            raise OverflowError(
                f"sieve of tau_{target} overflows at n={n}: tau_{k}({n}) = {out[n]} exceeds 64 bits"
            )
        out = out.astype(np.uint64)
    return out


def sieve_tau_k(k: int, limit: int) -> DivisorTable:
    """Table of tau_k(1..limit) via k-1 passes of divisor convolution."""
    k = _check_k(k)
    limit = int(limit)
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    vals = np.ones(limit + 1, dtype=np.uint64)
    vals[0] = 0
    for j in range(2, k + 1):
        vals = _convolve_with_one(vals, j, k)
    vals.flags.writeable = False
    return DivisorTable(k, limit, vals)


def divisor_summatory(table: DivisorTable, t: int) -> int:
    """Sum of tau_k(n) for n <= t, as an exact Python integer."""
    t = int(t)
    if not 1 <= t <= table.limit:
        raise ValueError(f"t={t} outside 1..{table.limit}")
    chunk = table.values[1 : t + 1]
    if float(chunk.max()) * t < 2.0**63:
        return int(chunk.sum(dtype=np.uint64))
    return sum(chunk.tolist())


# ---------------------------------------------------------------------------
# binary dump / load

_MAGIC = b"FDTAUK01"
_ENDIAN_TAG = 0x01020304
_HEADER = struct.Struct("<8sIQI")


def save_table(table: DivisorTable, path) -> Path:
    """Write magic, k, limit, endianness tag, then little-endian u64 values."""
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, table.k, table.limit, _ENDIAN_TAG))
        fh.write(table.values[1:].astype("<u8").tobytes())
    return path


def load_table(path) -> DivisorTable:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, k, limit, tag = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a divisor table (magic {magic!r})")
        if tag != _ENDIAN_TAG:
            raise ValueError(f"{path}: bad endianness tag {tag:#x}")
        body = np.frombuffer(fh.read(), dtype="<u8")
    if body.size != limit:
        raise ValueError(f"{path}: expected {limit} values, found {body.size}")
    vals = np.empty(limit + 1, dtype=np.uint64)
    vals[0] = 0
    vals[1:] = body
    vals.flags.writeable = False
    return DivisorTable(int(k), int(limit), vals)


def cached_sieve(k: int, limit: int, cache_dir=None) -> DivisorTable:
    """``sieve_tau_k`` backed by an optional on-disk cache directory.

    Any cached table for the same k with a limit at least as large is reused
    (sliced down); otherwise the table is built and stored.
    """
    if cache_dir is None:
        return sieve_tau_k(k, limit)
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    best = None
    for f in cache_dir.glob(f"tau{k}_*.bin"):
        try:
            lim = int(f.stem.split("_", 1)[1])
        except ValueError:
            continue
        if lim >= limit and (best is None or lim < best[0]):
            best = (lim, f)
    if best is not None:
        tab = load_table(best[1])
        if tab.k == k:
            vals = tab.values[: limit + 1]
            return DivisorTable(k, limit, vals)
    tab = sieve_tau_k(k, limit)
    save_table(tab, cache_dir / f"tau{k}_{limit}.bin")
    return tab


__all__ = [
    "U64_MAX",
    "DivisorTable",
    "Factorization",
    "cached_sieve",
    "divisor_summatory",
    "factorize",
    "iroot",
    "is_prime",
    "load_table",
    "primes_upto",
    "save_table",
    "sieve_tau_k",
    "tau_k_at",
    "tau_k_batch",
]

