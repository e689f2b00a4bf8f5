"""Fractional divisor sums S_k(x) = sum_{n <= x} tau_k(floor(x / n)).

Two exact evaluators are kept side by side so each can serve as the other's
oracle: a direct O(x) pass over n using a sieved table, and an O(sqrt x)
pass over quotient blocks using point evaluation of tau_k.

The main-term constant C_k = sum tau_k(n) / (n (n + 1)) is returned as an
exact dyadic rational together with a rigorous upper bound on what the
truncation leaves out, and ``error_scan`` measures E(x) = S_k(x) - C_k x.
"""

from __future__ import annotations

import math
import operator
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

import numpy as np
from mpmath import iv

from .divisors import DivisorTable, cached_sieve, iroot, sieve_tau_k, tau_k_batch
from .errors import InvariantViolation, ResourceError
from .vaaler import psi

NAIVE_LIMIT = 10**8
CONSTANT_BUDGET = 5 * 10**7
DECOMPOSITION_LIMIT = 10**5

# fixed-point width for the truncated constant; per-term truncation < 2^-FP_BITS
FP_BITS = 160


# ---------------------------------------------------------------------------
# quotient blocks


@dataclass(frozen=True)
class QuotientBlock:
    q: int
    n_lo: int
    n_hi: int
    count: int

    def __post_init__(self):
        if self.count != self.n_hi - self.n_lo + 1 or self.count < 1:
            raise InvariantViolation(f"inconsistent block {self}")


def quotient_block_arrays(x: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays (q, n_lo, n_hi) of the maximal blocks of n with floor(x/n) = q.

    Blocks are ordered by increasing n, hence strictly decreasing q.
    """
    x = int(x)
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if x >= 2**62:
        raise ValueError("x too large for int64 block arithmetic")
    s = isqrt(x)
    r = np.arange(1, s + 1, dtype=np.int64)
    cand = np.unique(np.concatenate([x // r, r]))[::-1]
    n_hi = x // cand
    n_lo = x // (cand + 1) + 1
    keep = n_hi >= n_lo
    return cand[keep], n_lo[keep], n_hi[keep]


def quotient_blocks(x: int) -> list[QuotientBlock]:
    q, lo, hi = quotient_block_arrays(x)
    return [QuotientBlock(a, b, c, c - b + 1) for a, b, c in zip(q.tolist(), lo.tolist(), hi.tolist())]


# ---------------------------------------------------------------------------
# the two evaluators


def _table_for(k: int, x: int, table: DivisorTable | None) -> DivisorTable:
    if table is None:
        return sieve_tau_k(k, x)
    if table.k != k or table.limit < x:
        raise ValueError(f"table (k={table.k}, limit={table.limit}) cannot serve k={k}, x={x}")
    return table


def fracsum_naive(k: int, x: int, table: DivisorTable | None = None) -> int:
    """sum over n = 1..x of tau_k(x // n), one term per n."""
    x = int(x)
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    if x > NAIVE_LIMIT:
        raise ResourceError(f"x={x} is beyond the O(x) guard {NAIVE_LIMIT}; use fracsum_blocks")
    vals = _table_for(k, x, table).values
    total = 0
    step = 1 << 22
    for start in range(1, x + 1, step):
        n = np.arange(start, min(x, start + step - 1) + 1, dtype=np.int64)
        chunk = vals[x // n]
        if float(chunk.max()) * chunk.size < 2.0**63:
            total += int(chunk.sum(dtype=np.uint64))
        else:
            total += sum(chunk.tolist())
    return total


@dataclass(frozen=True)
class BlockSum:
    value: int
    evaluations: int
    blocks: int


def block_sum(k: int, x: int) -> BlockSum:
    """S_k(x) from the quotient blocks, with tau_k evaluated once per block."""
    q, lo, hi = quotient_block_arrays(x)
    tau = tau_k_batch(k, q)
    value = sum(map(operator.mul, tau.tolist(), (hi - lo + 1).tolist()))
    return BlockSum(value, int(q.size), int(q.size))


def fracsum_blocks(k: int, x: int) -> int:
    return block_sum(k, x).value


# ---------------------------------------------------------------------------
# main-term constant


def summatory_premise(table: DivisorTable, upto: int | None = None) -> tuple[bool, int, float]:
    """Check sum_{n<=t} tau_k(n) <= t (1 + ln t)^(k-1) for every t <= upto.

    Returns (holds, worst t, worst ratio lhs / rhs).
    """
    upto = table.limit if upto is None else int(upto)
    cum = np.cumsum(table.values[1 : upto + 1], dtype=np.uint64).astype(np.float64)
    t = np.arange(1, upto + 1, dtype=np.float64)
    bound = t * (1.0 + np.log(t)) ** (table.k - 1)
    ratio = cum / bound
    i = int(np.argmax(ratio))
    return bool(np.all(cum <= bound)), i + 1, float(ratio[i])


def tail_bound(k: int, N: int) -> Fraction:
    """Rigorous upper bound for sum_{n > N} tau_k(n) / (n (n + 1)).

    Partial summation against T(t) = t (1 + ln t)^(k-1) gives
    T(N) / (N (N+1)) + 2 * I_{k-1}(N), where I_m(N) = int_N^oo (1 + ln t)^m t^-2 dt
    satisfies I_m = (1 + ln N)^m / N + m I_{m-1}, I_0 = 1/N.  Interval
    arithmetic keeps the result an upper bound; the fixed-point rounding of
    the truncated sum (< (N + 1) 2^-FP_BITS) is added on top.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    m = k - 1
    saved = iv.prec
    iv.prec = 200
    try:
        L = 1 + iv.log(iv.mpf(N))
        integral = iv.mpf(1) / N
        for j in range(1, m + 1):
            integral = L**j / N + j * integral
        total = L**m / (iv.mpf(N) * (N + 1)) + 2 * integral
        sign, man, exp, _ = total._mpi_[1]
    finally:
        iv.prec = saved
    upper = Fraction((-1) ** sign * int(man)) * Fraction(2) ** int(exp)
    return upper + Fraction(N + 1, 1 << FP_BITS)


def _fixed_point_sum(tau: np.ndarray) -> int:
    """floor-ish sum of tau[n] / (n (n + 1)) for n = 1..len(tau), scaled by 2^FP_BITS.

    Each term is truncated (never rounded up), so the true sum lies in
    [L, L + len(tau) + 1] / 2^FP_BITS.  Long division runs column-wise with a
    digit width chosen so rem * base stays inside int64.
    """
    N = tau.size
    if N and int(tau.max()) >= 2**62:
        raise ResourceError("tau values too large for int64 long division")
    den_bits = (N * (N + 1)).bit_length()
    digit = 62 - den_bits
    if digit < 4:
        raise ResourceError(f"truncation N={N} too large for int64 long division")
    steps = -(-FP_BITS // digit)
    base = np.int64(1 << digit)
    whole = 0
    acc = [0] * steps
    chunk = 1 << 21
    for start in range(0, N, chunk):
        n = np.arange(start + 1, min(N, start + chunk) + 1, dtype=np.int64)
        den = n * (n + 1)
        t = tau[start : start + n.size].astype(np.int64)
        whole += int((t // den).sum())
        rem = t % den
        for j in range(steps):
            rem *= base
            d = rem // den
            rem -= d * den
            acc[j] += int(d.sum())
    scaled = whole << (steps * digit)
    for j, a in enumerate(acc):
        scaled += a << ((steps - 1 - j) * digit)
    # rescale to FP_BITS, truncating
    return scaled >> (steps * digit - FP_BITS)


@dataclass(frozen=True)
class MainConstant:
    """Truncated constant with an exact enclosure [value, value + tail_bound]."""

    k: int
    truncation_N: int
    value: Fraction = field(repr=False)
    tail_bound: Fraction = field(repr=False)

    def decimal(self, digits: int = 30) -> str:
        return frac_to_str(self.value, digits)

    def __repr__(self):
        return (
            f"MainConstant(k={self.k}, truncation_N={self.truncation_N}, "
            f"value={self.decimal(30)}, tail_bound={float(self.tail_bound):.3e})"
        )


def frac_to_str(q: Fraction, digits: int) -> str:
    """Decimal string of a rational with ``digits`` significant digits."""
    from decimal import Context, Decimal

    ctx = Context(prec=digits)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    return format(d, "f") if abs(d.adjusted()) < 6 else format(d, "e")


def truncation_for(k: int, target_tail: float, budget: int = CONSTANT_BUDGET) -> int:
    """Smallest power-of-two-bracketed N with tail_bound(k, N) <= target_tail."""
    if not target_tail > 0:
        raise ValueError("target_tail must be positive")
    target = Fraction(target_tail)
    hi = 1
    while tail_bound(k, hi) > target:
        hi *= 2
        if hi > 4 * budget:
            break
    lo = max(1, hi // 2)
    if tail_bound(k, lo) <= target:
        return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(k, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def main_constant(
    k: int,
    target_tail: float | None = None,
    *,
    truncation_N: int | None = None,
    budget: int = CONSTANT_BUDGET,
    table: DivisorTable | None = None,
    cache_dir=None,
    check_premise: bool = True,
) -> MainConstant:
    """C_k truncated at N, where N is either given or picked from ``target_tail``.

    Before the tail bound is trusted the summatory premise it rests on is
    checked against the same sieved table for every t <= N.
    """
    if truncation_N is None:
        if target_tail is None:
            raise ValueError("give target_tail or truncation_N")
        N = truncation_for(k, target_tail, budget)
    else:
        N = int(truncation_N)
        if N < 1:
            raise ValueError("truncation_N must be >= 1")
    if N > budget:
        raise ResourceError(f"truncation N={N} exceeds the sieve budget {budget}")
    if table is None:
        table = cached_sieve(k, N, cache_dir)
    elif table.k != k or table.limit < N:
        raise ValueError("supplied table does not cover the truncation")
    if check_premise:
        ok, t, ratio = summatory_premise(table, N)
        if not ok:
            raise InvariantViolation(f"summatory premise fails at t={t} (ratio {ratio})")
    scaled = _fixed_point_sum(table.values[1 : N + 1])
    return MainConstant(k, N, Fraction(scaled, 1 << FP_BITS), tail_bound(k, N))


# ---------------------------------------------------------------------------
# decomposition identity


@dataclass(frozen=True)
class DecompositionReport:
    k: int
    x: int
    N: int
    lhs: int
    rhs: Fraction
    main_part: Fraction
    psi_part: Fraction

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def decomposition_check(k: int, x: int, N: int, table: DivisorTable | None = None) -> DecompositionReport:
    """Compare sum_{N < n <= x} tau_k(x // n) with its regrouping by d = x // n.

    For each quotient d of some n in (N, x] the count of such n is written as
    b - a - psi(b) + psi(a) with b = x/d and a = max(x/(d+1), N), all in exact
    rationals.  Clipping a at N makes the identity exact at the lower end.
    """
    x, N = int(x), int(N)
    if not 1 <= N < x:
        raise ValueError(f"need 1 <= N < x, got N={N}, x={x}")
    if x > DECOMPOSITION_LIMIT:
        raise ResourceError(f"x={x} exceeds the exact-rational limit {DECOMPOSITION_LIMIT}")
    vals = _table_for(k, x, table).values
    n = np.arange(N + 1, x + 1, dtype=np.int64)
    lhs = int(vals[x // n].sum(dtype=np.uint64)) if n.size else 0

    q, _, hi = quotient_block_arrays(x)
    main = Fraction(0)
    osc = Fraction(0)
    Nf = Fraction(N)
    for d in q[hi > N].tolist():
        b = Fraction(x, d)
        a = max(Fraction(x, d + 1), Nf)
        t = int(vals[d])
        main += t * (b - a)
        osc += t * (psi(a) - psi(b))
    return DecompositionReport(k, x, N, lhs, main + osc, main, osc)


def cutoff_points(x: int) -> list[int]:
    """The cutoffs {1, floor(x^(9/19)), floor(x/2)} that are valid (1 <= N < x)."""
    cands = {1, iroot(x**9, 19), x // 2}
    return sorted(c for c in cands if 1 <= c < x)


# ---------------------------------------------------------------------------
# error-term scan


@dataclass(frozen=True)
class ErrorSample:
    x: int
    S: int
    C: Fraction = field(repr=False)
    E: Fraction = field(repr=False)
    elapsed: float
    resolved: bool

    @property
    def is_zero(self) -> bool:
        return self.E == 0

    @property
    def flag(self) -> str:
        if self.is_zero:
            return "zero"
        return "" if self.resolved else "unresolved"


@dataclass(frozen=True)
class ErrorScan:
    k: int
    constant: MainConstant
    samples: tuple[ErrorSample, ...]
    slope: float | None
    intercept: float | None
    max_log_ratio: float | None

    @property
    def excluded(self) -> list[int]:
        return [s.x for s in self.samples if s.is_zero]


def _scan_one(args):
    k, x = args
    t0 = time.perf_counter()
    S = fracsum_blocks(k, x)
    return S, time.perf_counter() - t0


def _make_sample(x: int, S: int, elapsed: float, const: MainConstant) -> ErrorSample:
    E = S - const.value * x
    resolved = E != 0 and const.tail_bound * x < abs(E) / 10
    return ErrorSample(x, S, const.value, E, elapsed, resolved)


def fit_slope(samples) -> tuple[float | None, float | None, float | None]:
    """OLS slope/intercept of log|E| on log x, plus max log|E| / log x.

    Samples with E = 0 are skipped.  Natural logs.
    """
    pts = [(math.log(s.x), math.log(abs(float(s.E)))) for s in samples if s.E != 0 and s.x > 1]
    if not pts:
        return None, None, None
    ratio = max(ly / lx for lx, ly in pts)
    if len(pts) < 2:
        return None, None, ratio
    lx = np.array([p[0] for p in pts])
    ly = np.array([p[1] for p in pts])
    xm, ym = lx.mean(), ly.mean()
    sxx = float(((lx - xm) ** 2).sum())
    if sxx == 0:
        return None, None, ratio
    slope = float(((lx - xm) * (ly - ym)).sum()) / sxx
    return slope, float(ym - slope * xm), ratio


def error_scan(
    k: int,
    xs,
    precision: float = 1e-6,
    *,
    constant: MainConstant | None = None,
    workers: int = 1,
    cache_dir=None,
    budget: int = CONSTANT_BUDGET,
) -> ErrorScan:
    """Measure E(x) = S_k(x) - C_k x for each x in ``xs``.

    ``precision`` is the target tail for C_k.  Samples whose uncertainty
    tail_bound * x is not below |E| / 10 are flagged unresolved but kept in
    the fit; E = 0 samples are excluded from it.  With ``workers > 1`` the
    S_k(x) evaluations run in a process pool; output order follows ``xs``.
    """
    xs = [int(v) for v in xs]
    if not xs:
        raise ValueError("xs must be nonempty")
    if any(v < 1 for v in xs) or xs != sorted(xs):
        raise ValueError("xs must be positive and ascending")
    if constant is None:
        constant = main_constant(k, precision, budget=budget, cache_dir=cache_dir)
    elif constant.k != k:
        raise ValueError("constant is for a different k")
    jobs = [(k, x) for x in xs]
    if workers > 1 and len(xs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_one, jobs))
    else:
        results = [_scan_one(j) for j in jobs]
    samples = tuple(_make_sample(x, S, dt, constant) for x, (S, dt) in zip(xs, results))
    slope, icpt, ratio = fit_slope(samples)
    return ErrorScan(k, constant, samples, slope, icpt, ratio)
