from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracdiv.divisors import sieve_tau_k
from fracdiv.errors import ResourceError
from fracdiv.fracsum import (
    NAIVE_LIMIT,
    block_sum,
    cutoff_points,
    decomposition_check,
    error_scan,
    fit_slope,
    fracsum_blocks,
    fracsum_naive,
    main_constant,
    quotient_block_arrays,
    quotient_blocks,
    summatory_premise,
    tail_bound,
    truncation_for,
)
from oracles import fracsum_brute, to_mpf, zeta_constant


def test_naive_examples():
    assert fracsum_naive(2, 10) == fracsum_brute(2, 10) == 17
    assert fracsum_naive(3, 1) == 1
    # tau(4) + tau(2) + tau(1) + tau(1)
    assert fracsum_naive(2, 4) == fracsum_brute(2, 4) == 3 + 2 + 1 + 1


def test_naive_matches_brute_force():
    for k in range(1, 5):
        for x in range(1, 150):
            assert fracsum_naive(k, x) == fracsum_brute(k, x)


def test_naive_guard():
    with pytest.raises(ResourceError, match="fracsum_blocks"):
        fracsum_naive(2, NAIVE_LIMIT + 1)
    with pytest.raises(ValueError):
        fracsum_naive(2, 0)


def test_quotient_block_examples():
    blocks = quotient_blocks(10)
    assert [(b.q, b.count) for b in blocks] == [(10, 1), (5, 1), (3, 1), (2, 2), (1, 5)]
    one = quotient_blocks(1)
    assert [(b.q, b.n_lo, b.n_hi, b.count) for b in one] == [(1, 1, 1, 1)]
    twelve = quotient_blocks(12)
    assert len(twelve) == 6 and sum(b.count for b in twelve) == 12


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**9))
def test_blocks_partition_range(x):
    q, lo, hi = quotient_block_arrays(x)
    assert lo[0] == 1 and hi[-1] == x
    assert np.all(lo[1:] == hi[:-1] + 1)
    assert np.all(np.diff(q) < 0)
    assert np.all(x // lo == q) and np.all(x // hi == q)
    # maximality: the neighbours outside a block have another quotient
    assert np.all(x // (hi[:-1] + 1) != q[:-1])
    assert q.size <= 2 * int(x**0.5) + 1


def test_blocks_exhaustive_small():
    for x in range(1, 500):
        blocks = quotient_blocks(x)
        expanded = [b.q for b in blocks for _ in range(b.count)]
        assert expanded == [x // n for n in range(1, x + 1)]


def test_blocks_examples():
    assert fracsum_blocks(2, 10) == 17
    assert fracsum_blocks(4, 1) == 1
    assert fracsum_blocks(2, 10**6) == fracsum_naive(2, 10**6)


def test_block_evaluation_count():
    for x in (1, 2, 10, 12345, 10**6, 10**8 + 7):
        bs = block_sum(2, x)
        assert bs.evaluations == len(quotient_blocks(x)) <= 2 * x**0.5 + 1


def test_main_constant_k1_telescopes():
    for N in (1, 10, 1000):
        c = main_constant(1, truncation_N=N)
        exact = 1 - Fraction(1, N + 1)
        # value is a 160-bit truncation of the exact partial sum
        assert c.value <= exact <= c.value + Fraction(N + 1, 2**160)
        assert c.value + c.tail_bound >= 1


def test_main_constant_first_term():
    assert main_constant(2, truncation_N=1).value == Fraction(1, 2)


def test_main_constant_is_lower_end_of_enclosure():
    # the truncated sum at small N, done in exact rationals
    tab = sieve_tau_k(3, 200)
    exact = sum(Fraction(int(tab[n]), n * (n + 1)) for n in range(1, 201))
    c = main_constant(3, truncation_N=200, table=tab)
    assert c.value <= exact <= c.value + Fraction(201, 2**160)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_zeta_constant_inside_enclosure(k):
    c = main_constant(k, truncation_N=10**5)
    z = zeta_constant(k)
    assert to_mpf(c.value) <= z <= to_mpf(c.value + c.tail_bound)


def test_main_constant_target_tail():
    c = main_constant(2, 1e-4)
    assert c.tail_bound <= Fraction(1e-4)
    assert tail_bound(2, c.truncation_N - 1) > Fraction(1e-4)
    c2 = main_constant(2, truncation_N=2 * c.truncation_N)
    assert 0 <= c2.value - c.value <= c.tail_bound


def test_main_constant_budget_error():
    with pytest.raises(ResourceError):
        main_constant(3, 1e-12, budget=10**5)


def test_truncation_monotone():
    Ns = [truncation_for(2, t) for t in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert Ns == sorted(Ns) and len(set(Ns)) == 4


def test_tail_bound_decreases():
    for k in (1, 2, 5):
        b = [tail_bound(k, N) for N in (10, 100, 1000, 10**4)]
        assert all(u > v for u, v in zip(b, b[1:]))


def test_summatory_premise_small():
    for k in range(1, 6):
        ok, _, ratio = summatory_premise(sieve_tau_k(k, 10**4))
        assert ok and ratio <= 1


def test_decomposition_examples():
    r = decomposition_check(2, 100, 9)
    assert r.equal and r.lhs == fracsum_brute(2, 100) - sum(
        int(sieve_tau_k(2, 100)[100 // n]) for n in range(1, 10)
    )
    r = decomposition_check(2, 10, 9)
    assert r.lhs == 1 and r.rhs == 1
    r = decomposition_check(3, 2, 1)
    assert r.lhs == 1 and r.equal


def test_decomposition_parts_add_up():
    r = decomposition_check(4, 997, 26)
    assert r.main_part + r.psi_part == r.rhs == r.lhs
    assert r.psi_part != 0


def test_decomposition_errors():
    with pytest.raises(ValueError):
        decomposition_check(2, 10, 10)
    with pytest.raises(ValueError):
        decomposition_check(2, 10, 0)
    with pytest.raises(ResourceError):
        decomposition_check(2, 10**6, 10)


def test_cutoff_points():
    assert cutoff_points(2) == [1]
    assert cutoff_points(2000) == [1, 36, 1000]
    assert cutoff_points(1) == []


def test_error_scan_small_example():
    c = main_constant(2, truncation_N=10**6)
    scan = error_scan(2, [10], constant=c)
    s = scan.samples[0]
    assert s.S == 17 and s.E == 17 - 10 * c.value


def test_error_scan_k1():
    scan = error_scan(1, [100], precision=1e-6)
    s = scan.samples[0]
    assert s.S == 100
    c = scan.constant
    assert 0 < s.E <= c.tail_bound * 100
    assert abs(float(c.value) - 1) <= float(c.tail_bound)


def test_error_scan_validation():
    with pytest.raises(ValueError):
        error_scan(2, [], precision=1e-3)
    with pytest.raises(ValueError):
        error_scan(2, [100, 10], precision=1e-3)


def test_error_scan_workers_same_values():
    c = main_constant(2, truncation_N=10**4)
    xs = [10**3, 10**4, 10**5]
    one = error_scan(2, xs, constant=c, workers=1)
    two = error_scan(2, xs, constant=c, workers=2)
    assert [s.S for s in one.samples] == [s.S for s in two.samples]
    assert one.slope == two.slope


def test_fit_slope_on_synthetic_power_law():
    class _S:
        def __init__(self, x, E):
            self.x, self.E = x, E

    pts = [_S(10**j, Fraction(3 * 10 ** (j // 2))) for j in (2, 4, 6, 8)]
    slope, icpt, _ = fit_slope(pts)
    assert slope == pytest.approx(0.5)
    assert np.exp(icpt) == pytest.approx(3)
    assert fit_slope([_S(10, Fraction(0))]) == (None, None, None)

