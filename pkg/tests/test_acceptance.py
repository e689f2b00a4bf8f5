"""Acceptance suite: one test per criterion, tolerances pinned.

Each test records a PASS/FAIL line through the ``criterion`` fixture; the
lines are printed in the "acceptance criteria" section of the terminal
summary.
"""

import time
import timeit
from fractions import Fraction as F

import numpy as np
import pytest

from fracdiv.divisors import sieve_tau_k
from fracdiv.exppair import BOMBIERI_IWANIEC, HALF_HALF, ExponentPair, apply_word, case_ledger, lwy_theta, theta
from fracdiv.fracsum import (
    block_sum,
    cutoff_points,
    decomposition_check,
    error_scan,
    fracsum_blocks,
    fracsum_naive,
    main_constant,
    summatory_premise,
)
from fracdiv.vaaler import random_triple_spec, triple_sum_eval, vaaler_gap_scan

pytestmark = pytest.mark.acceptance


def test_c01_exponent_pair_reproduction(criterion):
    with criterion(1, "exponent-pair reproduction BA^5(13/84, 55/84)") as c:
        res = apply_word("BAAAAA", BOMBIERI_IWANIEC)
        assert (res.kappa, res.lam) == (F(1653, 3494), F(1760, 3494))
        th = theta(res)
        assert th < F(9, 19)
        per_call = min(timeit.repeat(lambda: apply_word("BAAAAA", BOMBIERI_IWANIEC), number=100, repeat=5)) / 100
        c.note(f"theta={th}; {per_call * 1e6:.1f} us/call")
        assert per_call < 1e-3


def test_c02_theta_identities(criterion):
    with criterion(2, "theta identities") as c:
        assert theta(HALF_HALF) == F(9, 19)
        assert theta(ExponentPair(F(0), F(1, 2))) == F(7, 15)
        assert lwy_theta(2) == F(9, 19)
        for k in range(3, 11):
            assert lwy_theta(k) > F(9, 19)
        c.note("exact")


def test_c03_case_ledger(criterion):
    with criterion(3, "case ledger at nu_N = 9/19") as c:
        rep = case_ledger(F(9, 19))
        assert rep.case("I").maximum == F(77, 171)
        assert rep.overall == F(9, 19)
        c.note(f"case I {rep.case('I').maximum}, overall {rep.overall}")


def test_c04_oracle_equivalence(criterion):
    with criterion(4, "fracsum_blocks == fracsum_naive") as c:
        t0 = time.perf_counter()
        limit = 2 * 10**4
        for k in range(1, 6):
            tab = sieve_tau_k(k, limit)
            for x in range(1, limit + 1):
                assert fracsum_blocks(k, x) == fracsum_naive(k, x, tab), (k, x)
        rng = np.random.default_rng(19)
        xs = sorted(int(v) for v in rng.integers(1, 10**7 + 1, 50))
        for k in range(1, 6):
            tab = sieve_tau_k(k, xs[-1])
            for x in xs:
                assert fracsum_blocks(k, x) == fracsum_naive(k, x, tab), (k, x)
            del tab
        elapsed = time.perf_counter() - t0
        c.note(f"{5 * limit} exhaustive + 250 random cases in {elapsed:.0f} s")
        assert elapsed < 300


def test_c05_decomposition_identity(criterion):
    with criterion(5, "decomposition identity, x <= 2000") as c:
        t0 = time.perf_counter()
        checks = 0
        for k in (2, 3):
            tab = sieve_tau_k(k, 2000)
            for x in range(2, 2001):
                Ns = cutoff_points(x)
                assert Ns == sorted({1, int(x ** (9 / 19) + 1e-9), x // 2} & set(range(1, x)))
                for N in Ns:
                    r = decomposition_check(k, x, N, tab)
                    assert r.equal, (k, x, N)
                    checks += 1
        elapsed = time.perf_counter() - t0
        c.note(f"{checks} exact checks for k=2,3 in {elapsed:.1f} s")
        assert elapsed < 120


def test_c06_vaaler_inequality(criterion):
    with criterion(6, "Vaaler inequality on 1e4-point grids") as c:
        t0 = time.perf_counter()
        worst = []
        for H in (1, 4, 10, 100):
            s = vaaler_gap_scan(H, 10**4)
            assert all(float(v) in s.x for v in range(-1, 3))
            assert s.max_violation <= 1e-9, (H, s.max_violation, s.argmax)
            assert s.min_delta >= -1e-12, (H, s.min_delta)
            worst.append(f"H={H}:{s.max_violation:.1e}")
        elapsed = time.perf_counter() - t0
        c.note(", ".join(worst) + f"; {elapsed:.2f} s")
        assert elapsed < 30


def test_c07_main_constant_stability(criterion):
    with criterion(7, "main-constant stability and summatory premise") as c:
        diffs = []
        for k in (2, 3):
            for N in (10**4, 10**5):
                a = main_constant(k, truncation_N=N)
                b = main_constant(k, truncation_N=2 * N)
                d = abs(b.value - a.value)
                assert d <= a.tail_bound, (k, N)
                diffs.append(f"k={k},N={N}:{float(d):.2e}<={float(a.tail_bound):.2e}")
        for k in range(1, 6):
            ok, t, ratio = summatory_premise(sieve_tau_k(k, 10**6))
            assert ok, (k, t, ratio)
        c.note("; ".join(diffs))


def test_c08_error_scan(criterion):
    with criterion(8, "error-term scan for k=2, x = 1e4..1e7") as c:
        t0 = time.perf_counter()
        scan = error_scan(2, [10**4, 10**5, 10**6, 10**7], precision=1e-5)
        rel = [abs(s.E) / s.x for s in scan.samples]
        assert all(u > v for u, v in zip(rel, rel[1:])), rel
        assert rel[-1] <= F(1, 100)
        assert scan.slope is not None
        elapsed = time.perf_counter() - t0
        c.note(f"slope={scan.slope:.4f}; |S/x-C| at 1e7 = {float(rel[-1]):.2e}; {elapsed:.0f} s")
        assert scan.slope <= 0.55
        assert elapsed < 600


def test_c09_degenerate_order(criterion):
    with criterion(9, "k=1: S(x) = x, E(x) within the tail") as c:
        xs = [1, 2, 10, 97, 10**3, 10**5, 10**7, 10**10]
        const = main_constant(1, truncation_N=10**5)
        scan = error_scan(1, xs, constant=const)
        for s in scan.samples:
            assert s.S == s.x
            # C_1 = 1 exactly, so E = x (1 - value) is nonnegative and below the tail
            assert 0 <= s.E <= const.tail_bound * s.x
        c.note(f"{len(xs)} values of x")


def test_c10_performance(criterion):
    with criterion(10, "fracsum_blocks at x = 1e10") as c:
        x = 10**10
        parts = []
        for k in (2, 3):
            t0 = time.perf_counter()
            bs = block_sum(k, x)
            elapsed = time.perf_counter() - t0
            assert bs.evaluations <= 2 * 10**5 + 1
            assert elapsed < 60
            parts.append(f"k={k}: {elapsed:.2f} s, {bs.evaluations} evaluations")
        c.note("; ".join(parts))


def test_c11_triple_sum_sanity(criterion):
    with criterion(11, "triple sum |S| <= HMN on 50 random specs") as c:
        rng = np.random.default_rng(11)
        ratios = []
        for _ in range(50):
            spec = random_triple_spec(rng)
            res = triple_sum_eval(spec)
            assert res.magnitude <= spec.terms * (1 + 1e-9)
            ratios.append(res.ratio)
        c.note(f"ratio min {min(ratios):.3g}, median {np.median(ratios):.3g}, max {max(ratios):.3g}")
