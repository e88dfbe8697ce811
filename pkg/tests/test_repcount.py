import io

import numpy as np
import pytest

from waringlab import (BudgetError, CountsVector, DomainError, PseudoPolynomial,
                       counts_vector, floor_eval, rep_count_bruteforce,
                       rep_count_exact, unrepresentable)
from waringlab.ntt import PRIME_SET_A, PRIME_SET_B
from waringlab.repcount import RepTable


class TestCountsVector:
    def test_identity_map(self, fx):
        c = counts_vector(fx, 5)
        assert list(c.counts) == [0, 1, 1, 1, 1, 1]
        assert c.generator_range == 5

    def test_floor_histogram(self, f32):
        c = counts_vector(f32, 12)
        nonzero = {m: int(v) for m, v in enumerate(c.counts) if v}
        assert nonzero == {1: 1, 2: 1, 5: 1, 8: 1, 11: 1}

    def test_scaled(self):
        f = PseudoPolynomial.parse("2*x^3/2")
        c = counts_vector(f, 16)
        nonzero = {m: int(v) for m, v in enumerate(c.counts) if v}
        assert nonzero == {2: 1, 5: 1, 10: 1, 16: 1}

    def test_total_matches_enumeration(self, family):
        for f in family:
            if f.value_at_one() < 1:
                continue
            c = counts_vector(f, 400)
            expected = 0
            n = 1
            while True:
                v = floor_eval(f, n)
                if v <= 400:
                    expected += 1
                elif n > 50:
                    break
                n += 1
            assert c.total() == expected, str(f)

    def test_rejects_small_f1(self):
        f = PseudoPolynomial.parse("x^4/3 - 0.5*x")   # f(1) = 1/2
        with pytest.raises(DomainError):
            counts_vector(f, 100)

    def test_csv_roundtrip(self, f32, tmp_path):
        c = counts_vector(f32, 30)
        path = tmp_path / "counts.csv"
        c.to_csv(str(path))
        ms, cs = CountsVector.read_csv(str(path))
        assert list(ms) == list(range(31))
        assert np.array_equal(cs, c.counts)


class TestRepCountExact:
    def test_stars_and_bars(self, fx):
        c = counts_vector(fx, 10)
        t = rep_count_exact(c, 2, 10)
        # pairs of positive integers summing to N
        assert [int(t.values[N]) for N in range(2, 11)] == list(range(1, 10))
        assert int(t.values[4]) == 3

    def test_single_power(self, f32):
        c = counts_vector(f32, 12)
        t = rep_count_exact(c, 1, 12)
        assert int(t.values[8]) == 1
        assert int(t.values[3]) == 0

    def test_pairs(self, f32):
        c = counts_vector(f32, 12)
        t = rep_count_exact(c, 2, 12)
        assert int(t.values[10]) == 3  # (2,8), (8,2), (5,5)

    def test_zero_below_support(self, f32):
        c = counts_vector(f32, 50)
        t = rep_count_exact(c, 3, 50)
        low = 3 * floor_eval(f32, 1)
        assert all(int(t.values[N]) == 0 for N in range(low))

    def test_monotone_support(self, f32):
        c = counts_vector(f32, 60)
        f1 = floor_eval(f32, 1)
        t2 = rep_count_exact(c, 2, 60)
        t3 = rep_count_exact(c, 3, 60)
        for N in range(60 - f1):
            if int(t2.values[N]) > 0:
                assert int(t3.values[N + f1]) > 0

    def test_sum_inequality(self, f32):
        # sum_{N<=K} r_s(N) <= (sum_{m<=K} c_m)^s
        c = counts_vector(f32, 40)
        for s in (1, 2, 3):
            t = rep_count_exact(c, s, 40)
            assert int(t.values.sum()) <= c.total() ** s

    def test_disjoint_prime_sets_agree(self, f32):
        c = counts_vector(f32, 2000)
        ta = rep_count_exact(c, 3, 2000, primes=PRIME_SET_A)
        tb = rep_count_exact(c, 3, 2000, primes=PRIME_SET_B)
        assert set(p for p, _ in ta.primes).isdisjoint(p for p, _ in tb.primes)
        assert np.array_equal(ta.values, tb.values)

    def test_certificate_recorded(self, f32):
        c = counts_vector(f32, 100)
        t = rep_count_exact(c, 4, 100)
        assert t.primes == PRIME_SET_A
        assert t.entry_bound < np.prod([p for p, _ in t.primes], dtype=object)

    def test_csv_roundtrip(self, f32, tmp_path):
        c = counts_vector(f32, 30)
        t = rep_count_exact(c, 2, 30)
        buf = io.StringIO()
        t.to_csv(buf)
        buf.seek(0)
        ns, rs = RepTable.read_csv(buf)
        assert np.array_equal(rs, t.values)
        assert list(ns) == list(range(31))


class TestBruteForce:
    def test_compositions(self, fx):
        assert rep_count_bruteforce(fx, 3, 5) == 6

    def test_pairs(self, f32):
        assert rep_count_bruteforce(f32, 2, 10) == 3

    def test_two_squares(self):
        fsq = PseudoPolynomial.parse("x^2")
        assert rep_count_bruteforce(fsq, 2, 7) == 0
        assert rep_count_bruteforce(fsq, 2, 8) == 1   # (2,2)

    def test_budget_guard(self, fx):
        with pytest.raises(BudgetError):
            rep_count_bruteforce(fx, 5, 10)
        with pytest.raises(BudgetError):
            rep_count_bruteforce(fx, 2, 10 ** 5)

    def test_oracle_equivalence_sample(self):
        polys = ["x^3/2", "x", "2*x^4/3 - 0.5*x"]
        for lit in polys:
            f = PseudoPolynomial.parse(lit)
            c = counts_vector(f, 60)
            for s in (1, 2, 3):
                t = rep_count_exact(c, s, 60)
                for N in range(1, 61):
                    assert int(t.values[N]) == rep_count_bruteforce(f, s, N), \
                        (lit, s, N)


class TestUnrepresentable:
    def test_floor_power_pairs(self, f32):
        # zero set of r_{f,2} on [1,20]; 9 = 1 + 8 is representable
        assert unrepresentable(f32, 2, 1, 20) == [1, 5, 8, 11, 14, 17, 18]

    def test_positive_four_squares(self):
        # four *positive* squares: classical exception list
        fsq = PseudoPolynomial.parse("x^2")
        got = unrepresentable(fsq, 4, 1, 100)
        assert got == [1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41, 56, 96]

    def test_positive_two_squares(self):
        fsq = PseudoPolynomial.parse("x^2")
        assert unrepresentable(fsq, 2, 3, 8) == [3, 4, 6, 7]

    def test_matches_bruteforce(self, f32):
        got = unrepresentable(f32, 2, 1, 40)
        expected = [N for N in range(1, 41)
                    if rep_count_bruteforce(f32, 2, N) == 0]
        assert got == expected
