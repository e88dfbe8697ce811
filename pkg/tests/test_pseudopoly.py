import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from waringlab import (ArcSetup, DomainError, NoSolutionError, ParseError,
                       PseudoPolynomial, default_v, derivative,
                       eval_with_error, floor_eval, floor_values,
                       largest_preimage, p_deviation, theorem_constants)
from waringlab.pseudopoly import eval_term_list, _mp_eval


class TestParse:
    def test_basic_literal(self):
        f = PseudoPolynomial.parse("2*x^2.5 + 1*x^1")
        assert f.terms == ((Fraction(1), Fraction(1)),
                           (Fraction(2), Fraction(5, 2)))

    def test_fraction_exponent_exact(self):
        f = PseudoPolynomial.parse("x^5/2")
        assert f.leading_exponent == Fraction(5, 2)

    def test_negative_coefficient(self):
        f = PseudoPolynomial.parse("2*x^4/3 - 0.5*x")
        assert f.terms[0][0] == Fraction(-1, 2)

    def test_implicit_coefficient_and_star(self):
        assert PseudoPolynomial.parse("x^2") == PseudoPolynomial.parse("1*x^2")

    def test_error_reports_position(self):
        with pytest.raises(ParseError) as exc:
            PseudoPolynomial.parse("2*x^")
        assert exc.value.position == 4

    def test_rejects_garbage(self):
        for bad in ("", "y^2", "2*", "x^2 + x^2", "3"):
            with pytest.raises(ParseError):
                PseudoPolynomial.parse(bad)

    def test_rejects_bad_structure(self):
        with pytest.raises(DomainError):
            PseudoPolynomial.from_terms([(1, Fraction(1, 2))])  # exponent < 1
        with pytest.raises(DomainError):
            PseudoPolynomial.from_terms([(-1, 2)])  # leading coefficient <= 0

    def test_roundtrip_str(self):
        f = PseudoPolynomial.parse("2*x^5/2 - 0.5*x")
        assert PseudoPolynomial.parse(str(f)) == f

    def test_classical_flag(self):
        assert PseudoPolynomial.parse("x^2 + x").classical_mode
        assert not PseudoPolynomial.parse("x^3/2").classical_mode
        assert PseudoPolynomial.parse("x^2 + x^3/2").largest_nonint_exponent \
            == Fraction(3, 2)


class TestEval:
    def test_exact_power(self):
        val, rad = eval_with_error(PseudoPolynomial.parse("x^3/2"), 4)
        assert val == 8
        assert rad <= 1e-15

    def test_linear(self):
        val, _ = eval_with_error(PseudoPolynomial.parse("2*x"), 3)
        assert val == 6

    def test_certified_radius(self):
        f = PseudoPolynomial.parse("x^3/2 + x")
        val, rad = eval_with_error(f, 2, precision=256)
        with mpmath.workprec(300):
            oracle = mpmath.power(2, mpmath.mpf(3) / 2) + 2
            assert abs(val - oracle) <= rad
        assert rad < 1e-12
        assert float(val) == pytest.approx(4.82842712474619, abs=1e-12)

    def test_domain_errors(self):
        f = PseudoPolynomial.parse("x^3/2")
        with pytest.raises(DomainError):
            eval_with_error(f, 0)
        with pytest.raises(DomainError):
            eval_with_error(f, 2, precision=20)


class TestFloor:
    def test_examples(self, f32):
        assert floor_eval(f32, 4) == 8
        assert floor_eval(f32, 2) == 2
        assert floor_eval(f32, 5) == 11

    def test_rejects_n_below_one(self, f32):
        with pytest.raises(DomainError):
            floor_eval(f32, 0)

    def test_matches_high_precision_oracle(self, family):
        # 512-bit oracle over every n <= 1e4; the upward nudge keeps exact
        # integer values (which the oracle may undershoot by 2^-500) on
        # the right side, while genuine non-integers sit far above it
        for f in family:
            floors = floor_values(f, 10 ** 4)
            with mpmath.workprec(512):
                nudge = mpmath.mpf(2) ** -256
                for n in range(1, 10 ** 4 + 1):
                    expected = int(mpmath.floor(_mp_eval(f, n) + nudge))
                    assert floors[n - 1] == expected, (str(f), n)

    def test_batch_equals_scalar(self, family):
        for f in family:
            floors = floor_values(f, 200)
            for n in (1, 2, 3, 17, 64, 100, 144, 200):
                assert floors[n - 1] == floor_eval(f, n)

    def test_classical_exact_integer_arithmetic(self):
        f = PseudoPolynomial.parse("x^2 + 0.5*x")
        for n in range(1, 500):
            exact = Fraction(n) ** 2 + Fraction(1, 2) * n
            assert floor_eval(f, n) == exact.numerator // exact.denominator


class TestLargestPreimage:
    def test_exact_power(self, f32):
        P = largest_preimage(f32, 8)
        assert abs(P - 4) < 1e-6

    def test_classical(self):
        assert largest_preimage(PseudoPolynomial.parse("x^2"), 16) == pytest.approx(4)

    def test_two_term(self):
        f = PseudoPolynomial.parse("x^3/2 + x")
        P = largest_preimage(f, 100)
        assert P == pytest.approx(18.758020186386, abs=1e-6)
        assert abs(P ** 1.5 + P - 100) <= 1e-6

    def test_residual_contract(self, family):
        for f in family:
            if f.value_at_one() > 50:
                continue
            P = largest_preimage(f, 50_000)
            from waringlab.pseudopoly import _mp_eval
            with mpmath.workprec(120):
                assert abs(_mp_eval(f, P) - 50_000) <= 1e-9

    def test_no_solution(self, f32):
        with pytest.raises(NoSolutionError):
            largest_preimage(f32, 0)

    def test_monotone_in_N(self):
        for lit in ("x^3/2", "x^2 + x^3/2", "2*x^4/3 - 0.5*x"):
            f = PseudoPolynomial.parse(lit)
            Ns = [int(x) for x in np.geomspace(10, 10 ** 5, 12)]
            Ps = [largest_preimage(f, N) for N in Ns if N >= f.value_at_one()]
            assert all(p1 <= p2 + 1e-12 for p1, p2 in zip(Ps, Ps[1:]))


class TestPDeviation:
    def test_single_term_zero(self, f32):
        assert p_deviation(f32, 8) == 0.0

    def test_two_term_small(self):
        dev = p_deviation(PseudoPolynomial.parse("x^3/2 + x"), 100)
        assert dev < 0
        assert abs(dev) < 10

    def test_classical_half(self):
        dev = p_deviation(PseudoPolynomial.parse("x^2 + x"), 10 ** 6)
        assert abs(dev) == pytest.approx(0.5, abs=0.01)

    def test_no_growth_trend(self):
        for lit, exp in (("x^2 + x^3/2", 0.5), ("x^5/2 + x", -0.5)):
            f = PseudoPolynomial.parse(lit)
            Ns = np.unique(np.geomspace(10 ** 3, 10 ** 6, 9).astype(int))
            ratios = [abs(p_deviation(f, int(N))) / largest_preimage(f, int(N)) ** exp
                      for N in Ns]
            slope = np.polyfit(np.log(Ns.astype(float)), np.log(ratios), 1)[0]
            assert slope <= 0.02, (lit, ratios)


class TestDerivative:
    def test_power_rule(self, f32):
        assert derivative(f32, 1) == ((Fraction(3, 2), Fraction(1, 2)),)

    def test_integer_annihilation(self):
        assert derivative(PseudoPolynomial.parse("x^3"), 4) == ()

    def test_falling_factorial(self):
        d3 = derivative(PseudoPolynomial.parse("2*x^5/2 + x^2"), 3)
        assert d3 == ((Fraction(15, 4), Fraction(-1, 2)),)

    def test_composition(self, family):
        for f in family:
            once_twice = derivative(derivative(f, 1), 1)
            assert once_twice == derivative(f, 2)

    def test_eval_term_list(self):
        terms = derivative(PseudoPolynomial.parse("x^2"), 1)
        assert eval_term_list(terms, 3.0) == pytest.approx(6.0)
        out = eval_term_list(terms, np.array([1.0, 2.0]))
        assert np.allclose(out, [2.0, 4.0])


class TestTheoremConstants:
    def test_single_fractional(self, f32):
        rho, s_min = theorem_constants(f32)
        assert rho == Fraction(1, 6)
        assert s_min == 145

    def test_two_term(self):
        rho, s_min = theorem_constants(PseudoPolynomial.parse("x^5/2 + x^2"))
        assert rho == Fraction(1, 6)
        assert s_min == 433

    def test_formula_direct(self):
        # bound = (2/rho) ceil(t)^2 (ceil(t)+1) evaluated exactly
        rho, s_min = theorem_constants(PseudoPolynomial.parse("x^13/12"))
        assert rho == Fraction(1, 6)
        bound = Fraction(2) / rho * 2 * 2 * 3
        assert s_min == bound.numerator // bound.denominator + 1 == 145


class TestArcSetup:
    def test_create_and_membership(self, f32):
        arc = ArcSetup.create(f32, 10 ** 4)
        assert arc.tau > 1
        assert abs(arc.P ** 1.5 - 10 ** 4) <= 1e-6
        assert arc.is_major(0.0)
        assert arc.is_major(1.0)             # distance to nearest integer is 0
        assert not arc.is_major(0.5)
        # the two arcs partition a period
        alphas = np.linspace(0, 1, 1001, endpoint=False)
        major = sum(arc.is_major(a) for a in alphas)
        assert 0 < major < len(alphas)

    def test_v_cap(self, f32):
        with pytest.raises(DomainError):
            ArcSetup.create(f32, 10 ** 4, v=0.21)   # above the 1/5 cap
        with pytest.raises(DomainError):
            ArcSetup.create(f32, 10 ** 4, v=0.0)

    def test_default_v(self, f32):
        assert default_v(f32) == pytest.approx(0.18)
        with pytest.raises(DomainError):
            default_v(PseudoPolynomial.parse("x"))  # zero gap, no valid v

    def test_tau_guard(self, f32):
        with pytest.raises((DomainError, NoSolutionError)):
            ArcSetup.create(f32, 1)
