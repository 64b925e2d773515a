from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from zfcert import exactnum as en
from zfcert.bounds import digamma_enclosure
from zfcert.exactnum import DomainError, Interval, iv, iv_from_rational

import properties


def to_mpf(x) -> mpmath.mpf:
    num, den = x.as_integer_ratio()
    return mpmath.mpf(int(num)) / int(den)


def test_rational_canonical_form():
    q = en.rational(6, -4)
    assert (q.numerator, q.denominator) == (-3, 2)
    with pytest.raises(ZeroDivisionError):
        en.rational(1, 0)


def test_from_rational_is_tight_and_contains():
    q = Fraction(1, 3)
    x = iv_from_rational(q, 128)
    assert x.lower_fraction() < q < x.upper_fraction()
    assert x.width() <= 2 * 2.0 ** -129
    assert iv_from_rational(Fraction(3, 4), 64).is_point()


def test_exp_zero_is_tight():
    x = en.iv_eval_elementary("exp", iv(0, 128), 128)
    assert x.contains(1) and x.width() < 2.0 ** -60


def test_two_theta_cot_theta():
    t = iv("1.1338", 128)
    v = t * 2 * en.iv_eval_elementary("cot", t, 128)
    assert v.lo < Fraction("1.05923294") and v.hi > Fraction("1.05923292")


@pytest.mark.parametrize("fn, x", [("log", Interval(-1, 1)), ("sqrt", Interval(-1, 0)),
                                   ("tan", iv("1.5707963267948966", 64).hull(iv(2, 64))),
                                   ("cot", Interval(-1, 1)), ("csc", Interval(-1, 1)), ("sec", Interval(1, 2))])
def test_domain_errors(fn, x):
    with pytest.raises(DomainError):
        en.iv_eval_elementary(fn, x, 64)


def test_precision_floor():
    with pytest.raises(ValueError):
        en.iv_eval_elementary("exp", iv(1), 8)


def test_width_shrinks_with_precision():
    widths = [float(en.iv_eval_elementary("log", iv(Fraction(10, 7), p), p).width()) for p in (32, 64, 128, 256)]
    assert widths == sorted(widths, reverse=True) and widths[-1] < 1e-70


def test_negation_keeps_precision():
    x = iv(Fraction(-348895, 7028), 256)
    assert (-x).contains(Fraction(348895, 7028))
    assert abs(x).contains(Fraction(348895, 7028))


def test_huge_periodic_argument_is_sound():
    x = en.iv_eval_elementary("exp", iv(Fraction(307887, 3685), 64), 64)
    assert en.iv_eval_elementary("cos", x, 64).width() == 2


def test_division_by_zero_interval():
    with pytest.raises(DomainError):
        iv(1) / Interval(-1, 1)


def test_power_forms():
    assert (iv(-2) ** 3).contains(-8)
    assert (Interval(-1, 2) ** 2).lo == 0
    p = en.iv_eval_elementary("power", iv(2), 128, exponent=Fraction(1, 2))
    assert p.overlaps(en.iv_eval_elementary("sqrt", iv(2), 128)) and p.width() < 1e-30
    with pytest.raises(DomainError):
        en.iv_eval_elementary("power", iv(-2), 64, exponent=Fraction(1, 2))


def test_decimal_rounding_helpers():
    x = iv(Fraction(2, 3), 128)
    assert en.floor_decimal(x, 3) == Fraction(666, 1000)
    assert en.ceil_decimal(x, 3) == Fraction(667, 1000)


def test_escalate_doubles_until_decided():
    seen = []

    def attempt(prec):
        seen.append(prec)
        return True if prec >= 512 else None

    assert en.escalate(attempt, start=128) == (True, 512)
    assert seen == [128, 256, 512]


def test_mpfr_text_round_trip():
    x = iv(Fraction(1, 7), 200).lo
    assert en.decode_mpfr(en.encode_mpfr(x), 200) == x


def test_random_expression_containment():
    done, bad = properties.containment_violations(count=2000, seed=3)
    assert done == 2000 and bad == []


@settings(max_examples=300, deadline=None)
@given(st.fractions(min_value=-50, max_value=50, max_denominator=10**6),
       st.fractions(min_value=-50, max_value=50, max_denominator=10**6),
       st.sampled_from([53, 128, 300]))
def test_arithmetic_contains_exact_result(a, b, prec):
    A, B = iv(a, prec), iv(b, prec)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)
    if b != 0:
        assert (A / B).contains(a / b)


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=Fraction(1, 1000), max_value=60, max_denominator=10**4))
def test_elementary_against_mpmath(x):
    with mpmath.workdps(60):
        ref = mpmath.mpf(x.numerator) / x.denominator
        for fn in ("exp", "log", "sqrt", "sin", "cos", "atan"):
            enc = en.iv_eval_elementary(fn, iv(x, 160), 160)
            val = getattr(mpmath, fn)(ref)
            tol = mpmath.mpf(10) ** -55 * max(1, abs(val))
            assert to_mpf(enc.lo) <= val + tol and val - tol <= to_mpf(enc.hi), fn


def test_digamma_reference_values():
    g = en.euler_gamma_interval(128)
    assert digamma_enclosure(1).overlaps(-g) and digamma_enclosure(1).width() < 1e-20
    half = digamma_enclosure(Fraction(3, 2))
    assert half.overlaps(2 - g - 2 * en.log(iv(2)))
    with pytest.raises(DomainError):
        digamma_enclosure(0)


def test_digamma_against_mpmath():
    rng = random.Random(5)
    with mpmath.workdps(50):
        for _ in range(60):
            x = Fraction(rng.randint(1, 10**5), rng.randint(1, 10**3))
            enc = digamma_enclosure(x, 128)
            ref = mpmath.digamma(mpmath.mpf(x.numerator) / x.denominator)
            assert to_mpf(enc.lo) - 1e-40 <= ref <= to_mpf(enc.hi) + 1e-40
            assert enc.width() < 1e-25
