from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from zfcert.certificate import Status
from zfcert.exactnum import iv
from zfcert.polycert import (Domain, PolyQ, certify_positive, chebyshev_expand, isolate_real_roots,
                             poly_min_enclosure, poly_gcd, square_free_part, sturm_real_root_count)

import properties


def test_arithmetic_and_division():
    a = PolyQ([1, 2, 3])
    b = PolyQ([-1, 1])
    q, r = (a * b + PolyQ([5])).divmod(b)
    assert q == a and r == PolyQ([5])
    assert (a - a).is_zero()
    assert a.derivative() == PolyQ([2, 6])
    assert a.integral().derivative() == a
    assert a(Fraction(1, 2)) == Fraction(11, 4)


def test_gcd_and_square_free():
    p = PolyQ.from_roots([1, 1, 2, Fraction(1, 3)])
    assert square_free_part(p).degree == 3
    g = poly_gcd(p, PolyQ.from_roots([1, 5]))
    assert g.degree == 1 and g(1) == 0


def test_sturm_counts_known_roots():
    p = PolyQ.from_roots([-2, 0, Fraction(1, 2), 3])
    assert sturm_real_root_count(p) == 4
    assert sturm_real_root_count(p, Domain.open(0, 3)) == 1
    assert sturm_real_root_count(p, Domain.closed(0, 3)) == 3
    assert sturm_real_root_count(PolyQ([1, 0, 1])) == 0


def test_isolation_intervals_hold_one_root_each():
    roots = [Fraction(-7, 3), Fraction(1, 9), Fraction(2, 9), 4]
    iso = isolate_real_roots(PolyQ.from_roots(roots), max_width=Fraction(1, 1000))
    assert iso.total_real_root_count == 4
    for (a, b), r in zip(iso.intervals, sorted(roots)):
        assert a <= r <= b and b - a <= Fraction(1, 1000)


def test_certify_positive_pass_and_fail():
    assert certify_positive(PolyQ([1, 0, 1]), (-1, 1)).status is Status.PASS
    cert = certify_positive(PolyQ([-1, 0, 1]), (0, 2))
    assert cert.status is Status.FAIL
    # x(x - 1) vanishes at 1, so only the half-open (1, 2] passes
    assert certify_positive(PolyQ.from_roots([1, 0]), (1, 2), "oc").status is Status.PASS
    with pytest.raises(ValueError):
        certify_positive(PolyQ(), (0, 1))


def test_chebyshev_small_degrees():
    assert chebyshev_expand(0) == PolyQ([1])
    assert chebyshev_expand(3) == PolyQ([0, -3, 0, 4])
    with pytest.raises(ValueError):
        chebyshev_expand(-1)


def test_chebyshev_identity_random_points():
    n, bad = properties.chebyshev_violations(count=100, seed=23)
    assert n == 100 and bad == []


def test_sturm_against_polyroots_and_sampling():
    n, bad = properties.sturm_violations(count=120, seed=41)
    assert bad == []


def test_min_enclosure_matches_dense_sampling():
    rng = random.Random(13)
    for _ in range(20):
        p = properties.random_poly(rng, 8)
        lo, hi = Fraction(-1), Fraction(1)
        enc = poly_min_enclosure(p, Domain.closed(lo, hi))
        xs = np.linspace(-1, 1, 20001)
        coeffs = [float(c) for c in reversed(p.coeffs)]
        sampled = float(np.min(np.polyval(coeffs, xs)))
        assert float(enc.lo) <= sampled + 1e-9 * max(1, abs(sampled))
        assert sampled <= float(enc.hi) + 1e-6 * max(1, abs(sampled))


def test_interval_evaluation_contains_exact_value():
    p = PolyQ([Fraction(1, 3), -2, Fraction(5, 7), 1])
    x = Fraction(2, 11)
    assert p.eval_interval(iv(x, 128)).contains(p(x))
    assert p.eval_centered(iv(x, 128)).contains(p(x))
