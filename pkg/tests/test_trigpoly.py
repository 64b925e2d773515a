from __future__ import annotations

import random
from fractions import Fraction

import pytest

from zfcert import reference as ref
from zfcert.certificate import Status
from zfcert.exactnum import iv
from zfcert.smoothing import ProofParams
from zfcert.trigpoly import (PRIMES_BELOW_100, TrigPoly, build_Gp, certify_dGp_dsigma_negative, certify_mp,
                             certify_trig_coefficients, chebyshev_form, derive_a_coefficients, evaluate_Gp, is_prime)


def test_derive_a_coefficients_small_vector():
    # |1 + 2z|^2 = 5 + 4 cos x
    assert derive_a_coefficients([1, 2], 5) == [1, Fraction(4, 5)]
    with pytest.raises(ValueError):
        derive_a_coefficients([1, 2], 4)
    assert derive_a_coefficients([1, 2], 4, require_unit_constant=False)[0] == Fraction(5, 4)


def test_published_coefficients():
    poly = TrigPoly.from_spectral()
    assert poly.a[1] == ref.A1 and poly.a_sum == ref.A_SUM
    assert certify_trig_coefficients().status is Status.PASS


def test_polynomial_nonnegative_and_forms_agree():
    poly = TrigPoly.from_spectral()
    rng = random.Random(8)
    for _ in range(200):
        x = iv(Fraction(rng.uniform(0, 7)).limit_denominator(10**6), 128)
        val = poly.evaluate(x)
        assert not val.certainly_lt(0)
        assert val.overlaps(poly.evaluate_cosine_form(x))


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(PRIMES_BELOW_100) == 25 and all(map(is_prime, PRIMES_BELOW_100))


def test_Gp_coefficients_small_indices():
    g = build_Gp(2)
    poly = TrigPoly.from_spectral()
    # b_0 = a_0 sum_{m<=15} 2^-m, b_1 = a_1 / 2, b_2 = a_2 / 2 + a_1 / 4
    assert g.b_at_one(0) == sum(Fraction(1, 2 ** m) for m in range(1, 16))
    assert g.b_at_one(1) == poly.a[1] / 2
    assert g.b_at_one(2) == poly.a[2] / 2 + poly.a[1] / 4
    assert g.degree == 15 * poly.K
    with pytest.raises(ValueError):
        build_Gp(4)
    with pytest.raises(ValueError):
        build_Gp(101)


def test_chebyshev_reduction_matches_cosine_sum():
    rng = random.Random(4)
    for p in (2, 97):
        g = build_Gp(p)
        Pp = chebyshev_form(p)
        assert Pp.degree == g.degree
        for _ in range(5):
            x = Fraction(rng.uniform(0, 3)).limit_denominator(10**4)
            xi = iv(x, 512)
            direct = evaluate_Gp(g, iv(1, 512), xi)
            assert direct.overlaps(Pp.eval_centered(xi.cos()))


@pytest.mark.parametrize("p", [2, 3, 97])
def test_printed_mp_certificates(p):
    mp, cert = certify_mp(p)
    assert mp == ref.TABLE_MP[p]
    assert cert.status is Status.PASS
    assert cert.witness["own_lower_bound"] >= mp


def test_mp_certificate_rejects_inflated_bound():
    _, cert = certify_mp(2, table_value=ref.TABLE_MP[2] + 1)
    assert cert.status is Status.FAIL


@pytest.mark.parametrize("p", [2, 97])
def test_dG_sigma_negative(p):
    assert certify_dGp_dsigma_negative(p).status is Status.PASS


def test_single_prime_sum_at_sigma_one_is_nonnegative():
    g = build_Gp(3, ProofParams())
    rng = random.Random(12)
    for _ in range(20):
        x = iv(Fraction(rng.uniform(0, 7)).limit_denominator(10**5), 256)
        assert not evaluate_Gp(g, iv(1, 256), x).certainly_lt(0)


def test_table_decreasing_in_p():
    values = [ref.TABLE_MP[p] for p in PRIMES_BELOW_100]
    assert values == sorted(values, reverse=True)
