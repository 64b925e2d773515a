from __future__ import annotations

import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from zfcert import reference as ref
from zfcert.bounds import matches_printed
from zfcert.certificate import Status
from zfcert.exactnum import DomainError, iv
from zfcert.smoothing import (ProofParams, SmoothingSpec, b_coefficients, build_B_certificate, certify_f_lower_bound,
                              certify_kappa_polynomial, efficiency_constant, eval_W_real, eval_w, f_gap_jet, ford_C,
                              ford_tail_real, w0)
from zfcert.taylor import Jet

THETA = mpmath.mpf(1.1338)


def w_reference(u, theta=None):
    """Second implementation of the weight in mpmath, used as an oracle."""
    t = mpmath.mpf(ref.THETA.numerator) / ref.THETA.denominator if theta is None else theta
    sec2 = mpmath.sec(t) ** 2
    tcot = t * mpmath.cot(t)
    ut = u * mpmath.tan(t)
    inner = (tcot - u / 2) * mpmath.cos(ut) * sec2 + 2 * tcot - u
    inner += mpmath.sin(2 * t - ut) * mpmath.csc(2 * t) - 2 * (mpmath.sin(t - ut) * mpmath.csc(t) + 1)
    return inner * sec2


def test_spec_validation():
    # unnormalized vectors are allowed so that failing candidates can still be certified as failing
    with pytest.raises(ValueError):
        SmoothingSpec(kappa=())
    with pytest.raises(ValueError):
        SmoothingSpec(theta=Fraction(2))
    spec = SmoothingSpec()
    assert spec.M == 6 and spec.kappa_sum == ref.KAPPA_SUM and spec.is_normalized


def test_proof_params_invariants():
    checks = ProofParams().check_invariants()
    assert all(checks.values()), checks
    assert abs(float(ProofParams().mu0().mid()) - float(ref.MU0)) < 1e-5
    with pytest.raises(ValueError):
        ProofParams(A0=Fraction(1, 7))


def test_w0_value():
    v = w0()
    assert matches_printed(v, ref.W0_DIGITS) and v.width() < 1e-8
    assert eval_w(0).overlaps(v)


def test_w_vanishes_at_support_end_and_outside():
    end = SmoothingSpec().support_end()
    assert eval_w(end).contains(0)
    assert eval_w(5).contains(0) and eval_w(-1).contains(0)


def test_w_matches_independent_closed_form():
    with mpmath.workdps(150):
        for u in (Fraction(1, 2), Fraction(1, 10), Fraction(3, 4)):
            enc = eval_w(iv(u, 512), prec=512)
            refv = w_reference(mpmath.mpf(u.numerator) / u.denominator)
            assert abs(mpmath.mpf(enc.mid().as_integer_ratio()[0]) / enc.mid().as_integer_ratio()[1] - refv) < 1e-140
            assert enc.width() < 1e-140


def test_w_is_nonincreasing_on_samples():
    rng = random.Random(3)
    end = float(SmoothingSpec().support_end().lo)
    for _ in range(1000):
        a, b = sorted(Fraction(rng.random() * end).limit_denominator(10**6) for _ in range(2))
        assert not eval_w(a, prec=64).certainly_lt(eval_w(b, prec=64))


def test_W_at_zero_matches_oracle():
    with mpmath.workdps(30):
        end = 2 * THETA * mpmath.cot(THETA)
        oracle = mpmath.quad(w_reference, [0, end])
    W = eval_W_real(0)
    assert abs(float(W.mid()) - float(oracle)) < 1e-12


def test_W_tail_against_ford_bound():
    x = 10**6
    diff = eval_W_real(x) - w0() / x
    assert abs(diff).hi < 52 * Fraction(1, x**3)


def test_ford_bound_contains_random_real_tails():
    # 12 samples rather than 10^3 to keep the run short; each W evaluation takes over a second
    rng = random.Random(17)
    bad = []
    for _ in range(12):
        x = Fraction(rng.uniform(3, 300)).limit_denominator(1000)
        tail = ford_tail_real(x)
        if not tail.certainly_le(ford_C(x, x)):
            bad.append((float(x), float(tail.mid()), float(ford_C(x, x).mid())))
    assert bad == [], f"{len(bad)} of 12 real points exceed the printed C(x, x): {bad[:3]}"


def test_real_axis_tail_stays_below_downstream_bounds():
    for x in (Fraction(3), Fraction(6941, 100), Fraction(10**6)):
        assert ford_tail_real(x).hi < 51


def test_ford_constants_from_proofs():
    p = ProofParams()
    x0 = p.x0()
    assert ford_C(x0 / p.eta0(), x0 / p.eta0()).hi < 52
    assert ford_C(-1, 10**10).hi < 51
    with pytest.raises(DomainError):
        ford_C(1, 2)


def test_b_coefficients():
    b = b_coefficients()
    assert len(b) == 8
    assert b[0] == 1 and b[1] == Fraction(8, 859) and b[7] == Fraction(-29, 859)


def test_efficiency_constant():
    assert efficiency_constant(SmoothingSpec()) == ref.EFFICIENCY
    assert efficiency_constant((Fraction(1),)) == 1
    assert efficiency_constant((Fraction(1, 2),)) == 2
    with pytest.raises(ZeroDivisionError):
        efficiency_constant((Fraction(1), Fraction(-1)))


def test_kappa_polynomial_certificates():
    assert certify_kappa_polynomial().witness["p_at_1"] == Fraction(433, 859)
    assert certify_kappa_polynomial(SmoothingSpec(kappa=(Fraction(1), Fraction(-2)))).status is Status.FAIL
    assert certify_kappa_polynomial(SmoothingSpec(kappa=(Fraction(1),))).status is Status.PASS


def test_boundary_certificate_rejects_bad_kappa():
    bad = SmoothingSpec(kappa=(Fraction(1), Fraction(-2), 0, 0, 0, 0, 0))
    assert build_B_certificate(ProofParams(), bad).status is Status.FAIL


def test_f_gap_is_zero_at_origin_and_positive_at_59():
    p, s = ProofParams(), SmoothingSpec()
    assert f_gap_jet(Jet.variable(iv(0), 0), p, s).value.contains(0)
    assert f_gap_jet(Jet.variable(iv(59), 0), p, s).value.lo > 0


def test_f_lower_bound_dense_sampling():
    p, s = ProofParams(), SmoothingSpec()
    assert certify_f_lower_bound(p, s).status is Status.PASS
    worst = min(float(f_gap_jet(Jet.variable(iv(Fraction(u).limit_denominator(10**6), 64), 0), p, s).value.lo)
                for u in np.linspace(0, 59, 10**4))
    assert worst > -1e-15
