from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import pytest

from zfcert import reference as ref
from zfcert.exactnum import iv, pi_interval
from zfcert.quad import IntegrandSpec, QuadratureIndeterminate, closed_form_tail, integrate_enclosure, riemann_enclosure


def test_constant_integrand():
    enc = integrate_enclosure(IntegrandSpec(lambda u: u * 0 + 1, 0, 1))
    assert enc.contains(1) and enc.width() < 1e-20


def test_smooth_integral_against_closed_form():
    # integral of exp(-u) sin(u) over [0, pi] = (1 + exp(-pi)) / 2
    spec = IntegrandSpec(lambda u: (-u).exp() * u.sin(), 0, pi_interval(128))
    enc = integrate_enclosure(spec, tol=1e-20)
    with mpmath.workdps(40):
        exact = (1 + mpmath.exp(-mpmath.pi)) / 2
    assert float(enc.lo) <= float(exact) <= float(enc.hi)
    assert enc.width() < 1e-18


def test_breakpoints_and_riemann_oracle():
    f = lambda u: (u * u + 1).log()
    fine = integrate_enclosure(IntegrandSpec(f, 0, 3, breakpoints=(Fraction(1), Fraction(2))))
    coarse = riemann_enclosure(f, Fraction(0), Fraction(3), 400)
    assert coarse.contains(fine)
    assert fine.width() < 1e-10 < coarse.width()


def test_semi_infinite_needs_tail():
    with pytest.raises(ValueError):
        IntegrandSpec(lambda u: 1 / (u * u), 1, math.inf)


def test_semi_infinite_with_tail_bound():
    # integral of 1/u^2 over [1, inf) = 1; tail over [X, inf) is 1/X
    spec = IntegrandSpec(lambda u: 1 / (u * u), 1, math.inf, tail_bound=lambda x, p: 1 / iv(x, p),
                         truncation=Fraction(10**8))
    enc = integrate_enclosure(spec)
    assert enc.contains(1) and enc.width() < 1e-7


def test_strict_mode_reports_unreachable_tolerance():
    with pytest.raises(QuadratureIndeterminate):
        integrate_enclosure(IntegrandSpec(lambda u: (u * 40).sin(), 0, 10), tol=1e-300, max_cells=4, strict=True)


def test_third_zero_sum_estimate_is_tiny():
    enc = closed_form_tail("phi_over_x", k=1, t=ref.H, T0=ref.T0)
    assert enc.hi < Fraction(1, 10**10)


def test_first_and_second_estimates_at_H():
    budget = Fraction(1, 10**10) * (iv(ref.H).log() + 1)
    assert closed_form_tail("phi_log", k=1, t=ref.H, T0=ref.T0).certainly_lt(budget)
    phi_T0 = 1 / iv(ref.T0) ** 2 + 1 / (iv(ref.H) * 2 + ref.T0) ** 2
    assert (phi_T0 * iv(ref.T0).log()).certainly_lt(budget)


def test_closed_form_limits_and_errors():
    assert closed_form_tail("reflected", k=1, t=math.inf, T0=ref.T0).contains(0)
    assert closed_form_tail("cube_weight", a=2).contains(Fraction(1, 2))
    with pytest.raises(ValueError):
        closed_form_tail("log_cube", Y=Fraction(1, 2))
    with pytest.raises(ValueError):
        closed_form_tail("no-such-family")
