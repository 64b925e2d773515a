from __future__ import annotations

import math
from fractions import Fraction

import pytest

from zfcert import reference as ref
from zfcert.bounds import matches_printed
from zfcert.certificate import Status
from zfcert.exactnum import iv
from zfcert.smoothing import ProofParams, SmoothingSpec, w0
from zfcert.suite import ITERATION_INPUTS
from zfcert.trigpoly import TrigPoly
from zfcert.zfr import (crossover_height, decimal_places_needed, improved_iteration, iteration_assembly,
                        parameter_table_check, theorem_thresholds)


@pytest.fixture(scope="module")
def certs(suite_ctx):
    return {i: suite_ctx.get(i) for i in ITERATION_INPUTS}


@pytest.fixture(scope="module")
def certs_variant(variant_ctx):
    return {i: variant_ctx.get(i) for i in ITERATION_INPUTS}


def test_iteration_passes_with_default_inputs(certs):
    res = iteration_assembly(ProofParams(), certs)
    assert res.verdict is Status.PASS
    assert res.certificate.check("cubic_decreasing").verdict
    assert res.final_constant.lo > ProofParams().A0 + ref.ITERATION_STEP


def test_final_constant_is_endpoint_over_divisor(certs):
    res = iteration_assembly(ProofParams(), certs)
    assert res.final_constant.overlaps(res.value_at_endpoint / res.divisor)
    poly, spec = TrigPoly.from_spectral(), SmoothingSpec()
    assert res.divisor.overlaps(w0() * poly.a_sum * spec.kappa_sum / 2)


@pytest.mark.parametrize("dropped", ["kappa-positivity", "dG-sigma-53", "trig-lower-bound", "main-term-combined"])
def test_missing_input_gives_incomplete(certs, dropped):
    partial = {k: v for k, v in certs.items() if k != dropped}
    res = iteration_assembly(ProofParams(), partial)
    assert res.verdict is Status.INCOMPLETE and res.missing == (dropped,)


def test_every_input_is_required(certs):
    for dropped in ITERATION_INPUTS:
        partial = {k: v for k, v in certs.items() if k != dropped}
        assert iteration_assembly(ProofParams(), partial).verdict is Status.INCOMPLETE


@pytest.mark.parametrize("target", [Fraction(1, 5), Fraction(2, 11), Fraction(1, 6)])
def test_smaller_target_keeps_pass(certs, target):
    assert iteration_assembly(ProofParams(), certs, target_A0=target).verdict is Status.PASS


def test_target_one_quarter_fails(certs):
    res = iteration_assembly(ProofParams(), certs, target_A0=Fraction(1, 4))
    assert res.verdict is Status.FAIL
    assert res.first_failure == "printed_route_closes"


def test_direct_route(certs):
    res = iteration_assembly(ProofParams(), certs, route="direct")
    assert res.verdict is Status.PASS
    assert res.certificate.check("exact_decreasing").verdict
    with pytest.raises(ValueError):
        iteration_assembly(ProofParams(), certs, route="other")


def test_variant_routes(certs_variant):
    params = ProofParams(A0=ref.VARIANT_A0["4.8594"])
    L = ref.LOG_T_MAX["4.8594"]
    printed = iteration_assembly(params, certs_variant, log_t_max=L)
    direct = iteration_assembly(params, certs_variant, log_t_max=L, route="direct")
    # (2 sigma0 - 1)/eta0 = 137.78 misses the printed 138, so both routes stop at the boundary certificate
    for res in (printed, direct):
        assert res.verdict is Status.FAIL and res.first_failure == "boundary-nonnegativity"
    boundary = certs_variant["boundary-nonnegativity"]
    assert not boundary.check("shift_real_part").verdict
    assert boundary.check("shift_real_part_137").verdict and boundary.check("epsilon0_137").verdict
    # the closing comparison itself: the printed cubic misses A0 by 4e-8, the exact expression clears it
    assert printed.certificate.check("printed_route_closes").verdict is False
    assert direct.certificate.check("direct_route_closes").verdict is True


def test_improved_iteration_gains(certs):
    out = improved_iteration(ProofParams(), certs)
    assert out["gain"].lo > 0


def test_margin_digits(certs):
    res = iteration_assembly(ProofParams(), certs)
    assert res.margin_digits == 5
    assert decimal_places_needed(iv(Fraction(3, 10)), Fraction(1, 4)) == 2


def test_crossover_examples():
    assert matches_printed(crossover_height(*ref.LITTLEWOOD["4.896"]), Fraction("76.46"))
    assert abs(float(crossover_height(*ref.LITTLEWOOD["4.896"]).mid()) - 76.463) < 1e-2
    assert abs(float(crossover_height(*ref.LITTLEWOOD["4.8594"]).mid()) - 56.691) < 1e-2
    assert crossover_height(Fraction(7, 3), Fraction(7, 3)).overlaps(iv(1).exp())
    with pytest.raises(ValueError):
        crossover_height(0, 1)


def test_parameter_table_columns():
    second = parameter_table_check(ref.VARIANT_A0["4.8594"])
    assert second.witness["column"] == "4.8594"
    assert second.witness["entries"]["eta0"]["status"] == "CONSISTENT"
    main = parameter_table_check(ref.VARIANT_A0["4.896"])
    assert main.witness["column"] == "4.896" and main.witness["entries"]["eta0"]["status"] == "CONSISTENT"
    assert main.witness["entries"]["A0_row_vs_eta0"]["status"] == "INCONSISTENT"
    row = parameter_table_check(ref.A0_TABLE_ROW, column="4.896")
    assert row.witness["entries"]["eta0"]["status"] == "INCONSISTENT"
    assert abs(float(row.enclosures["eta0"].mid()) - 0.0071625) < 1e-7
    # inconsistencies are findings, never failures
    assert row.status is Status.PASS


def test_theorem_thresholds():
    first = theorem_thresholds("4.896")
    assert first["region_constant"] == Fraction("4.896") and first["log_t_max"] == Fraction("76.47")
    assert first["handoff_below_endpoint"]
    second = theorem_thresholds("4.8594")
    assert second["region_constant"] == Fraction("4.8594") and second["log_t_max"] == Fraction("56.693")
    with pytest.raises(ValueError):
        theorem_thresholds("3.0")
    assert math.isclose(float(first["handoff_log_t"].mid()), 76.4629, abs_tol=1e-3)
