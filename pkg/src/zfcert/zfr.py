"""Assembly of the iteration step and the theorem-level constants.

The iteration step combines the upstream certificates into a lower bound for
eta log t of the form value(1/log t) / (a kappa w(0) / 2), then compares it with
A0 + eps. Two routes evaluate value():

* ``printed``: certify that the printed cubic in 1/log t lies below the exact
  expression on the whole range, that the cubic decreases in log t, and evaluate
  it at the top of the range;
* ``direct``: certify that the exact expression itself decreases in log t and
  evaluate it exactly at the top of the range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional

from . import reference as ref
from .certificate import Certificate, CertificateBuilder, Status
from .exactnum import DEFAULT_PRECISION, Interval, exp, floor_decimal, iv, log
from .polycert import Domain, PolyQ, certify_positive
from .smoothing import ProofParams, SmoothingSpec, w0
from .suite import ITERATION_INPUTS
from .trigpoly import TrigPoly

ROUTES = ("printed", "direct")


@dataclass
class IterationResult:
    A0: Fraction
    log_t_max: Interval
    constant_poly: tuple[Fraction, ...]
    value_at_endpoint: Optional[Interval]
    final_constant: Optional[Interval]
    verdict: Status
    route: str = "printed"
    divisor: Optional[Interval] = None
    direct_value_at_endpoint: Optional[Interval] = None
    direct_final_constant: Optional[Interval] = None
    margin: Optional[Interval] = None
    margin_digits: Optional[int] = None
    eta_floor: Fraction = Fraction(1, 6)
    missing: tuple[str, ...] = ()
    first_failure: Optional[str] = None
    certificate: Optional[Certificate] = field(default=None, repr=False)


def _inverse_cubic(coeffs, u: PolyQ) -> PolyQ:
    out = PolyQ()
    for c in reversed(coeffs):
        out = out * u + c
    return out


def decimal_places_needed(value: Interval, threshold: Fraction, limit: int = 60) -> Optional[int]:
    """Fewest decimals d such that value rounded down to d places still exceeds threshold."""
    for d in range(limit + 1):
        if floor_decimal(value, d) > threshold:
            return d
    return None


def iteration_assembly(params: ProofParams, certs: Mapping[str, Certificate], *,
                       log_t_max=None, spec: SmoothingSpec = SmoothingSpec(), poly: Optional[TrigPoly] = None,
                       route: str = "printed", eta_floor: Fraction = Fraction(1, 6),
                       target_A0=None, precision: int = DEFAULT_PRECISION) -> IterationResult:
    """Re-derive the iteration inequality from the upstream certificates.

    ``eta_floor`` is the constant c in eta > c / log t; the default 1/6 is what any
    previously known region supplies, and a larger value gives the improved mode.
    ``target_A0`` replaces params.A0 in the final comparison only, which lets a
    target outside the parameter range be tested against the same certificates.
    """
    if route not in ROUTES:
        raise ValueError(f"route must be one of {ROUTES}")
    prec = precision
    poly = poly or TrigPoly.from_spectral()
    eps = ref.ITERATION_STEP
    L_max = Fraction(log_t_max if log_t_max is not None else ref.LOG_T_MAX["4.896"])
    eta_floor = Fraction(eta_floor)
    A0 = Fraction(target_A0) if target_A0 is not None else params.A0
    b = CertificateBuilder("iteration", f"eta log t > A0 + 1e-100 for H <= t <= exp({float(L_max)})")
    b.witness.update({"A0": A0, "log_t_max": L_max, "route": route, "eta_floor": eta_floor, "epsilon": eps})

    missing = tuple(i for i in ITERATION_INPUTS if i not in certs)
    for cert_id in ITERATION_INPUTS:
        if cert_id in certs:
            b.include(cert_id, certs[cert_id])
    result = IterationResult(A0, iv(L_max, prec), ref.CUBIC_IN_INV_L, None, None, Status.INCOMPLETE,
                             route=route, eta_floor=eta_floor, missing=missing)
    if missing:
        b.note(f"missing upstream certificates: {', '.join(missing)}")
        cert = b.build()
        cert.status = Status.INCOMPLETE
        result.certificate = cert
        return result

    a = poly.a_sum
    a0 = poly.a[0]
    W0 = w0(spec, prec)
    logH = log(iv(params.H, prec))

    # error terms: k = 0 carries the t = 0 constant, each k >= 1 the t >= H constants
    e2 = a * ref.AGG_TH_SQUARE
    e3 = a0 * ref.AGG_T0 + a * ref.AGG_TH_CUBE
    b.witness.update({"error_eta2": e2, "error_eta3": e3})
    b.add("error_square", f"a * 53 = {float(e2):.6g} <= 187", e2 <= ref.ITER_E_SQUARE)
    b.add("error_cube", f"2353 + a * 1601 = {float(e3):.6g} <= 8013", e3 <= ref.ITER_E_CUBE)
    tails = (a0 + a) * ref.TAIL_BOUND
    b.add("zero_sum_slack", f"sum_k a_k * 1e-8 = {float(tails):.6g} <= 1e-7", tails <= ref.TAIL_TOTAL)

    # coefficients of the eta polynomial after substitution
    lin = ref.LEMMA_63_POLY[0] + (ref.TRIG_LOWER_CONSTANT - ref.DIGAMMA_TOTAL) * W0 - ref.POLE_TOTAL
    quad = ref.LEMMA_63_POLY[1] - ref.ITER_E_SQUARE
    cube = ref.LEMMA_63_POLY[2] - ref.ITER_E_CUBE
    C2 = ref.C2_COEFFS
    b.greater("linear", lin, C2[0], strict=False,
              claim="3.909 + (0.1186 + 1.568) w(0) - 1e-10 >= 13.47")
    b.add("quadratic", f"26 - 187 >= {C2[1]}", quad >= C2[1])
    b.witness["cubic_exact"] = cube
    eta0 = params.eta0(prec)
    deficit = C2[2] - cube
    if deficit > 0:
        b.greater("cubic_rescue", lin - C2[0], eta0.sqr() * deficit, strict=False,
                  claim=f"(linear - 13.47) eta >= {deficit} eta^3 on [0, eta0]")
        b.note(f"Exact cubic coefficient is {cube}, below the printed {C2[2]}; the rounding slack of the "
               f"linear coefficient absorbs the difference.")
    else:
        b.add("cubic", f"{cube} >= {C2[2]}", True)

    # mu > 1 - 2.78 / log t and eta > eta_floor / log t
    shift = log(iv(params.K, prec) + params.T0 / params.H)
    b.enclosures["log_K_plus"] = shift
    b.greater("mu_floor", ref.MU_SHIFT - shift, iv(6 * eps * L_max, prec),
              claim="2.78 - log(K + T0/H) >= 6 eps log t_max")
    b.add("range_nonempty", "log t_max >= log H", logH.certainly_le(L_max))
    mu_low = 1 - ref.MU_SHIFT / logH
    b.greater("mu_range", mu_low, Fraction(9, 10), strict=False, claim="1 - 2.78/log H >= 0.9")
    # eta0 = A0/log H, so eta_floor/log H <= eta0 reduces to eta_floor <= A0
    b.add("eta_range", f"{eta_floor}/log H <= eta0", eta_floor <= params.A0)
    C1 = PolyQ(ref.C1_COEFFS)
    C2p = PolyQ([0, *C2])
    b.include("C1_increasing", certify_positive(C1.derivative(), Domain(Fraction(9, 10), Fraction(1), True, True),
                                                cert_id="C1-increasing", claim="C_1' > 0 on [0.9, 1]"))
    b.include("C2_increasing", certify_positive(C2p.derivative(), Domain(Fraction(0), eta0.upper_fraction(), True, True),
                                                cert_id="C2-increasing", claim="C_2' > 0 on [0, eta0]"))

    # everything as a polynomial in u = 1/log t on [1/log t_max, 1/log H]
    u = PolyQ([0, 1])
    exact = C1.compose_affine(-ref.MU_SHIFT, 1) + C2p.compose_affine(eta_floor, 0) - ref.TAIL_TOTAL
    printed = _inverse_cubic(ref.CUBIC_IN_INV_L, u)
    u_lo = 1 / L_max
    u_hi = (1 / logH).upper_fraction()
    rng = Domain(u_lo, u_hi, True, True)
    b.witness["exact_expression"] = list(exact.coeffs)
    dominated = certify_positive(exact - printed, rng, cert_id="cubic-domination",
                                 claim="exact expression - printed cubic > 0 for log H <= log t <= log t_max")
    decreasing = certify_positive(printed.derivative(), rng, cert_id="cubic-decreasing",
                                  claim="the printed cubic decreases in log t on the range")
    direct_decreasing = certify_positive(exact.derivative(), rng, cert_id="exact-decreasing",
                                         claim="the exact expression decreases in log t on the range")
    on_route = route == "printed"
    b.include("cubic_domination", dominated, required=on_route)
    b.include("cubic_decreasing", decreasing, required=on_route)
    b.include("exact_decreasing", direct_decreasing, required=not on_route)

    divisor = w0(spec, prec) * a * spec.kappa_sum / 2
    b.enclosures["divisor"] = divisor
    value_printed = iv(printed(u_lo), prec)
    value_direct = iv(exact(u_lo), prec)
    final_printed = value_printed / divisor
    final_direct = value_direct / divisor
    b.enclosures.update({"value_printed": value_printed, "value_direct": value_direct,
                         "final_printed": final_printed, "final_direct": final_direct})
    threshold = A0 + eps
    b.greater("printed_route_closes", final_printed, threshold, required=on_route,
              claim="printed cubic at log t_max / (a kappa w(0)/2) > A0 + eps")
    b.greater("direct_route_closes", final_direct, threshold, required=not on_route,
              claim="exact expression at log t_max / (a kappa w(0)/2) > A0 + eps")

    value, final = (value_printed, final_printed) if on_route else (value_direct, final_direct)
    margin = final - A0
    digits = decimal_places_needed(final, threshold)
    b.enclosures["margin"] = margin
    b.witness["margin_decimal_places"] = digits
    cert = b.build()
    failed = next((c.name for c in cert.checks if c.required and c.verdict is False), None)
    if failed:
        cert.findings.append(f"first broken link: {failed}")
    result.value_at_endpoint = value
    result.final_constant = final
    result.direct_value_at_endpoint = value_direct
    result.direct_final_constant = final_direct
    result.divisor = divisor
    result.margin = margin
    result.margin_digits = digits
    result.verdict = cert.status
    result.first_failure = failed
    result.certificate = cert
    return result


def improved_iteration(params: ProofParams, certs: Mapping[str, Certificate], *, log_t_max=None,
                       spec: SmoothingSpec = SmoothingSpec(), precision: int = DEFAULT_PRECISION) -> dict:
    """Re-run the direct route with eta > A0/log t in place of eta > 1/(6 log t).

    Once the region with constant A0 is known, a zero just outside the region under
    test has eta >= A0/log t. The gain is the change in the final constant.
    """
    base = iteration_assembly(params, certs, log_t_max=log_t_max, spec=spec, route="direct", precision=precision)
    better = iteration_assembly(params, certs, log_t_max=log_t_max, spec=spec, route="direct",
                                eta_floor=params.A0, precision=precision)
    gain = None
    if base.final_constant is not None and better.final_constant is not None:
        gain = better.final_constant - base.final_constant
    return {"base": base, "improved": better, "gain": gain}


def crossover_height(littlewood_constant, classical_constant, precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of log t where log log t / (c_L log t) equals 1 / (c_C log t).

    Above this height the region with the log log t factor is the wider one.
    """
    c_L, c_C = Fraction(littlewood_constant), Fraction(classical_constant)
    if c_L <= 0 or c_C <= 0:
        raise ValueError("both constants must be positive")
    return exp(iv(c_L, precision) / iv(c_C, precision))


def _matches(value: Interval, printed: Fraction) -> bool:
    from .bounds import matches_printed
    return matches_printed(value, printed)


def parameter_table_check(A0, params: Optional[ProofParams] = None, column: Optional[str] = None,
                          precision: int = DEFAULT_PRECISION) -> Certificate:
    """Recompute eta0, sigma0 and mu0 for A0 and compare them with a column of the parameter table.

    Every comparison is advisory: an inconsistency is a finding, not a failure.
    Without ``column`` the column whose printed A0 equals A0 is used, falling back to
    the column whose printed eta0 matches.
    """
    A0 = Fraction(A0)
    base = params or ProofParams()
    p = ProofParams(A0, base.H, base.T0, base.K, base.log_n_cutoff, base.prime_cutoff, base.power_cutoff)
    prec = precision
    eta0, sigma0, mu0 = p.eta0(prec), p.sigma0(prec), p.mu0(prec)
    if column is None:
        column = next((k for k, v in ref.PARAMETER_TABLE.items() if v["A0"] == A0), None)
    if column is None:
        column = next((k for k, v in ref.PARAMETER_TABLE.items() if _matches(eta0, v["eta0"])), None)
    b = CertificateBuilder("parameter-table", f"parameter table entries for A0 = 1/{float(1 / A0):.6g}")
    b.enclosures.update({"eta0": eta0, "sigma0": sigma0, "mu0": mu0})
    b.witness["column"] = column
    report = {}

    def compare(name, value, printed):
        ok = _matches(value, printed)
        gap = abs(value - printed)
        report[name] = {"printed": printed, "status": "CONSISTENT" if ok else "INCONSISTENT",
                        "discrepancy": float(gap.mid())}
        b.add(name, f"{name} agrees with the printed {printed} to its last place", ok, required=False,
              detail=f"enclosure {value!r}, discrepancy {float(gap.mid()):.3g}")
        if not ok:
            b.note(f"{name}: printed {float(printed)} vs recomputed {float(value.mid()):.10g} "
                   f"(discrepancy {float(gap.mid()):.3g})")

    if column is not None:
        row = ref.PARAMETER_TABLE[column]
        compare("eta0", eta0, row["eta0"])
        compare("sigma0", sigma0, row["sigma0"])
        implied = 1 / (iv(row["eta0"], prec) * log(iv(p.H, prec)))
        b.enclosures["A0_reciprocal_implied_by_eta0"] = implied
        same = row["A0"] == A0
        report["A0"] = {"printed": row["A0"], "status": "CONSISTENT" if same else "INCONSISTENT",
                        "discrepancy": float(abs(row["A0"] - A0))}
        row_eta = iv(row["A0"], prec) / log(iv(p.H, prec))
        row_ok = _matches(row_eta, row["eta0"])
        report["A0_row_vs_eta0"] = {"printed": row["A0"], "status": "CONSISTENT" if row_ok else "INCONSISTENT",
                                    "discrepancy": float(abs(row_eta - row["eta0"]).mid())}
        b.add("A0_row_vs_eta0", "the printed A0 reproduces the printed eta0", row_ok, required=False,
              detail=f"printed A0 gives eta0 {row_eta!r}; printed eta0 implies A0 = 1/{float(implied.mid()):.6g}")
        if not row_ok:
            b.note(f"column {column}: printed A0 = 1/{float(1 / row['A0']):.6g} gives eta0 = "
                   f"{float(row_eta.mid()):.8g}, but the printed eta0 {float(row['eta0'])} implies "
                   f"A0 = 1/{float(implied.mid()):.6g}")
    compare("mu0", mu0, ref.MU0)
    b.witness["entries"] = report
    return b.build()


def theorem_thresholds(variant: str = "4.896", result: Optional[IterationResult] = None,
                       precision: int = DEFAULT_PRECISION) -> dict:
    """Final statement data for one variant: constant, covered range, handoff height."""
    if variant not in ref.LOG_T_MAX:
        raise ValueError(f"unknown variant {variant!r}")
    A0 = ref.VARIANT_A0[variant]
    L_max = ref.LOG_T_MAX[variant]
    c_L, c_C = ref.LITTLEWOOD[variant]
    handoff = crossover_height(c_L, c_C, precision)
    return {
        "variant": variant,
        "region_constant": 1 / A0,
        "region": f"sigma > 1 - 1/({float(1 / A0):g} log t)",
        "log_t_max": L_max,
        "t_range": f"3 <= t <= exp({float(L_max):g})",
        "handoff_log_t": handoff,
        "handoff_below_endpoint": handoff.certainly_lt(L_max),
        "below_H": ref.BELOW_H_SOURCE,
        "iteration_verdict": result.verdict.value if result is not None else None,
    }
