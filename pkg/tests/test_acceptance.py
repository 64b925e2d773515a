"""One test per acceptance criterion, each printing a single PASS/FAIL line.

Time limits apply to the computation of the certificates involved; shared
certificates come from the session context, whose builds record their wall time.
"""

from __future__ import annotations

import time
from fractions import Fraction

from zfcert import reference as ref
from zfcert.bounds import matches_printed
from zfcert.certificate import Status
from zfcert.kappasearch import CandidateKappa, score_candidate
from zfcert.smoothing import ProofParams, build_B_certificate, certify_kappa_polynomial, w0
from zfcert.suite import ITERATION_INPUTS
from zfcert.trigpoly import PRIMES_BELOW_100, derive_a_coefficients
from zfcert.zfr import crossover_height, iteration_assembly, parameter_table_check

import properties


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start


def test_criterion_01_w0(criterion):
    v, secs = timed(w0)
    ok = matches_printed(v, ref.W0_DIGITS) and v.width() < 1e-8 and secs < 1
    assert criterion(1, ok, f"w(0) {v!r}, width {float(v.width()):.1e}, {secs:.2f} s")


def test_criterion_02_boundary_certificate(criterion):
    cert, secs = timed(build_B_certificate)
    num = cert.witness["scaled_numerator"]
    printed_num = [ref.P_CERT.get(k, 0) for k in range(13)]
    shifts_ok = sorted(cert.witness["denominator_shifts"]) == sorted(ref.Q_CERT_SHIFTS)
    ok = (cert.status is Status.PASS and list(num) == printed_num and shifts_ok
          and cert.check("numerator_matches_printed").verdict and cert.check("denominator_matches_printed").verdict
          and cert.witness["numerator_real_roots"] == 0 and secs < 30)
    assert criterion(2, ok, f"7 coefficients of p and q's 7 factors exact, p has "
                            f"{cert.witness['numerator_real_roots']} real roots, {secs:.2f} s")


def test_criterion_03_kappa_polynomial(criterion):
    cert, secs = timed(certify_kappa_polynomial)
    ok = cert.status is Status.PASS and cert.witness["p_at_1"] == Fraction(433, 859) and secs < 1
    assert criterion(3, ok, f"{cert.status.value}, p(1) = {cert.witness['p_at_1']}, {secs:.2f} s")


def test_criterion_04_f_lower_bound(criterion, suite_ctx):
    cert = suite_ctx.get("f-lower-bound")
    ok = cert.status is Status.PASS and cert.wall_time < 60
    assert criterion(4, ok, f"{cert.status.value} on [0, 59], {cert.wall_time:.2f} s")


def test_criterion_05_trig_coefficients(criterion):
    a, secs = timed(derive_a_coefficients, ref.TRIG_C, ref.TRIG_NORMALIZER)
    total = sum(a[1:], Fraction(0))
    ok = a[0] == 1 and a[1] == Fraction(865534, 497079) and total == Fraction(2919857, 828465) and secs < 1
    assert criterion(5, ok, f"a0 = {a[0]}, a1 = {a[1]}, a = {total}, {secs:.3f} s")


def test_criterion_06_table_and_trig_constant(criterion, suite_ctx):
    certs = {p: suite_ctx.get(f"mp-{p}") for p in PRIMES_BELOW_100}
    failed = [p for p, c in certs.items() if c.status is not Status.PASS]
    values_ok = all(c.witness["m_p"] == ref.TABLE_MP[p] for p, c in certs.items())
    lower = suite_ctx.get("trig-lower-bound")
    secs = sum(c.wall_time for c in certs.values()) + lower.wall_time
    sums_ok = (lower.check("printed_sum").verdict and lower.check("certified_sum").verdict
               and lower.check("final_constant").verdict)
    ok = not failed and values_ok and sums_ok and secs < 300
    detail = (f"{25 - len(failed)}/25 printed m_p certified" + (f" (fails for p = {failed})" if failed else "")
              + f"; sum log p m_p > 0.23545: {lower.check('printed_sum').label}"
              + f"; 0.23545 kappa > 0.1186: {lower.check('final_constant').label}; {secs:.1f} s")
    assert criterion(6, ok, detail)


def test_criterion_07_monotonicity(criterion, suite_ctx):
    certs = {p: suite_ctx.get(f"dG-sigma-{p}") for p in PRIMES_BELOW_100}
    failed = [p for p, c in certs.items() if c.status is not Status.PASS]
    secs = sum(c.wall_time for c in certs.values())
    ok = not failed and secs < 300
    assert criterion(7, ok, f"{25 - len(failed)}/25 primes, {secs:.1f} s")


def test_criterion_08_S1_S2(criterion, suite_ctx):
    cert = suite_ctx.get("main-term-moments")
    S1, S2 = cert.enclosures["S1"], cert.enclosures["S2"]
    ok = (matches_printed(S1, ref.S1_DIGITS) and matches_printed(S2, ref.S2_DIGITS)
          and max(S1.width(), S2.width()) < 1e-8 and cert.wall_time < 5)
    assert criterion(8, ok, f"S1 {S1!r}, S2 {S2!r}, {cert.wall_time:.2f} s")


def test_criterion_09_moments(criterion, suite_ctx):
    cert = suite_ctx.get("main-term-moments")
    bad = [k for k, printed in ref.MOMENT_DIGITS.items()
           if not (matches_printed(cert.enclosures[k], printed) and cert.enclosures[k].width() < 1e-8)]
    ok = not bad and cert.wall_time < 30
    assert criterion(9, ok, f"c0..c3, c*: {'all contain the printed digits' if not bad else bad}, "
                            f"{cert.wall_time:.2f} s")


def test_criterion_10_error_constants(criterion, suite_ctx):
    ids = ("error-term-constants", "error-aggregation", "zero-sum-tails", "digamma-sum", "pole-term")
    certs = {i: suite_ctx.get(i) for i in ids}
    checks = {
        "error-term-constants": ("digamma_integral", "t0_term1", "t0_total", "th_square", "th_cube"),
        "error-aggregation": ("t0_branch", "th_square_branch", "th_cube_branch"),
        "zero-sum-tails": ("k0_tail", "est1_all_k", "est2", "est3", "k_ge_1_tail"),
        "digamma-sum": ("k0_digamma", "total"),
        "pole-term": ("per_shift", "total"),
    }
    broken = [f"{i}:{n}" for i, names in checks.items() for n in names if not certs[i].check(n).verdict]
    not_pass = [i for i, c in certs.items() if c.status is not Status.PASS]
    secs = sum(c.wall_time for c in certs.values())
    ok = not broken and not not_pass and secs < 120
    assert criterion(10, ok, f"{len(ids) - len(not_pass)}/{len(ids)} certificates PASS"
                             + (f", broken {broken}" if broken else "") + f", {secs:.1f} s")


def test_criterion_11_iteration(criterion, suite_ctx):
    certs = {i: suite_ctx.get(i) for i in ITERATION_INPUTS}
    res, secs = timed(iteration_assembly, ProofParams(), certs)
    v, f = res.value_at_endpoint, res.final_constant
    endpoint_ok = matches_printed(v, ref.ENDPOINT_VALUE_DIGITS) and v.width() < 1e-4
    final_ok = matches_printed(f, ref.FINAL_CONSTANT_DIGITS) and f.width() < 1e-5
    cubic_ok = res.certificate.check("cubic_decreasing").verdict is True
    ok = endpoint_ok and final_ok and cubic_ok and secs < 10
    assert criterion(11, ok, f"endpoint {v!r} ({'contains' if endpoint_ok else 'misses'} 1.02928); final "
                             f"{f!r} ({'contains' if final_ok else 'misses'} 0.204248); decreasing cubic "
                             f"{'PASS' if cubic_ok else 'FAIL'}; {secs:.2f} s")


def test_criterion_12_crossovers(criterion):
    start = time.perf_counter()
    first = crossover_height(*ref.LITTLEWOOD["4.896"])
    second = crossover_height(*ref.LITTLEWOOD["4.8594"])
    secs = time.perf_counter() - start
    tol = Fraction(1, 100)

    def near(x, target):
        return x.lower_fraction() - tol <= target <= x.upper_fraction() + tol

    ok = near(first, ref.CROSSOVER_DIGITS["4.896"]) and near(second, ref.CROSSOVER_DIGITS["4.8594"]) and secs < 1
    assert criterion(12, ok, f"log t crossovers {float(first.mid()):.4f} (76.463) and "
                             f"{float(second.mid()):.4f} (56.691), {secs:.3f} s")


def test_criterion_13_parameter_table(criterion):
    start = time.perf_counter()
    main = parameter_table_check(ref.VARIANT_A0["4.896"])
    second = parameter_table_check(ref.VARIANT_A0["4.8594"])
    secs = time.perf_counter() - start
    row = main.witness["entries"]["A0_row_vs_eta0"]
    finding = row["status"] == "INCONSISTENT" and row["printed"] == ref.A0_TABLE_ROW and any(
        "4.8596" in f and "4.896" in f for f in main.findings)
    entries = second.witness["entries"]
    confirmed = second.witness["column"] == "4.8594" and all(
        entries[k]["status"] == "CONSISTENT" for k in ("eta0", "sigma0", "A0"))
    ok = finding and confirmed and secs < 1
    assert criterion(13, ok, f"A0 row finding reported: {finding}; second column consistent: {confirmed}; "
                             f"{secs:.2f} s")


def test_criterion_14_efficiency(criterion):
    start = time.perf_counter()
    published = score_candidate(CandidateKappa.from_coefficients(ref.KAPPA, "published"))
    single = score_candidate(CandidateKappa.from_coefficients((Fraction(1),), "single"))
    secs = time.perf_counter() - start
    from zfcert.kappasearch import Leaderboard
    limit = Leaderboard(6, [published], False).hypothetical_limit
    ok = published.efficiency == Fraction(859, 433) and single.efficiency == 1 and limit == 2 and secs < 5
    assert criterion(14, ok, f"published {published.efficiency}, single {single.efficiency}, "
                             f"limit {limit}, {secs:.2f} s")


def test_criterion_15_property_suites(criterion):
    done, containment = properties.containment_violations(count=10**4, seed=2024)
    sturm_n, sturm = properties.sturm_violations(count=300, seed=7)
    cheb_n, cheb = properties.chebyshev_violations(count=100, seed=11)
    ok = done == 10**4 and cheb_n == 100 and not (containment or sturm or cheb)
    assert criterion(15, ok, f"containment {len(containment)}/{done}, Sturm {len(sturm)}/{sturm_n}, "
                             f"Chebyshev {len(cheb)}/{cheb_n} violations")
