"""Registry of every certificate in the suite and a memoizing runner.

Each entry builds one certificate from a SuiteContext. Entries that reuse
another certificate (per-prime table minima, shared sub-certificates) ask the
context for it, so a full run computes each certificate exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import __version__, bounds, reference as ref, smoothing, trigpoly
from .certificate import Certificate
from .exactnum import DEFAULT_PRECISION
from .smoothing import ProofParams, SmoothingSpec
from .trigpoly import PRIMES_BELOW_100, TrigPoly


@dataclass
class SuiteContext:
    params: ProofParams = field(default_factory=ProofParams)
    spec: SmoothingSpec = field(default_factory=SmoothingSpec)
    precision: int = DEFAULT_PRECISION
    log_t_max: object = ref.LOG_T_MAX["4.896"]
    poly: TrigPoly = field(default_factory=TrigPoly.from_spectral)
    results: dict[str, Certificate] = field(default_factory=dict)
    route: str = "printed"
    store: Optional[object] = None

    def digest(self) -> str:
        """Parameter digest that keys cached certificates."""
        import hashlib
        text = "|".join(str(x) for x in (
            self.params.A0, self.params.H, self.params.T0, self.params.K, self.params.log_n_cutoff,
            self.params.prime_cutoff, self.params.power_cutoff, self.spec.theta, self.spec.kappa,
            self.precision, self.log_t_max, self.route, __version__))
        return hashlib.sha256(text.encode()).hexdigest()[:20]

    def mp_result(self, p: int):
        cert = self.get(f"mp-{p}")
        return cert.witness["m_p"], cert

    def mp_results(self) -> dict:
        return {p: self.mp_result(p) for p in PRIMES_BELOW_100}

    def get(self, cert_id: str) -> Certificate:
        if cert_id not in self.results:
            cached = self.store.load(cert_id, self.digest()) if self.store is not None else None
            if cached is None:
                cached = REGISTRY[cert_id].build(self)
                if self.store is not None:
                    self.store.save(cached, cert_id, self.digest())
            self.results[cert_id] = cached
        return self.results[cert_id]


@dataclass(frozen=True)
class Entry:
    id: str
    description: str
    build: Callable[[SuiteContext], Certificate]
    group: str


def _entries() -> list[Entry]:
    out = [
        Entry("trig-coefficients", "coefficients of the nonnegative cosine polynomial",
              lambda c: trigpoly.certify_trig_coefficients(c.poly), "trig"),
        Entry("kappa-positivity", "the kappa polynomial is positive on (0, 1]",
              lambda c: smoothing.certify_kappa_polynomial(c.spec), "smoothing"),
        Entry("boundary-nonnegativity", "non-negativity of the test function on the boundary line",
              lambda c: smoothing.build_B_certificate(c.params, c.spec, c.precision), "smoothing"),
        Entry("strip-tail", "lower bound for the paired transform inside the strip",
              lambda c: smoothing.certify_strip_tail(c.params, c.spec, c.precision), "smoothing"),
        Entry("f-lower-bound", "f(u) >= kappa f(0) on [0, 59]",
              lambda c: smoothing.certify_f_lower_bound(c.params, c.spec, c.precision), "smoothing"),
    ]
    for p in PRIMES_BELOW_100:
        out.append(Entry(f"mp-{p}", f"printed lower bound m_{p} of the prime-{p} polynomial",
                         lambda c, p=p: trigpoly.certify_mp(p, precision=c.precision)[1], "table"))
    for p in PRIMES_BELOW_100:
        out.append(Entry(f"dG-sigma-{p}", f"the prime-{p} partial sum decreases in sigma",
                         lambda c, p=p: trigpoly.certify_dGp_dsigma_negative(p, c.params, c.poly, c.precision),
                         "table"))
    out += [
        Entry("trig-lower-bound", "the 0.1186 lower bound from the primes below 100",
              lambda c: trigpoly.trig_lower_bound_constant(c.poly, c.params, c.spec, mp_results=c.mp_results(),
                                                    precision=c.precision), "trig"),
        Entry("discard-tail", "dropped prime powers cannot spoil the 0.1186 bound",
              lambda c: trigpoly.discard_tail_bounds(c.params, c.poly, c.spec, mp_results=c.mp_results(),
                                                     precision=c.precision), "trig"),
        Entry("u-envelope-300", "logarithmic envelope of the digamma majorant",
              lambda c: bounds.verify_U_envelopes(300, c.precision), "errors"),
        Entry("error-term-constants", "per-shift explicit-formula error constants",
              lambda c: bounds.error_term_constants(c.params, c.spec, c.precision), "errors"),
        Entry("error-aggregation", "aggregated error constants 2353, 53 and 1601",
              lambda c: bounds.error_aggregation(c.params, c.spec, c.precision,
                                                     base=c.get("error-term-constants")), "errors"),
        Entry("zero-sum-tails", "tails of the sums over zeros",
              lambda c: bounds.zero_sum_tails(c.params, c.spec, c.precision, log_t_max=c.log_t_max), "errors"),
        Entry("digamma-sum", "the digamma main term and the -1.568 constant",
              lambda c: bounds.digamma_sum_constant(c.params, c.poly, c.spec, c.precision), "main"),
        Entry("pole-term", "the pole contribution 1e-10 eta",
              lambda c: bounds.pole_term_bound(c.params, c.spec, c.poly, c.precision), "main"),
        Entry("main-term-moments", "the moment polynomial C_1",
              lambda c: bounds.main_term_moments(c.params, c.spec, c.poly, c.precision), "main"),
        Entry("main-term-errors", "error constants of the main-term expansion",
              lambda c: bounds.main_term_errors(c.params, c.spec, c.poly, c.precision), "main"),
        Entry("main-term-combined", "the combined main-term lower bound",
              lambda c: bounds.main_term_combined(c.params, c.spec, c.poly, c.precision,
                                                  moments=c.get("main-term-moments"),
                                                  errors=c.get("main-term-errors")), "main"),
        Entry("parameter-table", "parameter table entries against recomputed values",
              lambda c: _zfr().parameter_table_check(c.params.A0, c.params, precision=c.precision), "theorem"),
        Entry("iteration", "the iteration step closing eta log t > A0 + eps",
              lambda c: _zfr().iteration_assembly(c.params, {i: c.get(i) for i in ITERATION_INPUTS},
                                                  log_t_max=c.log_t_max, spec=c.spec, poly=c.poly,
                                                  route=c.route, precision=c.precision).certificate, "theorem"),
    ]
    return out


def _zfr():
    from . import zfr
    return zfr


REGISTRY: dict[str, Entry] = {e.id: e for e in _entries()}

# shorthand accepted by ``verify --lemma`` alongside the ids themselves
ALIASES: dict[str, tuple[str, ...]] = {
    "table": tuple(f"mp-{p}" for p in PRIMES_BELOW_100),
    "monotonicity": tuple(f"dG-sigma-{p}" for p in PRIMES_BELOW_100),
}

# certificates the iteration step depends on; the printed per-prime table entries are not among them
# because the trig lower bound substitutes certified minima where a printed entry fails
ITERATION_INPUTS: tuple[str, ...] = (
    "trig-coefficients", "kappa-positivity", "boundary-nonnegativity", "strip-tail", "f-lower-bound",
    *(f"dG-sigma-{p}" for p in PRIMES_BELOW_100),
    "trig-lower-bound", "discard-tail", "error-term-constants", "error-aggregation", "zero-sum-tails",
    "digamma-sum", "pole-term", "main-term-moments", "main-term-errors", "main-term-combined",
)


class UnknownCertificate(KeyError):
    pass


def resolve(target: str) -> tuple[str, ...]:
    if target in REGISTRY:
        return (target,)
    if target in ALIASES:
        return ALIASES[target]
    raise UnknownCertificate(f"unknown lemma {target!r}")


def run(ids, ctx: Optional[SuiteContext] = None) -> dict[str, Certificate]:
    ctx = ctx or SuiteContext()
    return {i: ctx.get(i) for i in ids}
