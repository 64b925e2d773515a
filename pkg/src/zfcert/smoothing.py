"""The compactly supported weight w, its Laplace transform W, the test function built from
it, and the certificates about them that the rest of the proof relies on."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from . import reference as ref
from .certificate import Certificate, CertificateBuilder, Status, with_escalation
from .exactnum import (DEFAULT_PRECISION, DomainError, Interval, exp, iv, iv_from_rational, log,
                       pi_interval)
from .polycert import Domain, PolyQ, certify_positive, sturm_real_root_count
from .quad import IntegrandSpec, integrate_enclosure
from .taylor import Jet


@dataclass(frozen=True)
class SmoothingSpec:
    """Angle parameter of the weight plus the exponential-sum coefficients of the test function."""

    theta: Fraction = ref.THETA
    kappa: tuple[Fraction, ...] = ref.KAPPA

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        object.__setattr__(self, "kappa", tuple(Fraction(k) for k in self.kappa))
        if not self.kappa:
            raise ValueError("kappa must have at least one coefficient")
        if not (0 < self.theta < Fraction(157, 100)):
            raise ValueError("theta must lie in (0, pi/2)")

    @property
    def M(self) -> int:
        return len(self.kappa) - 1

    @property
    def kappa_sum(self) -> Fraction:
        return sum(self.kappa, Fraction(0))

    @property
    def kappa_abs_sum(self) -> Fraction:
        return sum((abs(k) for k in self.kappa), Fraction(0))

    @property
    def is_normalized(self) -> bool:
        """Leading coefficient one and positive coefficient sum."""
        return self.kappa[0] == 1 and self.kappa_sum > 0

    def support_end(self, prec: int = DEFAULT_PRECISION) -> Interval:
        """Right end of the support of w, 2 theta cot theta."""
        t = iv(self.theta, prec)
        return t * 2 * t.cot()


@dataclass(frozen=True)
class ProofParams:
    """Height, smoothing and cutoff parameters shared by all certificates."""

    A0: Fraction = ref.A0_MAIN
    H: Fraction = ref.H
    T0: Fraction = ref.T0
    K: int = ref.K
    log_n_cutoff: int = ref.LOG_N_CUTOFF
    prime_cutoff: int = ref.PRIME_CUTOFF
    power_cutoff: int = ref.POWER_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, "A0", Fraction(self.A0))
        object.__setattr__(self, "H", Fraction(self.H))
        object.__setattr__(self, "T0", Fraction(self.T0))
        if not (Fraction(1, 6) < self.A0 <= Fraction(100, 485)):
            raise ValueError("A0 must lie in (1/6, 1/4.85]")

    def eta0(self, prec: int = DEFAULT_PRECISION) -> Interval:
        return iv(self.A0, prec) / log(iv(self.H, prec))

    def log_height(self, prec: int = DEFAULT_PRECISION) -> Interval:
        """log(K H + T0), the logarithm defining sigma0."""
        return log(iv(self.H * self.K + self.T0, prec))

    def sigma0(self, prec: int = DEFAULT_PRECISION) -> Interval:
        return 1 - iv(self.A0, prec) / self.log_height(prec)

    def mu0(self, prec: int = DEFAULT_PRECISION) -> Interval:
        """(1 - sigma0)/eta0 - 1e-10, which simplifies to log H / log(KH + T0) - 1e-10."""
        return log(iv(self.H, prec)) / self.log_height(prec) - Fraction(1, 10**10)

    def x0(self, prec: int = DEFAULT_PRECISION) -> Interval:
        return self.sigma0(prec) - Fraction(1, 2)

    def slope0(self, prec: int = DEFAULT_PRECISION) -> Interval:
        """2 sigma0 - 1."""
        return self.sigma0(prec) * 2 - 1

    def d(self, m: int, kappa_m: Fraction, prec: int = DEFAULT_PRECISION) -> Interval:
        """Worst-case decay rate of the m-th exponential: (2 sigma0 - 1) m if kappa_m < 0, else m."""
        if kappa_m < 0:
            return self.slope0(prec) * m
        return iv(m, prec)

    def check_invariants(self, prec: int = DEFAULT_PRECISION) -> dict[str, bool]:
        mu = self.mu0(prec)
        return {
            "eta0 < 0.008": self.eta0(prec).certainly_lt(Fraction(8, 1000)),
            "sigma0 > 0.99": self.sigma0(prec).certainly_gt(Fraction(99, 100)),
            "0.9 < mu0 < 1": mu.certainly_gt(Fraction(9, 10)) and mu.certainly_lt(1),
        }


# the weight w ---------------------------------------------------------------------

@lru_cache(maxsize=64)
def _w_constants(theta: Fraction, prec: int) -> dict[str, Interval]:
    t = iv(theta, prec)
    sec2 = t.sec() ** 2
    tan = t.tan()
    return {
        "theta": t,
        "sec2": sec2,
        "tan": tan,
        "tcot": t * t.cot(),
        "csc": t.csc(),
        "csc2t": (t * 2).csc(),
        "support": t * 2 * t.cot(),
    }


def w_jet(u: Jet, spec: SmoothingSpec) -> Jet:
    """The closed form of w applied to a jet (valid on the support [0, 2 theta cot theta])."""
    k = _w_constants(spec.theta, u.prec)
    ut = u * k["tan"]
    cos_ut = ut.cos()
    inner = (k["tcot"] - u * Fraction(1, 2)) * cos_ut * k["sec2"]
    inner = inner + k["tcot"] * 2 - u
    inner = inner + (k["theta"] * 2 - ut).sin() * k["csc2t"]
    inner = inner - ((k["theta"] - ut).sin() * k["csc"] + 1) * 2
    return inner * k["sec2"]


def w0(spec: SmoothingSpec = SmoothingSpec(), prec: int = DEFAULT_PRECISION) -> Interval:
    """w(0) from its simplified closed form sec^2(theta) (theta tan theta + 3 theta cot theta - 3)."""
    k = _w_constants(spec.theta, prec)
    return k["sec2"] * (k["theta"] * k["tan"] + k["tcot"] * 3 - 3)


def eval_w(u, spec: SmoothingSpec = SmoothingSpec(), prec: Optional[int] = None) -> Interval:
    """Enclosure of w over the interval u; zero off the support, hull with zero across its ends."""
    u = iv(u, prec or DEFAULT_PRECISION)
    p = prec or u.prec
    end = _w_constants(spec.theta, p)["support"]
    zero = iv(0, p)
    if u.hi < 0 or u.lo > end.hi:
        return zero
    lo = max(u.lo, zero.lo)
    hi = min(u.hi, end.hi)
    inside = Interval(lo, hi, p)
    value = w_jet(Jet.variable(inside, 0), spec).value
    if u.lo < 0 or u.hi >= end.lo:
        value = value.hull(zero)
    return value


def eval_w_jet(u: Jet, spec: SmoothingSpec) -> Jet:
    """w as a jet. Off the support the jet is zero; w is smooth enough at the support end for
    the jets used here only when the expansion point is strictly inside or strictly outside."""
    end = _w_constants(spec.theta, u.prec)["support"]
    x = u.value
    if x.lo > end.hi or x.hi < 0:
        return Jet.constant(0, u.order, u.prec)
    if x.lo >= 0 and x.hi < end.lo:
        return w_jet(u, spec)
    if u.order == 0:
        return Jet([eval_w(x, spec, u.prec)])
    from .taylor import NonSmooth
    raise NonSmooth("jet of w requested across the end of its support")


def eval_W_real(x, spec: SmoothingSpec = SmoothingSpec(), precision: int = DEFAULT_PRECISION, *,
                tol: float = 1e-14) -> Interval:
    """Enclosure of W(x) = integral over [0, 2 theta cot theta] of exp(-x u) w(u) du."""
    xv = iv(x, precision)
    end = spec.support_end(precision)
    scale = max(1.0, abs(float(xv.mid())))
    integral = IntegrandSpec(lambda u: (u * (-xv)).exp() * w_jet(u, spec), 0, end,
                             description="Laplace transform of w")
    return integrate_enclosure(integral, precision, tol=tol / scale, max_cells=20000)


# Ford's tail bound -----------------------------------------------------------------

def ford_constants(spec: SmoothingSpec = SmoothingSpec(), prec: int = DEFAULT_PRECISION) -> dict[str, Interval]:
    """The constants ford_c0..ford_c3 of the tail bound (distinct from the moment integrals)."""
    t = iv(spec.theta, prec)
    s, c, tn = t.sin(), t.cos(), t.tan()
    gap = t - s * c
    return {
        "ford_c0": t.csc() * t.sec() ** 2,
        "ford_c1": gap * tn ** 4,
        "ford_c2": tn ** 3 * s ** 2,
        "ford_c3": gap * tn ** 2,
    }


def ford_C(nu, r, spec: SmoothingSpec = SmoothingSpec(), prec: int = DEFAULT_PRECISION) -> Interval:
    """Constant C(nu, r) with |W(z) - w(0)/z| <= C |z|^-3 for Re z >= nu, |z| >= r."""
    nu = iv(nu, prec)
    r = iv(r, prec)
    k = ford_constants(spec, prec)
    tan = iv(spec.theta, prec).tan()
    if not r.certainly_gt(tan):
        raise DomainError(f"ford_C needs r > tan(theta) = {float(tan.mid()):.6f}, got {r!r}")
    tcot = _w_constants(spec.theta, prec)["tcot"]
    top = k["ford_c2"] * (r + 1) ** 2 * (exp(nu * tcot * (-2)) + 1) + k["ford_c1"] * r + k["ford_c3"] * r ** 3
    return k["ford_c0"] * r * top / (r ** 2 - tan ** 2) ** 2


def ford_tail_real(x, spec: SmoothingSpec = SmoothingSpec(), prec: int = DEFAULT_PRECISION) -> Interval:
    """Certified x^3 |W(x) - w(0)/x| at a real rational x > 0, for auditing the tail bound."""
    x = Fraction(x)
    tail = eval_W_real(x, spec, prec, tol=1e-18) - w0(spec, prec) / x
    return abs(tail) * iv(x, prec) ** 3


# coefficient algebra -----------------------------------------------------------------

def b_coefficients(spec: SmoothingSpec = SmoothingSpec()) -> list[Fraction]:
    """Coefficients of (1 + x) * sum kappa_m x^m."""
    k = list(spec.kappa)
    return [(k[m] if m < len(k) else 0) + (k[m - 1] if m >= 1 else 0) for m in range(len(k) + 1)]


def efficiency_constant(spec) -> Fraction:
    """1 / sum kappa_m, the leading efficiency of the test function family."""
    kappa = spec.kappa if isinstance(spec, SmoothingSpec) else tuple(Fraction(k) for k in spec)
    total = sum(kappa, Fraction(0))
    if total == 0:
        raise ZeroDivisionError("kappa coefficients sum to zero")
    return 1 / total


def certify_kappa_polynomial(spec: SmoothingSpec = SmoothingSpec()) -> Certificate:
    """sum kappa_m x^m > 0 on (0, 1], which makes the test function nonnegative."""
    p = PolyQ(spec.kappa)
    cert = certify_positive(p, Domain(Fraction(0), Fraction(1), False, True), cert_id="kappa-positivity",
                            claim="sum kappa_m x^m > 0 for 0 < x <= 1")
    cert.witness["p_at_1"] = p(1)
    return cert


# boundary certificate -----------------------------------------------------------------

def _shift_pieces(spec: SmoothingSpec, eps: Fraction, slab: Fraction):
    """For each m >= 1, the rational B_m(y) = num / (y^2 + s) chosen by the sign of b_m."""
    pieces = []
    for m, bm in enumerate(b_coefficients(spec)):
        if m == 0:
            continue
        if bm <= 0:
            pieces.append((m, bm, m + eps / m, slab ** 2 * m ** 2))
        else:
            pieces.append((m, bm, m - eps / m, Fraction(m * m)))
    return pieces


def boundary_polynomials(spec: SmoothingSpec = SmoothingSpec(), eps: Fraction = ref.EPSILON0,
                         slab: Fraction = ref.SLAB_C0) -> tuple[PolyQ, PolyQ, list[Fraction]]:
    """(numerator, monic denominator, denominator shifts) with B(y) = numerator / denominator."""
    pieces = _shift_pieces(spec, eps, slab)
    factors = [PolyQ([s, 0, 1]) for _, _, _, s in pieces]
    denominator = PolyQ([1])
    for f in factors:
        denominator = denominator * f
    numerator = PolyQ()
    for i, (m, bm, num, _) in enumerate(pieces):
        if bm == 0:
            continue
        term = PolyQ([bm * num])
        for j, f in enumerate(factors):
            if j != i:
                term = term * f
        numerator = numerator + term
    return numerator, denominator, [s for *_, s in pieces]


def _printed_shift_match(shifts: list[Fraction]) -> bool:
    return sorted(shifts) == sorted(ref.Q_CERT_SHIFTS)


def build_B_certificate(params: ProofParams = ProofParams(), spec: SmoothingSpec = SmoothingSpec(),
                        precision: int = DEFAULT_PRECISION) -> Certificate:
    """Nonnegativity of the boundary rational function B(y) on the whole real line."""
    b = CertificateBuilder("boundary-nonnegativity", "B(y) = p(y)/q(y) > 0 for all real y")
    eps, slab = ref.EPSILON0, ref.SLAB_C0
    prec = precision
    # parameter conditions that justify the piecewise minorant
    slope = params.slope0(prec)
    eta = params.eta0(prec)
    b.less("slab_below_slope", iv(slab, prec), slope, claim="151/153 < 2 sigma0 - 1")
    b.greater("shift_real_part", slope / eta, 138, claim="(2 sigma0 - 1)/eta0 > 138")
    eps_value = eta ** 2 * ford_C(138, 138, spec, prec) / (slope ** 2 * w0(spec, prec))
    b.less("epsilon0", eps_value, eps, claim="eta0^2 C(138,138) / ((2 sigma0 - 1)^2 w(0)) < 1/2000")
    if not (slope / eta).certainly_gt(138):
        # the printed 138 is only a convenient floor; the argument closes with any r it clears
        b.greater("shift_real_part_137", slope / eta, 137, required=False, claim="(2 sigma0 - 1)/eta0 > 137")
        eps_137 = eta ** 2 * ford_C(137, 137, spec, prec) / (slope ** 2 * w0(spec, prec))
        b.less("epsilon0_137", eps_137, eps, required=False,
               claim="eta0^2 C(137,137) / ((2 sigma0 - 1)^2 w(0)) < 1/2000")
        b.note("(2 sigma0 - 1)/eta0 falls below the printed 138; with 137 in its place the "
               "epsilon0 bound still holds (see the advisory checks)")

    numerator, denominator, shifts = boundary_polynomials(spec, eps, slab)
    coeffs = b_coefficients(spec)
    b.witness["b_coefficients"] = coeffs
    b.witness["denominator_shifts"] = shifts
    b.add("denominator_factors_positive", "each factor y^2 + s of q has s > 0", all(s > 0 for s in shifts),
          detail=f"shifts {[str(s) for s in shifts]}")
    q_cert = certify_positive(denominator, None, cert_id="denominator-positive", claim="q(y) > 0 on R")
    b.include("denominator_positive", q_cert)

    if spec.kappa == ref.KAPPA:
        printed_p = PolyQ([ref.P_CERT.get(i, 0) for i in range(13)])
        scaled = numerator.scale(ref.Q_CERT_SCALE)
        b.witness["scaled_numerator"] = [int(c) if c.denominator == 1 else c for c in scaled.coeffs]
        mismatched = [i for i in range(13) if scaled.coeffs[i] != printed_p.coeffs[i]] \
            if scaled.degree == 12 else list(range(13))
        b.add("numerator_matches_printed", "scale * numerator equals the printed p(y) coefficient by coefficient",
              not mismatched, detail="all 13 coefficients equal" if not mismatched else f"differs at {mismatched}")
        b.add("denominator_matches_printed", "denominator shifts equal 1, 9, 25, 4c0^2, 16c0^2, 36c0^2, 49c0^2",
              _printed_shift_match(shifts))
        b.witness["leading_coefficient"] = scaled.leading
        b.witness["constant_coefficient"] = scaled.coeffs[0]
        p_poly = printed_p
    else:
        p_poly = numerator
    if p_poly.is_zero():
        b.add("numerator_nonzero", "p is not identically zero", False)
        return b.build()
    roots = sturm_real_root_count(p_poly)
    b.witness["numerator_real_roots"] = roots
    b.add("numerator_no_real_roots", "p(y) has no real roots", roots == 0, detail=f"{roots} distinct real roots")
    p0 = p_poly(0)
    b.witness["p_at_0"] = p0
    b.add("numerator_positive_at_0", "p(0) > 0", p0 > 0, detail=f"p(0) = {p0}")
    b.note("The extension from the boundary line to the full strip is an assumed analytic step.")
    return b.build()


def certify_strip_tail(params: ProofParams = ProofParams(), spec: SmoothingSpec = SmoothingSpec(),
                       precision: int = DEFAULT_PRECISION) -> Certificate:
    """The 44 eta / |Im z|^2 loss on -eta <= Re z <= 1, |Im z| >= T0."""
    prec = precision
    b = CertificateBuilder("strip-tail", "Re F(z) + Re F(2 sigma - 1 - conj z) > -44 eta / |Im z|^2")
    eta = params.eta0(prec)
    r = iv(params.T0, prec) / eta
    shift = w0(spec, prec) + (ford_C(-1, r, spec, prec) + ford_C(0, r, spec, prec)) * eta ** 2 / params.T0
    b.less("shift_constant", shift, ref.TAIL_57, claim="w(0) + (C(-1,T0/eta0) + C(0,T0/eta0)) eta0^2 / T0 < 5.7")
    total = iv(spec.kappa_abs_sum, prec) * ref.TAIL_57 * 2
    b.less("total_constant", total, ref.TAIL_44, claim="2 * 5.7 * sum |kappa_m| < 44")
    return b.build()


# the lower bound f(u) >= kappa f(0) on [0, 59] -------------------------------------------

def f_gap_jet(u: Jet, params: ProofParams, spec: SmoothingSpec) -> Jet:
    """-kappa w(0) + w(eta0 u) sum kappa_m exp(-d_m u)."""
    prec = u.prec
    eta = params.eta0(prec)
    total = None
    for m, km in enumerate(spec.kappa):
        if km == 0:
            continue
        term = (u * (-params.d(m, km, prec))).exp() * km
        total = term if total is None else total + term
    weight = eval_w_jet(u * eta, spec)
    return weight * total - w0(spec, prec) * spec.kappa_sum


def certify_f_lower_bound(params: ProofParams = ProofParams(), spec: SmoothingSpec = SmoothingSpec(),
                          precision: int = DEFAULT_PRECISION, *, upper: Fraction = Fraction(ref.F_LOWER_RANGE),
                          max_cells: int = 200000) -> Certificate:
    """-kappa w(0) + w(eta0 u) sum kappa_m e^{-d_m u} >= 0 on [0, upper].

    The expression vanishes at u = 0, so a first segment [0, u*] is handled by a positive
    lower bound on the derivative over the whole segment; the rest is covered by
    mean-value enclosures on adaptively bisected cells.
    """
    def build(prec: int) -> Certificate:
        b = CertificateBuilder("f-lower-bound", f"f(u) >= kappa f(0) for 0 <= u <= {upper}")
        value0 = f_gap_jet(Jet.variable(iv(0, prec), 0), params, spec).value
        b.witness["value_at_0"] = value0
        # initial segment: largest u* = 2^-j with the derivative enclosure positive
        ustar = None
        for j in range(0, 40):
            cand = Fraction(1, 2 ** j)
            cell = Interval(iv(0, prec).lo, iv_from_rational(cand, prec).hi, prec)
            deriv = f_gap_jet(Jet.variable(cell, 1), params, spec).c[1]
            if deriv.certainly_gt(0):
                ustar = cand
                b.enclosures["derivative_on_initial_segment"] = deriv
                break
        b.add("initial_segment", "derivative > 0 on [0, u*] and the expression is 0 at u = 0",
              ustar is not None and value0.contains(0),
              detail=f"u* = {ustar}")
        if ustar is None:
            return b.build()
        b.witness["initial_segment_end"] = ustar
        stack = [(ustar, Fraction(upper))]
        cells = 0
        worst = None
        undecided = None
        while stack:
            lo, hi = stack.pop()
            cells += 1
            if cells > max_cells:
                undecided = (lo, hi)
                break
            cellv = Interval(iv_from_rational(lo, prec).lo, iv_from_rational(hi, prec).hi, prec)
            mid = iv_from_rational((lo + hi) / 2, prec)
            centre = f_gap_jet(Jet.variable(mid, 0), params, spec).value
            slope = f_gap_jet(Jet.variable(cellv, 1), params, spec).c[1]
            bound = centre + slope * (cellv - mid)
            if bound.lo > 0:
                if worst is None or bound.lo < worst:
                    worst = bound.lo
                continue
            if centre.hi <= 0:
                b.add("cells_positive", "expression > 0 on every cell", False,
                      detail=f"value at {float((lo + hi) / 2)} is {centre!r}")
                return b.build()
            if hi - lo < Fraction(1, 2 ** 40):
                undecided = (lo, hi)
                break
            m = (lo + hi) / 2
            stack.append((m, hi))
            stack.append((lo, m))
        b.witness["cells"] = cells
        b.add("cells_positive", f"expression > 0 on every cell of [u*, {upper}]",
              None if undecided else True,
              detail=f"{cells} cells, smallest lower bound {float(worst) if worst is not None else 'n/a'}"
              if not undecided else f"undecided near {float(undecided[0])}")
        end_value = f_gap_jet(Jet.variable(iv(Fraction(upper), prec), 0), params, spec).value
        b.enclosures["value_at_end"] = end_value
        return b.build()

    return with_escalation(build, precision)
