"""Search for kappa vectors: minimax fits of 1/(1+x) and their feasibility.

A candidate is fitted by a grid linear program (minimise the largest deviation
on the grid), rounded to rationals with a common denominator below a cap, then
its sup error over [0, 1] is enclosed by interval subdivision. Scoring runs the
two positivity certificates on the normalized vector (leading coefficient one).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from . import reference as ref
from .certificate import Certificate, Status
from .exactnum import DEFAULT_PRECISION, Interval, iv
from .polycert import PolyQ
from .smoothing import ProofParams, SmoothingSpec, build_B_certificate, certify_kappa_polynomial, efficiency_constant

DENOMINATOR_CAP = 10**4


@dataclass
class CandidateKappa:
    """A kappa vector with its fit quality and, once scored, efficiency and feasibility.

    ``fit_coefficients`` is the raw minimax polynomial; ``coefficients`` is the same
    vector divided by its constant term, which is the form the test function uses.
    """

    degree: int
    coefficients: tuple[Fraction, ...]
    linf_error: Interval
    fit_coefficients: tuple[Fraction, ...] = ()
    efficiency: Optional[Fraction] = None
    feasible: Status = Status.INDETERMINATE
    certificates: dict[str, Certificate] = field(default_factory=dict, repr=False)
    label: str = ""

    @classmethod
    def from_coefficients(cls, coeffs: Sequence, label: str = "", precision: int = DEFAULT_PRECISION) -> "CandidateKappa":
        q = tuple(Fraction(c) for c in coeffs)
        return cls(len(q) - 1, normalize(q), linf_error(q, precision=precision), q, label=label)


def normalize(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    if coeffs[0] == 0:
        raise ValueError("constant coefficient is zero")
    return tuple(Fraction(c) / coeffs[0] for c in coeffs)


def _error_parts(coeffs: Sequence[Fraction]):
    """1/(1+x) - p(x) = r(x)/(1+x) with r(x) = 1 - (1+x) p(x)."""
    p = PolyQ(coeffs)
    r = PolyQ([1]) - PolyQ([1, 1]) * p
    return r, r.derivative()


def linf_error(coeffs: Sequence, cells: int = 2048, precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of max over [0, 1] of |1/(1+x) - sum c_m x^m|.

    The lower end is the largest exact value at the ends and cell centres; the upper end is
    the largest mean-value bound over the cells.
    """
    coeffs = [Fraction(c) for c in coeffs]
    r, dr = _error_parts(coeffs)
    lower = max(abs(r(Fraction(0))), abs(r(Fraction(1)) / 2))
    upper = iv(0, precision)
    for i in range(cells):
        a, b = Fraction(i, cells), Fraction(i + 1, cells)
        c = (a + b) / 2
        centre = abs(r(c) / (1 + c))
        lower = max(lower, centre)
        X = Interval.from_rational(a, precision).hull(Interval.from_rational(b, precision))
        # d/dx [r/(1+x)] = (r'(1+x) - r)/(1+x)^2
        slope = (dr.eval_interval(X) * (X + 1) - r.eval_interval(X)) / (X + 1).sqr()
        bound = centre + abs(slope) * ((b - a) / 2)
        if bound.hi > upper.hi:
            upper = bound
    return Interval(iv(lower, precision).lo, max(upper.hi, iv(lower, precision).hi), precision)


def _lp_fit(M: int, grid: np.ndarray) -> np.ndarray:
    target = 1.0 / (1.0 + grid)
    V = np.vander(grid, M + 1, increasing=True)
    n = M + 1
    # variables: kappa_0..kappa_M, t; minimise t subject to |target - V kappa| <= t
    c = np.zeros(n + 1)
    c[-1] = 1.0
    ones = np.ones((len(grid), 1))
    A = np.vstack([np.hstack([V, -ones]), np.hstack([-V, -ones])])
    b = np.concatenate([target, -target])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n + [(0, None)], method="highs")
    if not res.success:
        raise ArithmeticError(f"minimax linear program failed: {res.message}")
    return res.x[:n]


def _round_common(x: np.ndarray, cap: int, grid: np.ndarray) -> tuple[Fraction, ...]:
    """Best rounding to a common denominator q <= cap, judged on the grid."""
    target = 1.0 / (1.0 + grid)
    V = np.vander(grid, len(x), increasing=True)
    best, best_err = None, np.inf
    for q in range(1, cap + 1):
        num = np.round(x * q)
        err = np.max(np.abs(target - V @ (num / q)))
        if err < best_err:
            best, best_err = (q, num), err
    q, num = best
    return tuple(Fraction(int(n), q) for n in num)


def minimax_fit(M: int, grid_size: int = 400, *, denominator_cap: int = DENOMINATOR_CAP,
                precision: int = DEFAULT_PRECISION) -> CandidateKappa:
    """Near-equioscillating rational fit of 1/(1+x) on [0, 1] by a polynomial of degree M."""
    if M < 0:
        raise ValueError("degree must be nonnegative")
    if grid_size < 2 * M + 2 or grid_size < 2:
        raise ValueError(f"degenerate grid: need at least {2 * M + 2} points")
    # Chebyshev-clustered grid including both ends
    k = np.arange(grid_size)
    grid = (1 - np.cos(np.pi * k / (grid_size - 1))) / 2
    raw = _lp_fit(M, grid)
    coeffs = _round_common(raw, denominator_cap, grid)
    cand = CandidateKappa.from_coefficients(coeffs, label=f"minimax-{M}", precision=precision)
    return cand


def equioscillation_count(coeffs: Sequence, samples: int = 20001, rel_tol: float = 1e-3) -> int:
    """Number of alternating-sign extrema of the error that reach the maximum deviation."""
    x = np.linspace(0.0, 1.0, samples)
    err = 1.0 / (1.0 + x) - np.polyval([float(c) for c in reversed(coeffs)], x)
    peak = np.max(np.abs(err))
    count, last_sign, i = 0, 0, 0
    while i < samples:
        if abs(err[i]) >= peak * (1 - rel_tol):
            sign = 1 if err[i] > 0 else -1
            if sign != last_sign:
                count += 1
                last_sign = sign
            while i < samples and abs(err[i]) >= peak * (1 - rel_tol) and (err[i] > 0) == (sign > 0):
                i += 1
            continue
        i += 1
    return count


def score_candidate(c: CandidateKappa, params: ProofParams = ProofParams(),
                    template: SmoothingSpec = SmoothingSpec(), precision: int = DEFAULT_PRECISION) -> CandidateKappa:
    """Efficiency 1/sum kappa and feasibility from the two positivity certificates."""
    spec = SmoothingSpec(theta=template.theta, kappa=c.coefficients)
    certs: dict[str, Certificate] = {}
    certs["kappa-positivity"] = certify_kappa_polynomial(spec)
    try:
        certs["boundary-nonnegativity"] = build_B_certificate(params, spec, precision)
    except (ValueError, ArithmeticError) as exc:
        certs["boundary-nonnegativity"] = Certificate("boundary-nonnegativity", str(exc), Status.INDETERMINATE,
                                                      findings=[f"could not build: {exc}"])
    statuses = [x.status for x in certs.values()]
    if all(s is Status.PASS for s in statuses):
        feasible = Status.PASS
    elif any(s is Status.FAIL for s in statuses):
        feasible = Status.FAIL
    else:
        feasible = Status.INDETERMINATE
    try:
        eff = efficiency_constant(spec)
    except ZeroDivisionError:
        eff = None
    return replace(c, efficiency=eff, feasible=feasible, certificates=certs)


def reference_candidates(precision: int = DEFAULT_PRECISION) -> dict[str, CandidateKappa]:
    return {
        "published": CandidateKappa.from_coefficients(ref.KAPPA, "published", precision),
        "two-term": CandidateKappa.from_coefficients(ref.TWO_TERM_KAPPA, "two-term", precision),
        "single": CandidateKappa.from_coefficients((Fraction(1),), "single", precision),
    }


@dataclass
class Leaderboard:
    degree: int
    candidates: list[CandidateKappa]
    partial: bool
    hypothetical_limit: Fraction = ref.HYPOTHETICAL_EFFICIENCY


def search(M: int, budget: int = 8, *, params: ProofParams = ProofParams(), inject_published: bool = True,
           caps: Sequence[int] = (DENOMINATOR_CAP, 1000, 100), precision: int = DEFAULT_PRECISION) -> Leaderboard:
    """Fit degree-M candidates at several denominator caps, score them, rank feasible ones first."""
    if M > 12:
        raise ValueError("degree above 12 is outside the practical range")
    pool: list[CandidateKappa] = []
    if inject_published and M == len(ref.KAPPA) - 1:
        pool.append(reference_candidates(precision)["published"])
    for cap in caps:
        cand = minimax_fit(M, denominator_cap=cap, precision=precision)
        cand.label = f"minimax-{M}-q{cap}"
        if all(cand.coefficients != p.coefficients for p in pool):
            pool.append(cand)
    partial = len(pool) > budget
    scored = [score_candidate(c, params, precision=precision) for c in pool[:budget]]
    order = {Status.PASS: 0, Status.INDETERMINATE: 1, Status.FAIL: 2}
    scored.sort(key=lambda c: (order[c.feasible], -(c.efficiency or 0)))
    return Leaderboard(M, scored, partial)
