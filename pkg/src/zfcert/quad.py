"""Rigorous enclosures of one-dimensional integrals.

Each cell is integrated by its Taylor polynomial about the midpoint (interval
coefficients from :class:`~zfcert.taylor.Jet`) plus a Lagrange remainder whose
coefficient is enclosed over the whole cell. Cells where the integrand is not
smooth fall back to a range bound. Cells are bisected adaptively in order of
their contribution to the total width.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .exactnum import DomainError, Interval, iv, iv_from_rational, log, pi_interval, symmetric
from .taylor import Jet, NonSmooth

Endpoint = Union[Fraction, int, Interval, float]
JetFunction = Callable[[Jet], Jet]


class QuadratureIndeterminate(ArithmeticError):
    """The requested tolerance could not be reached within the cell budget."""


@dataclass(frozen=True)
class IntegrandSpec:
    """An integrand over ``[lower, upper]``.

    ``integrand`` maps a :class:`Jet` in the integration variable to a Jet. The
    upper endpoint may be an :class:`Interval` (irrational endpoint) or
    ``math.inf``; the latter requires ``tail_bound``, a function returning an
    upper bound for the integral of |integrand| over ``[truncation, inf)``.
    """

    integrand: JetFunction
    lower: Endpoint
    upper: Endpoint
    tail_bound: Optional[Callable[[Fraction, int], Interval]] = None
    truncation: Optional[Fraction] = None
    breakpoints: Sequence[Fraction] = field(default_factory=tuple)
    description: str = ""

    def __post_init__(self):
        if self.upper == math.inf:
            if self.tail_bound is None:
                raise ValueError("semi-infinite integrals need a tail bound")
            if self.truncation is None:
                raise ValueError("semi-infinite integrals need a truncation point")


def _exact_cut(x: Endpoint, side: str) -> Fraction:
    if isinstance(x, Interval):
        return x.lower_fraction() if side == "lo" else x.upper_fraction()
    if isinstance(x, float):
        return Fraction(x)
    return Fraction(x)


def _cell_interval(a: Fraction, b: Fraction, prec: int) -> Interval:
    return Interval(iv_from_rational(a, prec).lo, iv_from_rational(b, prec).hi, prec)


def range_enclosure(f: JetFunction, a: Fraction, b: Fraction, prec: int) -> Interval:
    """First-order bound: (b - a) times the range of f over the cell."""
    values = f(Jet.variable(_cell_interval(a, b, prec), 0)).value
    return values * (b - a)


def _taylor_cell(f: JetFunction, a: Fraction, b: Fraction, order: int, prec: int) -> Interval:
    c = (a + b) / 2
    r = (b - a) / 2
    center = iv_from_rational(c, prec)
    try:
        whole = f(Jet.variable(_cell_interval(a, b, prec), order + 1))
        local = f(Jet.variable(center, order))
    except (NonSmooth, DomainError):
        return range_enclosure(f, a, b, prec)
    rr = iv_from_rational(r, prec)
    total = iv(0, prec)
    power = rr
    for k in range(order + 1):
        if k % 2 == 0:
            total = total + local.c[k] * power * Fraction(2, k + 1)
        power = power * rr
    # power == r**(order+2); order+1 is even so h**(order+1) >= 0 on the cell
    rem = whole.c[order + 1] * power * Fraction(2, order + 2)
    if (order + 1) % 2 == 1:
        m = rem.mag()
        rem = symmetric(m, prec)
    return total + rem


def integrate_cells(f: JetFunction, a: Fraction, b: Fraction, *, prec: int, tol: float,
                    order: int = 11, max_cells: int = 5000, initial: int = 1) -> tuple[Interval, int, bool]:
    """Adaptive Taylor integration on a rational interval; returns (enclosure, cells, converged)."""
    if b < a:
        raise ValueError("empty domain")
    if a == b:
        return iv(0, prec), 0, True
    step = (b - a) / initial
    heap = []
    counter = 0
    for i in range(initial):
        lo, hi = a + step * i, a + step * (i + 1)
        enc = _taylor_cell(f, lo, hi, order, prec)
        heap.append((-float(enc.width()), counter, lo, hi, enc))
        counter += 1
    heapq.heapify(heap)
    total_width = sum(-h[0] for h in heap)
    while len(heap) < max_cells:
        if total_width <= tol or -heap[0][0] * len(heap) <= tol or counter % 256 == 0:
            # the running float total drifts after cancelling huge widths, so resum before
            # stopping and periodically while refining
            total_width = math.fsum(-h[0] for h in heap)
            if total_width <= tol:
                break
        negw, _, lo, hi, enc = heapq.heappop(heap)
        total_width += negw
        mid = (lo + hi) / 2
        for x0, x1 in ((lo, mid), (mid, hi)):
            e = _taylor_cell(f, x0, x1, order, prec)
            w = float(e.width())
            heapq.heappush(heap, (-w, counter, x0, x1, e))
            counter += 1
            total_width += w
    total = iv(0, prec)
    for cell in sorted(heap, key=lambda h: h[2]):
        total = total + cell[4]
    return total, len(heap), float(total.width()) <= tol


def _sliver(f: JetFunction, endpoint: Interval, prec: int) -> Interval:
    """Enclosure of the integral from endpoint.lo to the true endpoint (somewhere in the interval)."""
    if endpoint.is_point():
        return iv(0, prec)
    a, b = endpoint.lower_fraction(), endpoint.upper_fraction()
    values = f(Jet.variable(_cell_interval(a, b, prec), 0)).value
    width = iv_from_rational(b - a, prec)
    part = values * width
    zero = iv(0, prec)
    return part.hull(zero)


def integrate_enclosure(spec: IntegrandSpec, precision: int = 128, *, tol: float = 1e-12,
                        order: int = 11, max_cells: int = 5000, strict: bool = False) -> Interval:
    """Interval containing the exact integral described by ``spec``.

    With ``strict`` the call raises :class:`QuadratureIndeterminate` when the enclosure
    width exceeds ``tol`` after ``max_cells`` cells; otherwise the (valid) wider
    enclosure is returned.
    """
    f = spec.integrand
    prec = precision
    lo_cut = _exact_cut(spec.lower, "hi")
    pieces = iv(0, prec)
    if isinstance(spec.lower, Interval):
        pieces = pieces - _sliver(f, spec.lower, prec)
    if spec.upper == math.inf:
        hi_cut = Fraction(spec.truncation)
        tail = spec.tail_bound(hi_cut, prec)
        m = tail.hi
        pieces = pieces + symmetric(m, prec)
    else:
        hi_cut = _exact_cut(spec.upper, "lo")
        if isinstance(spec.upper, Interval):
            pieces = pieces + _sliver(f, spec.upper, prec)
    cuts = [lo_cut] + sorted(Fraction(x) for x in spec.breakpoints if lo_cut < x < hi_cut) + [hi_cut]
    converged = True
    budget = max(tol, 0.0) / max(1, len(cuts) - 1)
    for a, b in zip(cuts, cuts[1:]):
        enc, _, ok = integrate_cells(f, a, b, prec=prec, tol=budget, order=order, max_cells=max_cells)
        pieces = pieces + enc
        converged = converged and ok
    if strict and (not converged or float(pieces.width()) > tol):
        raise QuadratureIndeterminate(f"width {float(pieces.width()):.3g} exceeds {tol:.3g}")
    return pieces


def riemann_enclosure(f: JetFunction, a: Fraction, b: Fraction, cells: int, prec: int = 128) -> Interval:
    """Plain interval Riemann sum: an independent, slowly converging oracle."""
    step = (Fraction(b) - Fraction(a)) / cells
    total = iv(0, prec)
    for i in range(cells):
        total = total + range_enclosure(f, a + step * i, a + step * (i + 1), prec)
    return total


# closed-form antiderivative families -------------------------------------------

def closed_form_tail(kind: str, prec: int = 128, **p) -> Interval:
    """Enclosures of exact antiderivative expressions used for zero-sum tail estimates.

    kinds:
      ``phi_log``      integral over [T0, inf) of (x^-2 + (x+2kt)^-2) log((kt+x)/2pi), as
                       (1/T0 + 1/(2kt+T0)) log((kt+T0)/2pi) + log(2kt+T0)/(kt) - log(T0)/(kt)
      ``phi_at_T``     ((T-kt)^-2 + (T+kt)^-2) log T with T = K t + T0
      ``phi_over_x``   integral over [T0, inf) of (x^-2 + (x+2kt)^-2)/x
      ``reflected``    log((kt+T0)/2pi)/(2kt+T0); t may be math.inf (limit 0)
      ``log_cube``     integral over [Y, inf) of log(c y)/y^3 = (2 log(cY) + 1)/(4 Y^2)
      ``cube_weight``  integral over R of (a^2 + y^2)^(-3/2) = 2/a^2
    """
    two_pi = pi_interval(prec) * 2
    if kind in ("phi_log", "phi_at_T", "phi_over_x", "reflected"):
        k = p["k"]
        t = p["t"]
        T0 = iv(p["T0"], prec)
        if kind == "reflected" and t == math.inf:
            return iv(0, prec)
        kt = iv(t, prec) * k
        if "H" in p and kt.certainly_lt(iv(p["H"], prec)):
            raise ValueError("parameter out of range: need kt >= H")
        if kind == "phi_log":
            lg = log((kt + T0) / two_pi)
            return (1 / T0 + 1 / (kt * 2 + T0)) * lg + log(kt * 2 + T0) / kt - log(T0) / kt
        if kind == "reflected":
            return log((kt + T0) / two_pi) / (kt * 2 + T0)
        if kind == "phi_at_T":
            T = iv(t, prec) * p["K"] + T0
            return (1 / (T - kt) ** 2 + 1 / (T + kt) ** 2) * log(T)
        b = kt * 2
        return 1 / (T0 ** 2 * 2) + log((T0 + b) / T0) / b ** 2 - 1 / (b * (T0 + b))
    if kind == "log_cube":
        Y = iv(p["Y"], prec)
        c = iv(p.get("c", 1), prec)
        if not Y.certainly_gt(0) or not (c * Y).certainly_ge(1):
            raise ValueError("parameter out of range: need Y > 0 and cY >= 1")
        return (log(c * Y) * 2 + 1) / (Y ** 2 * 4)
    if kind == "cube_weight":
        a = iv(p["a"], prec)
        return 2 / a ** 2
    raise ValueError(f"unknown closed-form family {kind!r}")
