"""Exact univariate polynomials over the rationals, Sturm chains and positivity certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import gmpy2
from gmpy2 import mpz

from .certificate import Certificate, CertificateBuilder
from .exactnum import DEFAULT_PRECISION, Interval, iv, iv_from_rational

_MPZ = type(mpz())


class PolyQ:
    """Dense polynomial with Fraction coefficients in ascending degree order."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Fraction(int(x)) if isinstance(x, _MPZ) else Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def from_scaled_integers(cls, ints: Sequence[int], denominator: int = 1) -> "PolyQ":
        return cls(Fraction(int(n), int(denominator)) for n in ints)

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "PolyQ":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "PolyQ":
        p = cls([lead])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyQ) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return "PolyQ(0)"
        terms = [f"{c}*y^{i}" for i, c in enumerate(self.coeffs) if c]
        return "PolyQ(" + " + ".join(terms) + ")"

    def __add__(self, other) -> "PolyQ":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return PolyQ(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "PolyQ":
        return PolyQ(-x for x in self.coeffs)

    def __sub__(self, other) -> "PolyQ":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "PolyQ":
        return _as_poly(other) - self

    def __mul__(self, other) -> "PolyQ":
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return PolyQ()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return PolyQ(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PolyQ":
        out = PolyQ([1])
        for _ in range(n):
            out = out * self
        return out

    def scale(self, c) -> "PolyQ":
        c = Fraction(c)
        return PolyQ(x * c for x in self.coeffs)

    def derivative(self) -> "PolyQ":
        return PolyQ(c * i for i, c in enumerate(self.coeffs) if i > 0)

    def integral(self) -> "PolyQ":
        return PolyQ([0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def __call__(self, x):
        if isinstance(x, Interval):
            return self.eval_interval(x)
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_interval(self, x: Interval) -> Interval:
        """Horner evaluation in interval arithmetic (valid, not always tight)."""
        acc = iv(0, x.prec)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_centered(self, x: Interval) -> Interval:
        """Mean-value form p(c) + p'(X)(X - c); tighter than Horner on narrow X."""
        c = x.mid()
        pc = self.eval_interval(Interval(c, c, x.prec))
        slope = self.derivative().eval_interval(x)
        return (pc + slope * (x - Interval(c, c, x.prec))).intersect(self.eval_interval(x))

    def compose_affine(self, a, b) -> "PolyQ":
        """p(a*y + b)."""
        lin = PolyQ([b, a])
        out = PolyQ()
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def divmod(self, other: "PolyQ") -> tuple["PolyQ", "PolyQ"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        q = [Fraction(0)] * max(0, len(r) - len(other.coeffs) + 1)
        lead = other.leading
        dg = other.degree
        while len(r) - 1 >= dg and r:
            shift = len(r) - 1 - dg
            factor = r[-1] / lead
            q[shift] = factor
            for i, c in enumerate(other.coeffs):
                r[shift + i] -= factor * c
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        return PolyQ(q), PolyQ(r)

    def integer_primitive(self) -> tuple[list[int], Fraction]:
        """(ints, s) with self = s * poly(ints), ints primitive with positive leading coefficient."""
        if self.is_zero():
            raise ValueError("zero polynomial")
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return [v // g for v in ints], Fraction(g, den)


def _as_poly(x) -> PolyQ:
    return x if isinstance(x, PolyQ) else PolyQ([x])


def poly_gcd(a: PolyQ, b: PolyQ) -> PolyQ:
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    if a.is_zero():
        return a
    return a.scale(1 / a.leading)


def square_free_part(p: PolyQ) -> PolyQ:
    g = poly_gcd(p, p.derivative())
    if g.degree <= 0:
        return p
    return p.divmod(g)[0]


# integer kernels -----------------------------------------------------------------

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _primitive(c: list[int]) -> list[int]:
    g = mpz(0)
    for v in c:
        g = gmpy2.gcd(g, v)
        if g == 1:
            return c
    return [v // g for v in c] if g > 1 else c


def _int_gcd_poly(a: list[int], b: list[int]) -> list[int]:
    """Primitive GCD of integer polynomials via primitive pseudo-remainders."""
    a, b = _primitive(list(a)), _primitive(list(b))
    while b:
        a, b = b, _prem_primitive(a, b)
    if a and a[-1] < 0:
        a = [-v for v in a]
    return a


def _prem_primitive(f: list[int], g: list[int]) -> list[int]:
    """Primitive part of the remainder of f by g, scaled by a positive constant."""
    r = list(f)
    dg = len(g) - 1
    lg = g[-1]
    alg = abs(lg)
    sg = 1 if lg > 0 else -1
    while r and len(r) - 1 >= dg:
        lr = r[-1]
        s = len(r) - 1 - dg
        r = [v * alg for v in r]
        lrs = lr * sg
        for i in range(dg + 1):
            r[s + i] -= lrs * g[i]
        r.pop()
        _trim(r)
    return _primitive(r) if r else r


def _exact_div(f: list[int], g: list[int]) -> list[int]:
    """Quotient f/g over Q rescaled to a primitive integer polynomial (g must divide f)."""
    pf = PolyQ(f)
    pg = PolyQ(g)
    q, r = pf.divmod(pg)
    if not r.is_zero():
        raise ArithmeticError("inexact polynomial division")
    ints, _ = q.integer_primitive()
    return ints


def sturm_chain_int(p: list[int]) -> list[list[int]]:
    """Sturm chain of a square-free integer polynomial, each member scaled by a positive constant."""
    p = [mpz(v) for v in p]
    chain = [p]
    d = [i * c for i, c in enumerate(p)][1:]
    if not _trim(d):
        return chain
    chain.append(_primitive(d))
    while True:
        r = _prem_primitive(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-v for v in r])
    return chain


def sign_at(p: list[int], x: Fraction) -> int:
    """Sign of p(x) using integer homogeneous Horner evaluation."""
    a, b = mpz(x.numerator), mpz(x.denominator)
    if b == 1:
        acc = 0
        for c in reversed(p):
            acc = acc * a + c
    else:
        acc = _homogeneous(p, a, b)
    return (acc > 0) - (acc < 0)


def _homogeneous(p: list[int], a: int, b: int) -> int:
    """b**n * p(a/b) for n = deg p, by Horner on the homogenized form."""
    n = len(p) - 1
    acc = 0
    bpow = 1
    for i in range(n, -1, -1):
        acc = acc * a + p[i] * bpow
        bpow *= b
    return acc


def _sign_at_infinity(p: list[int], positive: bool) -> int:
    s = 1 if p[-1] > 0 else -1
    if not positive and (len(p) - 1) % 2 == 1:
        s = -s
    return s


def _variations(signs: Iterable[int]) -> int:
    last = 0
    count = 0
    for s in signs:
        if s == 0:
            continue
        if last and s != last:
            count += 1
        last = s
    return count


@dataclass(frozen=True)
class Domain:
    """Real interval with rational (or infinite, None) ends and per-end closedness."""

    lo: Optional[Fraction] = None
    hi: Optional[Fraction] = None
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def closed(cls, lo, hi) -> "Domain":
        return cls(Fraction(lo), Fraction(hi), True, True)

    @classmethod
    def open(cls, lo, hi) -> "Domain":
        return cls(Fraction(lo), Fraction(hi), False, False)

    @classmethod
    def real_line(cls) -> "Domain":
        return cls(None, None, False, False)

    def describe(self) -> str:
        left = ("[" if self.lo_closed else "(") + ("-inf" if self.lo is None else str(self.lo))
        right = ("inf" if self.hi is None else str(self.hi)) + ("]" if self.hi_closed else ")")
        return f"{left}, {right}"


def _as_domain(domain) -> Domain:
    if domain is None:
        return Domain.real_line()
    if isinstance(domain, Domain):
        return domain
    lo, hi = domain
    return Domain.closed(lo, hi)


class SturmCounter:
    """Sturm chain of the square-free part of ``p`` with exact counting on intervals."""

    def __init__(self, p: PolyQ):
        if p.is_zero():
            raise ValueError("Sturm count of the zero polynomial")
        self.poly = p
        ints, _ = p.integer_primitive()
        chain = sturm_chain_int(ints)
        # the last member of the chain is gcd(p, p'); divide it out when p has repeated roots
        if len(chain[-1]) > 1:
            ints = _exact_div(ints, chain[-1])
            chain = sturm_chain_int(ints)
        self.sqf = ints
        self.chain = chain

    def variations_at(self, x: Optional[Fraction], positive_infinity: bool = True) -> int:
        if x is None:
            return _variations(_sign_at_infinity(q, positive_infinity) for q in self.chain)
        return _variations(sign_at(q, x) for q in self.chain)

    def is_root(self, x: Fraction) -> bool:
        return sign_at(self.sqf, x) == 0

    def count_open(self, lo: Optional[Fraction], hi: Optional[Fraction]) -> int:
        """Distinct roots in (lo, hi); lo/hi None mean -inf/+inf."""
        if len(self.sqf) == 1:
            return 0
        if lo is not None and hi is not None and lo >= hi:
            return 0
        v_lo = self.variations_at(lo, positive_infinity=False)
        v_hi = self.variations_at(hi, positive_infinity=True)
        # V(lo) - V(hi) counts roots in (lo, hi]; drop a root sitting at hi
        count = v_lo - v_hi
        if hi is not None and self.is_root(hi):
            count -= 1
        return count

    def count(self, domain) -> int:
        d = _as_domain(domain)
        n = self.count_open(d.lo, d.hi)
        if d.lo is not None and d.lo_closed and self.is_root(d.lo):
            n += 1
        if d.hi is not None and d.hi_closed and self.is_root(d.hi) and d.hi != d.lo:
            n += 1
        return n


def sturm_real_root_count(p: PolyQ, domain=None) -> int:
    """Exact number of distinct real roots of ``p`` in ``domain`` (default: the real line)."""
    return SturmCounter(p).count(domain)


@dataclass(frozen=True)
class RootIsolation:
    polynomial: PolyQ
    intervals: tuple[tuple[Fraction, Fraction], ...]
    total_real_root_count: int


def root_bound(p: PolyQ) -> Fraction:
    """Cauchy bound: every real root has |x| < bound."""
    lead = abs(p.leading)
    return 1 + max((abs(c) / lead for c in p.coeffs[:-1]), default=Fraction(0))


def isolate_real_roots(p: PolyQ, domain=None, max_width: Optional[Fraction] = None) -> RootIsolation:
    """Disjoint rational intervals each holding exactly one root of ``p`` in ``domain``.

    Intervals are half-open (a, b] with sign(p(a)) != sign at b, or degenerate [r, r]
    for exact rational roots.
    """
    counter = SturmCounter(p)
    d = _as_domain(domain)
    lo = d.lo if d.lo is not None else -root_bound(p)
    hi = d.hi if d.hi is not None else root_bound(p)
    found: list[tuple[Fraction, Fraction]] = []
    if d.lo is not None and d.lo_closed and counter.is_root(lo):
        found.append((lo, lo))
    if d.hi is not None and d.hi_closed and counter.is_root(hi) and hi != lo:
        found.append((hi, hi))
    stack = [(lo, hi, counter.count_open(lo, hi))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1 and (max_width is None or b - a <= max_width):
            found.append((a, b))
            continue
        if n == 1:
            a, b = refine_root(counter.sqf, a, b, max_width)
            found.append((a, b))
            continue
        m = (a + b) / 2
        if counter.is_root(m):
            found.append((m, m))
        stack.append((a, m, counter.count_open(a, m)))
        stack.append((m, b, counter.count_open(m, b)))
    found.sort()
    return RootIsolation(p, tuple(found), len(found))


def refine_root(sqf: list[int], a: Fraction, b: Fraction, max_width: Optional[Fraction]) -> tuple[Fraction, Fraction]:
    """Bisect an interval known to hold one simple root with a sign change at its ends."""
    sa, sb = sign_at(sqf, a), sign_at(sqf, b)
    if sa == 0:
        return a, a
    if sb == 0:
        return b, b
    if sa == sb:
        return a, b
    while max_width is not None and b - a > max_width:
        m = (a + b) / 2
        sm = sign_at(sqf, m)
        if sm == 0:
            return m, m
        if sm == sa:
            a = m
        else:
            b = m
    return a, b


def certify_positive(p: PolyQ, domain, boundary_mode: str | None = None, *, cert_id: str = "positive",
                     claim: str | None = None) -> Certificate:
    """Certificate that p > 0 on the interior of ``domain`` and at each closed end.

    ``boundary_mode`` overrides closedness as two characters, e.g. "oc" for (lo, hi].
    """
    d = _as_domain(domain)
    if boundary_mode is not None:
        d = Domain(d.lo, d.hi, boundary_mode[0] == "c", boundary_mode[1] == "c")
    if p.is_zero():
        raise ValueError("positivity of the zero polynomial")
    b = CertificateBuilder(cert_id, claim or f"p(y) > 0 on {d.describe()}")
    counter = SturmCounter(p)
    interior = counter.count_open(d.lo, d.hi)
    b.witness["degree"] = p.degree
    b.witness["interior_root_count"] = interior
    b.witness["chain_length"] = len(counter.chain)
    b.add("no_interior_roots", f"p has no roots in the open interval of {d.describe()}", interior == 0,
          detail=f"{interior} distinct roots")
    sample = _sample_point(d)
    value = p(sample)
    b.witness["sample_point"] = sample
    b.witness["sample_value"] = value
    b.add("sample_sign", f"p({sample}) > 0", value > 0, detail=f"p({sample}) = {value}")
    for end, closed, label in ((d.lo, d.lo_closed, "left"), (d.hi, d.hi_closed, "right")):
        if end is not None and closed:
            v = p(end)
            b.witness[f"{label}_end_value"] = v
            b.add(f"{label}_end", f"p({end}) > 0", v > 0, detail=f"p({end}) = {v}")
    return b.build()


def _sample_point(d: Domain) -> Fraction:
    if d.lo is not None and d.hi is not None:
        if d.hi_closed:
            return d.hi
        if d.lo_closed:
            return d.lo
        return (d.lo + d.hi) / 2
    if d.lo is not None:
        return d.lo + 1
    if d.hi is not None:
        return d.hi - 1
    return Fraction(0)


@lru_cache(maxsize=None)
def _chebyshev_ints(ell: int) -> tuple[int, ...]:
    if ell == 0:
        return (1,)
    if ell == 1:
        return (0, 1)
    a = _chebyshev_ints(ell - 1)
    b = _chebyshev_ints(ell - 2)
    out = [0] + [2 * c for c in a]
    for i, c in enumerate(b):
        out[i] -= c
    return tuple(out)


def chebyshev_expand(ell: int) -> PolyQ:
    """First-kind Chebyshev polynomial T_ell with exact integer coefficients."""
    if ell < 0:
        raise ValueError("degree must be nonnegative")
    for k in range(0, ell + 1, 64):
        _chebyshev_ints(k)
    return PolyQ(_chebyshev_ints(ell))


def chebyshev_integer_coefficients(ell: int) -> tuple[int, ...]:
    chebyshev_expand(ell)
    return _chebyshev_ints(ell)


def _sign_change_brackets(ints: list[int], lo: Fraction, hi: Fraction, expected: int,
                          max_grid: int = 1 << 14) -> Optional[list[tuple[Fraction, Fraction]]]:
    """Brackets of the roots of ``ints`` in (lo, hi) from sign changes on a uniform grid.

    Returns None unless the grid exhibits exactly ``expected`` roots, in which case each
    bracket holds exactly one root (every bracket holds an odd number, and they add up).
    """
    grid = 64
    while grid <= max_grid:
        step = (hi - lo) / grid
        points = [lo + step * i for i in range(grid + 1)]
        signs = [sign_at(ints, x) for x in points]
        found = [(points[i], points[i]) for i in range(1, grid) if signs[i] == 0]
        found += [(points[i], points[i + 1]) for i in range(grid)
                  if signs[i] and signs[i + 1] and signs[i] != signs[i + 1]]
        if len(found) == expected and all(s != 0 for s in (signs[0], signs[-1])):
            return sorted(found)
        grid *= 4
    return None


def critical_points(p: PolyQ, domain, width: Fraction) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals of width <= ``width`` for the roots of p' strictly inside ``domain``."""
    d = _as_domain(domain)
    dp = p.derivative()
    if dp.is_zero() or dp.degree == 0:
        return []
    counter = SturmCounter(dp)
    expected = counter.count_open(d.lo, d.hi)
    if expected == 0:
        return []
    brackets = _sign_change_brackets(counter.sqf, d.lo, d.hi, expected)
    if brackets is None:
        brackets = list(isolate_real_roots(dp, Domain.open(d.lo, d.hi)).intervals)
    return [refine_root(counter.sqf, a, b, width) if a != b else (a, b) for a, b in brackets]


def second_derivative_bound(p: PolyQ, radius: Fraction) -> Fraction:
    """Upper bound for |p''| on [-radius, radius] from the monomial coefficients."""
    r = Fraction(radius)
    return sum((abs(c) * i * (i - 1) * r ** (i - 2) for i, c in enumerate(p.coeffs) if i >= 2), Fraction(0))


def exact_value(ints: list[int], scale: Fraction, x: Fraction) -> Fraction:
    """scale * poly(ints)(x) evaluated with integer arithmetic."""
    a, b = mpz(x.numerator), mpz(x.denominator)
    n = len(ints) - 1
    return scale * Fraction(int(_homogeneous(ints, a, b)), int(b ** n))


def poly_min_enclosure(p: PolyQ, domain, precision: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of min p over a bounded closed domain via critical points and endpoints.

    Each critical point is isolated to width w; on that cell p >= p(centre) - M2 w^2 where
    M2 bounds |p''|, because p' vanishes inside the cell.
    """
    d = _as_domain(domain)
    if d.lo is None or d.hi is None:
        raise ValueError("poly_min_enclosure needs a bounded domain")
    if p.degree <= 0:
        return iv_from_rational(p(0), precision)
    ints, scale = p.integer_primitive()
    ints = [mpz(v) for v in ints]
    candidates = [iv_from_rational(p(d.lo), precision), iv_from_rational(p(d.hi), precision)]
    m2 = second_derivative_bound(p, max(abs(d.lo), abs(d.hi)))
    bits = max(16, (m2.numerator.bit_length() - m2.denominator.bit_length() + precision) // 2 + 2)
    width = Fraction(1, 2 ** bits)
    for a, b in critical_points(p, d, width):
        if a == b:
            candidates.append(iv_from_rational(exact_value(ints, scale, a), precision))
            continue
        v = exact_value(ints, scale, (a + b) / 2)
        lower = v - m2 * (b - a) ** 2
        candidates.append(Interval(iv_from_rational(lower, precision).lo, iv_from_rational(v, precision).hi, precision))
    lo = min(c.lo for c in candidates)
    hi = min(c.hi for c in candidates)
    return Interval(lo, hi, precision)
