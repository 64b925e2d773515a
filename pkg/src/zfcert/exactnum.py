"""Exact rationals and outward-rounded interval arithmetic over MPFR.

Rationals are :class:`fractions.Fraction`. Intervals carry MPFR endpoints that
are rounded toward -inf (``lo``) and +inf (``hi``); every operation returns an
interval containing the exact image of its inputs. Elementary functions rely on
MPFR's correctly rounded kernels evaluated in directed-rounding contexts, with
explicit handling of extrema and poles for the periodic functions.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

DEFAULT_PRECISION = 128
PRECISION_CEILING = 2048
MIN_PRECISION = 16

Number = Union[int, Fraction, str, float]


_SCALARS = (int, Fraction, float, str, type(mpfr()), type(mpz()), type(mpq()))


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


def to_fraction(x: Number) -> Fraction:
    """Parse an exact rational from an int, Fraction, float or decimal/"p/q" string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str, float)):
        return Fraction(x)
    if isinstance(x, type(mpq())):
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


def rational(numerator: int, denominator: int = 1) -> Fraction:
    if denominator == 0:
        raise ZeroDivisionError("zero denominator")
    return Fraction(numerator, denominator)


@lru_cache(maxsize=None)
def _contexts(prec: int) -> tuple:
    down = gmpy2.context(precision=prec, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec, round=gmpy2.RoundUp)
    return down, up


def _neg(x: mpfr) -> mpfr:
    # the bare unary minus rounds to the global 53-bit context
    return _contexts(max(x.precision, MIN_PRECISION))[0].minus(x)


def _abs(x: mpfr) -> mpfr:
    return _contexts(max(x.precision, MIN_PRECISION))[0].abs(x)


def _check_prec(prec: int) -> int:
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be at least {MIN_PRECISION} bits")
    return int(prec)


def _mpq(q: Fraction):
    return mpq(q.numerator, q.denominator)


def _round(q, ctx) -> mpfr:
    with ctx:
        return mpfr(q)


class Interval:
    """Closed interval ``[lo, hi]`` with MPFR endpoints and a working precision."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PRECISION):
        if hi is None:
            hi = lo
        self.lo = lo if isinstance(lo, type(mpfr())) else mpfr(lo)
        self.hi = hi if isinstance(hi, type(mpfr())) else mpfr(hi)
        self.prec = prec
        if not (self.lo <= self.hi):
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    # construction ---------------------------------------------------------
    @classmethod
    def from_rational(cls, q: Number, prec: int = DEFAULT_PRECISION) -> "Interval":
        return iv_from_rational(to_fraction(q), prec)

    @classmethod
    def hull_of(cls, items: Iterable["Interval"]) -> "Interval":
        items = list(items)
        lo = min(x.lo for x in items)
        hi = max(x.hi for x in items)
        return cls(lo, hi, max(x.prec for x in items))

    def with_prec(self, prec: int) -> "Interval":
        return Interval(self.lo, self.hi, prec)

    # inspection -----------------------------------------------------------
    def width(self) -> mpfr:
        return _contexts(self.prec)[1].sub(self.hi, self.lo)

    def mid(self) -> mpfr:
        with _contexts(self.prec + 2)[0]:
            return (self.lo + self.hi) / 2

    def mag(self) -> mpfr:
        return max(_abs(self.lo), _abs(self.hi))

    def mig(self) -> mpfr:
        if self.lo <= 0 <= self.hi:
            return mpfr(0)
        return min(_abs(self.lo), _abs(self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        q = to_fraction(x) if not isinstance(x, type(mpfr())) else Fraction(*x.as_integer_ratio())
        return self.lower_fraction() <= q <= self.upper_fraction()

    def overlaps(self, other: "Interval") -> bool:
        return not (self.hi < other.lo or other.hi < self.lo)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def lower_fraction(self) -> Fraction:
        num, den = self.lo.as_integer_ratio()
        return Fraction(int(num), int(den))

    def upper_fraction(self) -> Fraction:
        num, den = self.hi.as_integer_ratio()
        return Fraction(int(num), int(den))

    def __float__(self) -> float:
        return float(self.mid())

    def __repr__(self) -> str:
        return f"Interval[{_fmt(self.lo, 'down')}, {_fmt(self.hi, 'up')}]"

    # certain comparisons --------------------------------------------------
    def certainly_gt(self, other) -> bool:
        return self.lo > _upper(other)

    def certainly_ge(self, other) -> bool:
        return self.lo >= _upper(other)

    def certainly_lt(self, other) -> bool:
        return self.hi < _lower(other)

    def certainly_le(self, other) -> bool:
        return self.hi <= _lower(other)

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return iv(other, self.prec)

    def __neg__(self) -> "Interval":
        return Interval(_neg(self.hi), _neg(self.lo), self.prec)

    def __pos__(self) -> "Interval":
        return self

    def __add__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = _scalar_interval(other, self.prec)
        prec = max(self.prec, other.prec)
        d, u = _contexts(prec)
        return Interval(d.add(self.lo, other.lo), u.add(self.hi, other.hi), prec)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = _scalar_interval(other, self.prec)
        prec = max(self.prec, other.prec)
        d, u = _contexts(prec)
        return Interval(d.sub(self.lo, other.hi), u.sub(self.hi, other.lo), prec)

    def __rsub__(self, other) -> "Interval":
        if not isinstance(other, _SCALARS):
            return NotImplemented
        return (-self) + other

    def __mul__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = _scalar_interval(other, self.prec)
        prec = max(self.prec, other.prec)
        d, u = _contexts(prec)
        a, b, c_, e = self.lo, self.hi, other.lo, other.hi
        if a >= 0 and c_ >= 0:
            return Interval(d.mul(a, c_), u.mul(b, e), prec)
        if b <= 0 and e <= 0:
            return Interval(d.mul(b, e), u.mul(a, c_), prec)
        lo = min(d.mul(a, c_), d.mul(a, e), d.mul(b, c_), d.mul(b, e))
        hi = max(u.mul(a, c_), u.mul(a, e), u.mul(b, c_), u.mul(b, e))
        return Interval(lo, hi, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        if not isinstance(other, Interval):
            if not isinstance(other, _SCALARS):
                return NotImplemented
            other = _scalar_interval(other, self.prec)
        if other.lo <= 0 <= other.hi:
            raise DomainError(f"division by an interval containing zero: {other!r}")
        prec = max(self.prec, other.prec)
        d, u = _contexts(prec)
        a, b, c_, e = self.lo, self.hi, other.lo, other.hi
        lo = min(d.div(a, c_), d.div(a, e), d.div(b, c_), d.div(b, e))
        hi = max(u.div(a, c_), u.div(a, e), u.div(b, c_), u.div(b, e))
        return Interval(lo, hi, prec)

    def __rtruediv__(self, other) -> "Interval":
        return iv(other, self.prec) / self

    def __abs__(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(mpfr(0), max(_neg(self.lo), self.hi), self.prec)

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int):
            raise TypeError("use iv_eval_elementary('power', ...) for real exponents")
        if n == 0:
            return Interval(mpfr(1), mpfr(1), self.prec)
        if n < 0:
            return 1 / (self ** (-n))
        d, u = _contexts(self.prec)
        if n % 2 == 1 or self.lo >= 0:
            return Interval(d.pow(self.lo, n), u.pow(self.hi, n), self.prec)
        if self.hi <= 0:
            return Interval(d.pow(self.hi, n), u.pow(self.lo, n), self.prec)
        return Interval(mpfr(0), u.pow(self.mag(), n), self.prec)

    def sqr(self) -> "Interval":
        return self ** 2

    # set operations -------------------------------------------------------
    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi), max(self.prec, other.prec))

    def intersect(self, other: "Interval") -> "Interval":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("empty intersection")
        return Interval(lo, hi, max(self.prec, other.prec))

    def split(self, pieces: int = 2) -> list["Interval"]:
        lo, hi = self.lower_fraction(), self.upper_fraction()
        step = (hi - lo) / pieces
        cuts = [lo + step * i for i in range(pieces)] + [hi]
        out = []
        for a, b in zip(cuts, cuts[1:]):
            out.append(Interval(iv_from_rational(a, self.prec).lo, iv_from_rational(b, self.prec).hi, self.prec))
        return out

    # elementary functions -------------------------------------------------
    def exp(self):
        return iv_eval_elementary("exp", self)

    def log(self):
        return iv_eval_elementary("log", self)

    def sqrt(self):
        return iv_eval_elementary("sqrt", self)

    def sin(self):
        return iv_eval_elementary("sin", self)

    def cos(self):
        return iv_eval_elementary("cos", self)

    def tan(self):
        return iv_eval_elementary("tan", self)

    def cot(self):
        return iv_eval_elementary("cot", self)

    def sec(self):
        return iv_eval_elementary("sec", self)

    def csc(self):
        return iv_eval_elementary("csc", self)

    def atan(self):
        return iv_eval_elementary("atan", self)


def _as_exact(x):
    if isinstance(x, int):
        return mpz(x)
    if isinstance(x, Fraction):
        return _mpq(x)
    if isinstance(x, float):
        return mpfr(x, 64)
    if isinstance(x, str):
        return _mpq(Fraction(x))
    if isinstance(x, (type(mpfr()), type(mpz()), type(mpq()))):
        return x
    raise TypeError(f"unsupported operand {type(x).__name__}")


def _scalar_interval(x, prec: int) -> "Interval":
    """Point interval for an exactly representable scalar, else its outward enclosure.

    Mixed mpfr/mpq context arithmetic in gmpy2 is not reliably directed, so rationals
    are always enclosed first and combined with interval-interval operations.
    """
    if isinstance(x, int) and abs(x).bit_length() <= prec:
        v = mpfr(x, prec)
        return Interval(v, v, prec)
    if isinstance(x, type(mpfr())):
        return Interval(x, x, max(prec, x.precision))
    return iv(x, prec)


def _upper(x):
    return x.hi if isinstance(x, Interval) else _scalar_interval(x, DEFAULT_PRECISION).hi


def _lower(x):
    return x.lo if isinstance(x, Interval) else _scalar_interval(x, DEFAULT_PRECISION).lo


def _fmt(x: mpfr, direction: str, digits: int = 12) -> str:
    if not gmpy2.is_finite(x):
        return str(x)
    ctx = _contexts(64)[0 if direction == "down" else 1]
    with ctx:
        return f"{mpfr(x):.{digits}g}"


def iv(x, prec: int = DEFAULT_PRECISION) -> Interval:
    """Enclose an exact number (int, Fraction, decimal string, float) or pass an Interval through."""
    if isinstance(x, Interval):
        return x
    if isinstance(x, (int, Fraction, str)):
        return iv_from_rational(to_fraction(x), prec)
    if isinstance(x, float):
        v = mpfr(x, 64)
        return Interval(v, v, prec)
    if isinstance(x, type(mpfr())):
        return Interval(x, x, prec)
    if isinstance(x, (type(mpz()), type(mpq()))):
        return iv_from_rational(Fraction(int(x.numerator), int(x.denominator)), prec)
    raise TypeError(f"cannot enclose {type(x).__name__}")


def iv_from_rational(q: Fraction, precision: int = DEFAULT_PRECISION) -> Interval:
    """Tightest enclosure of ``q`` by two precision-``precision`` floats."""
    prec = _check_prec(precision)
    q = to_fraction(q)
    d, u = _contexts(prec)
    m = _mpq(q)
    return Interval(_round(m, d), _round(m, u), prec)


def hull(*items: Interval) -> Interval:
    return Interval.hull_of(items)


def symmetric(m, prec: int = DEFAULT_PRECISION) -> Interval:
    """The interval [-m, m] for an MPFR or exactly enclosed bound m >= 0."""
    top = m if isinstance(m, type(mpfr())) else iv(m, prec).hi
    return Interval(_neg(top), top, prec)


def pi_interval(prec: int = DEFAULT_PRECISION) -> Interval:
    d, u = _contexts(prec)
    return Interval(d.const_pi(), u.const_pi(), prec)


def euler_gamma_interval(prec: int = DEFAULT_PRECISION) -> Interval:
    d, u = _contexts(prec)
    return Interval(d.const_euler(), u.const_euler(), prec)


def _integers_in(q: Interval) -> range:
    return range(math.ceil(q.lower_fraction()), math.floor(q.upper_fraction()) + 1)


def _periodic(x: Interval, prec: int, kind: str) -> Interval:
    d, u = _contexts(prec)
    half_turns = x / pi_interval(prec + 8)
    if kind == "sin":
        half_turns = half_turns - Fraction(1, 2)
    ks = _integers_in(half_turns)
    if ks.stop - ks.start > 2:
        return Interval(mpfr(-1), mpfr(1), prec)
    fd, fu = (d.sin, u.sin) if kind == "sin" else (d.cos, u.cos)
    lo = min(fd(x.lo), fd(x.hi))
    hi = max(fu(x.lo), fu(x.hi))
    for k in ks:
        if k % 2 == 0:
            hi = mpfr(1)
        else:
            lo = mpfr(-1)
    return Interval(max(lo, mpfr(-1)), min(hi, mpfr(1)), prec)


def _no_pole(x: Interval, prec: int, offset: Fraction, name: str) -> None:
    q = x / pi_interval(prec + 8) - offset
    ks = _integers_in(q)
    if ks.stop > ks.start:
        raise DomainError(f"{name} has a pole inside {x!r}")


def iv_eval_elementary(fn: str, x, precision: int | None = None, exponent=None) -> Interval:
    """Enclose ``fn(x)`` for fn in exp, log, sin, cos, tan, cot, sec, csc, atan, sqrt, power.

    ``power`` computes x**exponent for x > 0 (real exponent) or any x (integer exponent).
    Domain violations raise :class:`DomainError` rather than returning a wide interval.
    """
    x = iv(x, precision or DEFAULT_PRECISION)
    prec = _check_prec(precision if precision is not None else x.prec)
    d, u = _contexts(prec)
    if fn == "exp":
        return Interval(d.exp(x.lo), u.exp(x.hi), prec)
    if fn == "log":
        if x.lo <= 0:
            raise DomainError(f"log requires a positive argument, got {x!r}")
        return Interval(d.log(x.lo), u.log(x.hi), prec)
    if fn == "sqrt":
        if x.lo < 0:
            raise DomainError(f"sqrt requires a nonnegative argument, got {x!r}")
        return Interval(d.sqrt(x.lo), u.sqrt(x.hi), prec)
    if fn == "atan":
        return Interval(d.atan(x.lo), u.atan(x.hi), prec)
    if fn in ("sin", "cos"):
        return _periodic(x, prec, fn)
    if fn == "tan":
        _no_pole(x, prec, Fraction(1, 2), "tan")
        return Interval(d.tan(x.lo), u.tan(x.hi), prec)
    if fn == "cot":
        _no_pole(x, prec, Fraction(0), "cot")
        return Interval(d.cot(x.hi), u.cot(x.lo), prec)
    if fn == "sec":
        c = _periodic(x, prec, "cos")
        if c.lo <= 0 <= c.hi:
            raise DomainError(f"sec has a pole inside {x!r}")
        return 1 / c
    if fn == "csc":
        s = _periodic(x, prec, "sin")
        if s.lo <= 0 <= s.hi:
            raise DomainError(f"csc has a pole inside {x!r}")
        return 1 / s
    if fn == "power":
        if exponent is None:
            raise ValueError("power requires an exponent")
        if isinstance(exponent, int):
            return x.with_prec(prec) ** exponent
        if x.lo <= 0:
            raise DomainError("real powers require a positive base")
        y = iv(exponent, prec)
        return iv_eval_elementary("exp", y * iv_eval_elementary("log", x, prec), prec)
    raise ValueError(f"unknown elementary function {fn!r}")


def exp(x):
    return iv_eval_elementary("exp", x)


def log(x):
    return iv_eval_elementary("log", x)


def sqrt(x):
    return iv_eval_elementary("sqrt", x)


def sin(x):
    return iv_eval_elementary("sin", x)


def cos(x):
    return iv_eval_elementary("cos", x)


def tan(x):
    return iv_eval_elementary("tan", x)


def cot(x):
    return iv_eval_elementary("cot", x)


def sec(x):
    return iv_eval_elementary("sec", x)


def csc(x):
    return iv_eval_elementary("csc", x)


def atan(x):
    return iv_eval_elementary("atan", x)


def power(x, y):
    return iv_eval_elementary("power", x, exponent=y)


def escalate(attempt: Callable[[int], object], start: int = DEFAULT_PRECISION,
             ceiling: int = PRECISION_CEILING) -> tuple[object, int]:
    """Run ``attempt(prec)`` at doubling precisions until it returns a non-None verdict.

    Returns ``(verdict, precision_used)``; a None verdict at the ceiling means undecided.
    """
    prec = start
    while True:
        verdict = attempt(prec)
        if verdict is not None or prec * 2 > ceiling:
            return verdict, prec
        prec *= 2


def floor_decimal(x: Interval, digits: int) -> Fraction:
    """Largest multiple of 10**-digits that is <= x.lo."""
    scale = 10 ** digits
    return Fraction(math.floor(x.lower_fraction() * scale), scale)


def ceil_decimal(x: Interval, digits: int) -> Fraction:
    scale = 10 ** digits
    return Fraction(math.ceil(x.upper_fraction() * scale), scale)


def encode_mpfr(x: mpfr) -> str:
    """Lossless text form ``mantissa*2^exponent`` of a finite MPFR value."""
    num, den = x.as_integer_ratio()
    return f"{num}/{den}"


def decode_mpfr(text: str, prec: int) -> mpfr:
    q = Fraction(text)
    with _contexts(max(prec, q.numerator.bit_length() + 2))[0]:
        value = mpfr(_mpq(q))
    if Fraction(*value.as_integer_ratio()) != q:
        raise ValueError(f"{text} is not exactly representable")
    return value
