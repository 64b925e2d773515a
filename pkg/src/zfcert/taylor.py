"""Truncated Taylor series with interval coefficients.

A :class:`Jet` holds enclosures of the normalized derivatives f^(k)(x0)/k! for
k = 0..order. When x0 is itself an interval (a whole integration cell), the
coefficients enclose the normalized derivatives over that cell, which is what
the Lagrange remainder needs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .exactnum import DomainError, Interval, iv


class NonSmooth(ArithmeticError):
    """Raised when a jet is requested across a point where the function is not smooth."""


class Jet:
    __slots__ = ("c",)

    def __init__(self, coefficients: Sequence[Interval]):
        self.c = list(coefficients)

    @classmethod
    def variable(cls, x0: Interval, order: int) -> "Jet":
        one = iv(1, x0.prec)
        zero = iv(0, x0.prec)
        return cls([x0] + ([one] if order >= 1 else []) + [zero] * max(0, order - 1))

    @classmethod
    def constant(cls, value, order: int, prec: int) -> "Jet":
        v = iv(value, prec)
        zero = iv(0, prec)
        return cls([v] + [zero] * order)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self) -> Interval:
        return self.c[0]

    @property
    def prec(self) -> int:
        return self.c[0].prec

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order, self.prec)

    def __neg__(self) -> "Jet":
        return Jet([-a for a in self.c])

    def __add__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet([self.c[0] + other] + self.c[1:])
        return Jet([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet([self.c[0] - other] + self.c[1:])
        return Jet([a - b for a, b in zip(self.c, other.c)])

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet([a * other for a in self.c])
        a, b = self.c, other.c
        out = []
        for k in range(len(a)):
            s = a[0] * b[k]
            for j in range(1, k + 1):
                s = s + a[j] * b[k - j]
            out.append(s)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return Jet([a / other for a in self.c])
        u, v = self.c, other.c
        q: list[Interval] = []
        for k in range(len(u)):
            s = u[k]
            for j in range(1, k + 1):
                s = s - v[j] * q[k - j]
            q.append(s / v[0])
        return Jet(q)

    def __rtruediv__(self, other) -> "Jet":
        return self._lift(other) / self

    def __pow__(self, n: int) -> "Jet":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = Jet.constant(1, self.order, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> "Jet":
        f = self.c
        e = [f[0].exp()]
        for k in range(1, len(f)):
            s = f[1] * e[k - 1]
            for j in range(2, k + 1):
                s = s + f[j] * e[k - j] * j
            e.append(s / k)
        return Jet(e)

    def log(self) -> "Jet":
        f = self.c
        g = [f[0].log()]
        for k in range(1, len(f)):
            s = f[k]
            for j in range(1, k):
                s = s - g[j] * f[k - j] * Fraction(j, k)
            g.append(s / f[0])
        return Jet(g)

    def sin_cos(self) -> tuple["Jet", "Jet"]:
        f = self.c
        s = [f[0].sin()]
        c = [f[0].cos()]
        for k in range(1, len(f)):
            ss = f[1] * c[k - 1]
            cc = f[1] * s[k - 1]
            for j in range(2, k + 1):
                ss = ss + f[j] * c[k - j] * j
                cc = cc + f[j] * s[k - j] * j
            s.append(ss / k)
            c.append(-cc / k)
        return Jet(s), Jet(c)

    def sin(self) -> "Jet":
        return self.sin_cos()[0]

    def cos(self) -> "Jet":
        return self.sin_cos()[1]

    def sqrt(self) -> "Jet":
        f = self.c
        r = [f[0].sqrt()]
        two_r0 = r[0] * 2
        for k in range(1, len(f)):
            s = f[k]
            for j in range(1, k):
                s = s - r[j] * r[k - j]
            r.append(s / two_r0)
        return Jet(r)

    def abs(self) -> "Jet":
        v = self.c[0]
        if v.lo >= 0:
            return self
        if v.hi <= 0:
            return -self
        if self.order == 0:
            return Jet([abs(v)])
        raise NonSmooth("abs of a sign-indefinite jet")

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])


def lift_unary(fn_jet, x: Interval, order: int = 0) -> Interval:
    """Evaluate a jet-valued expression at an interval and return the value enclosure."""
    return fn_jet(Jet.variable(x, order)).value


__all__ = ["Jet", "NonSmooth", "DomainError", "lift_unary"]
