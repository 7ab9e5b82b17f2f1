"""Exact Gaussian-rational scalars.

A :class:`Scalar` is ``(a + b*i) / d`` with integers ``a, b`` and ``d > 0``,
kept in lowest terms. The real and imaginary parts are exposed as
:class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

__all__ = [
    "Scalar",
    "ZERO",
    "ONE",
    "as_scalar",
    "multiplier_power",
    "parse_scalar",
    "format_scalar",
]


class Scalar:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        if isinstance(re, Scalar) and im == 0:
            self._a, self._b, self._d = re._a, re._b, re._d
            return
        if isinstance(re, str):
            s = parse_scalar(re)
            self._a, self._b, self._d = s._a, s._b, s._d
            return
        r = Fraction(re)
        i = Fraction(im)
        d = r.denominator * i.denominator // gcd(r.denominator, i.denominator)
        _set(self, r.numerator * (d // r.denominator), i.numerator * (d // i.denominator), d)

    @classmethod
    def _raw(cls, a, b, d):
        obj = cls.__new__(cls)
        _set(obj, a, b, d)
        return obj

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_real(self) -> bool:
        return self._b == 0

    def conjugate(self) -> "Scalar":
        return Scalar._raw(self._a, -self._b, self._d)

    def __bool__(self):
        return self._a != 0 or self._b != 0

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = as_scalar(other)
            except TypeError:
                return NotImplemented
        return self._a == other._a and self._b == other._b and self._d == other._d

    def __neg__(self):
        return Scalar._raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return Scalar._raw(self._a + o._a, self._b + o._b, self._d)
        return Scalar._raw(
            self._a * o._d + o._a * self._d,
            self._b * o._d + o._b * self._d,
            self._d * o._d,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        if b1 == 0 and b2 == 0:
            return Scalar._raw(a1 * a2, 0, self._d * o._d)
        return Scalar._raw(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, self._d * o._d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero scalar")
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def reciprocal(self) -> "Scalar":
        a, b, d = self._a, self._b, self._d
        if a == 0 and b == 0:
            raise ZeroDivisionError("division by zero scalar")
        if b == 0:
            return Scalar._raw(d, 0, a)
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        return Scalar._raw(d * a, -d * b, a * a + b * b)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.reciprocal() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self):
        return f"Scalar('{format_scalar(self)}')"

    def __str__(self):
        return format_scalar(self)


def _set(obj, a, b, d):
    if d == 0:
        raise ZeroDivisionError("zero denominator")
    if d < 0:
        a, b, d = -a, -b, -d
    g = gcd(a, b, d)
    if g > 1:
        a, b, d = a // g, b // g, d // g
    if a == 0 and b == 0:
        d = 1
    obj._a, obj._b, obj._d = a, b, d


def _coerce(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, int):
        return Scalar._raw(x, 0, 1)
    if isinstance(x, Fraction):
        return Scalar._raw(x.numerator, 0, x.denominator)
    return None


def as_scalar(x) -> Scalar:
    """Coerce int, Fraction, str or Scalar into a Scalar (floats are refused)."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    s = _coerce(x)
    if s is None:
        raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")
    return s


ZERO = Scalar._raw(0, 0, 1)
ONE = Scalar._raw(1, 0, 1)


def multiplier_power(mu, n) -> Scalar:
    """Return prod_i mu_i ** n_i; negative exponents are allowed."""
    if len(mu) != len(n):
        raise ValueError(f"exponent length {len(n)} does not match {len(mu)} multipliers")
    result = ONE
    for m, k in zip(mu, n):
        if k:
            result = result * (m ** k)
    return result


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^(?P<re>{_RAT})?(?:(?P<im>[+-]|[+-]?\d+(?:/\d+)?)?\*?i)?$"
)


def parse_scalar(text: str) -> Scalar:
    """Parse ``p``, ``p/q``, ``re+im*i``, ``re+imi``, ``imi`` or ``i``."""
    s = text.strip().replace(" ", "").replace("−", "-")
    if not s:
        raise ValueError("empty scalar")
    m = _SCALAR_RE.match(s)
    if m is None or (m.group("re") is None and not s.endswith("i")):
        raise ValueError(f"malformed scalar {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_part = Fraction(0)
    if s.endswith("i"):
        tok = m.group("im")
        if tok is None:
            if m.group("re") is not None:
                # "3i" is captured entirely by the real group; reinterpret
                im_part, re_part = re_part, Fraction(0)
            else:
                im_part = Fraction(1)
        elif tok in ("+", "-"):
            im_part = Fraction(1 if tok == "+" else -1)
        else:
            im_part = Fraction(tok)
    return Scalar(re_part, im_part)


def _fmt_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    re_part, im_part = x.re, x.im
    if im_part == 0:
        return _fmt_rat(re_part)
    im_txt = "" if abs(im_part) == 1 else _fmt_rat(abs(im_part))
    sign = "-" if im_part < 0 else "+"
    if re_part == 0:
        return f"{'-' if im_part < 0 else ''}{im_txt}i"
    return f"{_fmt_rat(re_part)}{sign}{im_txt}i"
