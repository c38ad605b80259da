"""Outward-rounded interval arithmetic on double endpoints.

Every operation widens its result by one ulp on each side so the true real
value is always contained.  Exact rationals enter through ``Interval.exact``
and leave through ``to_record`` as a pair of "num/den" strings.
"""

from __future__ import annotations

import math
from fractions import Fraction

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def fraction_text(q) -> str:
    """Serialize a rational (or a float, exactly) as "num/den"."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(text: str) -> Fraction:
    """Parse "num/den", an integer or a decimal literal into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        den_value = int(den)
        if den_value == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return Fraction(int(num), den_value)
    return Fraction(text)


def rational_upper(x: float, bits: int = 40) -> Fraction:
    """Smallest dyadic k/2**bits that is >= x (keeps rationals short)."""
    if math.isinf(x):
        raise OverflowError("cannot round an infinite bound to a rational")
    scale = 1 << bits
    q = Fraction(x)
    return Fraction(math.ceil(q * scale), scale)


def rational_lower(x: float, bits: int = 40) -> Fraction:
    """Largest dyadic k/2**bits that is <= x."""
    if math.isinf(x):
        raise OverflowError("cannot round an infinite bound to a rational")
    scale = 1 << bits
    q = Fraction(x)
    return Fraction(math.floor(q * scale), scale)


class Interval:
    """Closed interval [lo, hi] with outward rounding."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, q) -> "Interval":
        """Tightest interval around a rational (or int) value."""
        if isinstance(q, Interval):
            return q
        if isinstance(q, int):
            f = float(q)
            if Fraction(f) == q:
                return cls(f, f)
        q = Fraction(q)
        f = float(q)
        fq = Fraction(f)
        if fq == q:
            return cls(f, f)
        if fq < q:
            return cls(f, _up(f))
        return cls(_down(f), f)

    @classmethod
    def hull(cls, *items) -> "Interval":
        parts = [cls.exact(x) for x in items]
        return cls(min(p.lo for p in parts), max(p.hi for p in parts))

    # -- basic queries -------------------------------------------------
    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def radius(self) -> float:
        return _up(0.5 * (self.hi - self.lo))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        q = Fraction(x)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def certainly_lt(self, x) -> bool:
        other = Interval.exact(x)
        return self.hi < other.lo

    def certainly_ge(self, x) -> bool:
        other = Interval.exact(x)
        return self.lo >= other.hi

    def to_record(self) -> list:
        return [fraction_text(self.lo), fraction_text(self.hi)]

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other) -> "Interval":
        o = Interval.exact(other)
        return Interval(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        o = Interval.exact(other)
        return Interval(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        return Interval.exact(other) - self

    def __mul__(self, other) -> "Interval":
        o = Interval.exact(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        products = [0.0 if math.isnan(p) else p for p in products]
        return Interval(_down(min(products)), _up(max(products)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = Interval.exact(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        quotients = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(quotients)), _up(max(quotients)))

    def __rtruediv__(self, other) -> "Interval":
        return Interval.exact(other) / self

    def square(self) -> "Interval":
        if self.lo >= 0:
            return Interval(_down(self.lo * self.lo), _up(self.hi * self.hi))
        if self.hi <= 0:
            return Interval(_down(self.hi * self.hi), _up(self.lo * self.lo))
        m = max(-self.lo, self.hi)
        return Interval(0.0, _up(m * m))

    def sqrt(self) -> "Interval":
        if self.hi < 0:
            raise ValueError("square root of a negative interval")
        lo = max(self.lo, 0.0)
        return Interval(max(0.0, _down(math.sqrt(lo))), _up(math.sqrt(self.hi)))

    def exp(self) -> "Interval":
        return Interval(_exp_down(self.lo), _exp_up(self.hi))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0.0, max(-self.lo, self.hi))

    def max0(self) -> "Interval":
        return Interval(max(self.lo, 0.0), max(self.hi, 0.0))


def _exp_down(x: float) -> float:
    if x == -_INF:
        return 0.0
    try:
        value = math.exp(x)
    except OverflowError:
        return math.inf
    # libm exp is accurate to well under 2 ulp; step down twice to be safe
    return max(0.0, _down(_down(value)))


def _exp_up(x: float) -> float:
    if x == -_INF:
        return 0.0
    try:
        value = math.exp(x)
    except OverflowError:
        return math.inf
    return _up(_up(value))


def exp_of(q) -> Interval:
    """Enclosure of exp(q) for a rational or interval argument."""
    return Interval.exact(q).exp()


def as_interval(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.exact(x)
