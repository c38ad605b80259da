"""p-adic helpers on exact rationals.

Group elements of SL2(Q_p) are carried with entries in Q, which is dense in
Q_p, so every product and inverse stays exact.  This module supplies the
p-adic view of those rationals: valuations, units, residues modulo p**n and
conversion to and from (valuation, digit list) literals.
"""

from __future__ import annotations

from fractions import Fraction

INFINITE_VALUATION = 10**9


class PrecisionError(ArithmeticError):
    """Raised when a p-adic quantity is needed beyond the digits supplied."""


def int_valuation(n: int, p: int) -> int:
    if n == 0:
        return INFINITE_VALUATION
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(q, p: int) -> int:
    """p-adic valuation of a rational; INFINITE_VALUATION for zero."""
    q = Fraction(q)
    if q == 0:
        return INFINITE_VALUATION
    return int_valuation(q.numerator, p) - int_valuation(q.denominator, p)


def is_integral(q, p: int) -> bool:
    return valuation(q, p) >= 0


def is_unit(q, p: int) -> bool:
    return valuation(q, p) == 0


def unit_part(q, p: int) -> Fraction:
    """q / p**v(q) for nonzero q."""
    q = Fraction(q)
    if q == 0:
        raise ZeroDivisionError("zero has no unit part")
    v = valuation(q, p)
    return q / Fraction(p) ** v


def residue(q, p: int, n: int) -> int:
    """The integer in [0, p**n) congruent to the p-integral rational q."""
    q = Fraction(q)
    modulus = p**n
    if n <= 0:
        return 0
    if q.denominator % p == 0:
        raise ValueError(f"{q} is not p-integral for p={p}")
    return (q.numerator * pow(q.denominator, -1, modulus)) % modulus


def digits(q, p: int, count: int) -> tuple[int, list[int]]:
    """(valuation, first ``count`` digits of the unit expansion)."""
    q = Fraction(q)
    if q == 0:
        return INFINITE_VALUATION, [0] * count
    v = valuation(q, p)
    r = residue(q / Fraction(p) ** v, p, count)
    out = []
    for _ in range(count):
        out.append(r % p)
        r //= p
    return v, out


def from_digits(val: int, digit_list, p: int) -> Fraction:
    """Rational p**val * sum(d_i p**i) from a finite digit expansion."""
    total = 0
    for i, d in enumerate(digit_list):
        d = int(d)
        if not 0 <= d < p:
            raise ValueError(f"digit {d} out of range for p={p}")
        total += d * p**i
    return Fraction(total) * Fraction(p) ** val
