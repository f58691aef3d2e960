"""Arbitrary-precision reals.

A ``BigReal`` is a :class:`gmpy2.mpfr`. MPFR rounds every operation
(including ``log`` and ``sqrt``) correctly, so each result is within half an
ulp at the precision in force. Precision is always passed explicitly and
applied through a thread-local gmpy2 context.
"""

from __future__ import annotations

from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

BigReal = mpfr


def working_precision(bits: int):
    """Context manager setting the mpfr precision for the current thread."""
    return gmpy2.context(precision=max(int(bits), 2))


def to_real(value, bits: int) -> mpfr:
    """Round an int, Fraction or mpfr to ``bits`` of precision."""
    with working_precision(bits):
        if isinstance(value, Fraction):
            return mpfr(mpq(value.numerator, value.denominator))
        return mpfr(value)


def exact(x: mpfr) -> Fraction:
    """The exact dyadic rational value of a finite mpfr."""
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def exponent(x: mpfr) -> int:
    """Binary exponent e with 2**(e-1) <= |x| < 2**e; very negative for zero."""
    if x == 0:
        return -(1 << 62)
    return gmpy2.get_exp(x)


def _magnitude_bits(n: int) -> int:
    # bits needed for the integer part of log(n)
    return max(1, n.bit_length()).bit_length() + 1


def log(x, bits: int) -> mpfr:
    """Natural log of a positive real at ``bits`` of precision."""
    with working_precision(bits):
        return gmpy2.log(mpfr(x))


def log_rational(q: Fraction, bits: int) -> mpfr:
    """log|q| for a nonzero rational with absolute error <= 2**-bits."""
    q = abs(Fraction(q))
    if q == 0:
        raise ValueError("log of zero")
    n, d = q.numerator, q.denominator
    wp = bits + _magnitude_bits(max(n, d)) + 4
    with working_precision(wp):
        return gmpy2.log(mpfr(mpz(n))) - gmpy2.log(mpfr(mpz(d)))


def log_near_one(x: mpfr, bits: int) -> mpfr:
    """log(x) for x close to 1 via 2*atanh((x-1)/(x+1)).

    Only a handful of series terms are needed when |x - 1| is tiny, which is
    the situation for the late ratios of the AGM sum.
    """
    with working_precision(bits + 8):
        x = mpfr(x)
        t = (x - 1) / (x + 1)
        t2 = t * t
        total = t
        term = t
        k = 1
        eps = mpfr(2) ** (-(bits + 8))
        while abs(term) > eps * abs(total) and term != 0:
            term *= t2
            k += 2
            total += term / k
        return 2 * total


def format_fixed(x: mpfr, digits: int) -> str:
    """Fixed-point decimal string with ``digits`` places, no negative zero."""
    s = format(x, f".{digits}f")
    if s.startswith("-") and set(s[1:]) <= {"0", "."}:
        s = s[1:]
    return s
