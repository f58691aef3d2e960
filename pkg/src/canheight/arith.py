"""Exact integer and rational helpers.

Everything here works on Python ``int`` and :class:`fractions.Fraction`;
nothing ever factors an integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import gmpy2


class NoFractionFound(ArithmeticError):
    """The search interval holds no fraction with small enough denominator."""


def gcd_power(a: int, b: int) -> int:
    """Return gcd(a, b**oo): the largest divisor of ``a`` whose primes all divide ``b``.

    Any prime power dividing ``a`` has exponent below ``a.bit_length()``, so
    one modular power of ``b`` saturates every shared prime.
    """
    if a <= 0 or b <= 0:
        raise ValueError("gcd_power needs positive arguments")
    if a == 1:
        return 1
    return gcd(a, pow(b, a.bit_length(), a))


def floor_log(n: int, base: int) -> int:
    """Largest k >= 0 with base**k <= n (n >= 1, base >= 2)."""
    if n < 1 or base < 2:
        raise ValueError("floor_log needs n >= 1 and base >= 2")
    if base == 2:
        return n.bit_length() - 1
    k = max(0, (n.bit_length() - 1) // base.bit_length())
    while base ** (k + 1) <= n:
        k += 1
    return k


def floor_log4_ratio(num: int, den: int) -> int:
    """floor(log(num/den) / log 4) for positive integers, computed exactly.

    Returns -1 when num/den < 1 (callers treat that as "no loop passes").
    """
    if num < den:
        return -1
    m = 0
    while den * 4 ** (m + 1) <= num:
        m += 1
    return m


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


def simplest_fraction_in_interval(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction of smallest denominator in the closed interval [lo, hi].

    Among fractions of that denominator the one of smallest absolute
    numerator is returned. Works by Stern-Brocot descent, taking whole runs
    of the same direction at once (i.e. continued-fraction digits).
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo > hi:
        raise ValueError("empty interval")
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -simplest_fraction_in_interval(-hi, -lo)

    # value = (p1*t + p0) / (q1*t + q0) where t ranges over [lo, hi]
    p1, q1, p0, q0 = 1, 0, 0, 1
    while True:
        fl = lo.numerator // lo.denominator
        if fl == lo:
            c = fl
            break
        if fl + 1 <= hi:
            c = fl + 1
            break
        p1, q1, p0, q0 = p1 * fl + p0, q1 * fl + q0, p1, q1
        lo, hi = 1 / (hi - fl), 1 / (lo - fl)
    return Fraction(p1 * c + p0, q1 * c + q0)


def unique_fraction_in_interval(lo: Fraction, M: int) -> Fraction:
    """The fraction with denominator <= M lying in [lo, lo + 1/M**2].

    For M >= 2 there is at most one. Raises NoFractionFound if there is none,
    which upstream means the truncation or precision was too small.
    """
    if M < 1:
        raise ValueError("M must be positive")
    lo = Fraction(lo)
    r = simplest_fraction_in_interval(lo, lo + Fraction(1, M * M))
    if r.denominator > M:
        raise NoFractionFound(f"no fraction with denominator <= {M} in [{lo}, {lo} + 1/{M * M}]")
    return r


def continued_fraction(x: Fraction) -> list[int]:
    """Partial quotients of a rational number."""
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    digits = []
    while d:
        q, r = divmod(n, d)
        digits.append(q)
        n, d = d, r
    return digits


def convergents(x: Fraction):
    """Yield the continued-fraction convergents of ``x`` in order."""
    p1, q1, p0, q0 = 1, 0, 0, 1
    for a in continued_fraction(x):
        p1, q1, p0, q0 = a * p1 + p0, a * q1 + q0, p1, q1
        yield Fraction(p1, q1)


@dataclass(frozen=True)
class CoprimeBasis:
    """Pairwise coprime ``bases`` with ``exponents[i][n]`` = multiplicity of bases[i] in values[n]."""

    bases: tuple[int, ...]
    exponents: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.bases)

    def reconstruct(self, n: int) -> int:
        out = 1
        for q, row in zip(self.bases, self.exponents):
            out *= q ** row[n]
        return out


def _insert(basis: list[int], n: int) -> None:
    # Invariant: every value inserted so far is a product of powers of
    # elements of basis + pending; the product of all of them strictly
    # drops on each split, so the loop terminates.
    pending = [n]
    while pending:
        n = pending.pop()
        if n == 1:
            continue
        for i, q in enumerate(basis):
            g = gcd(q, n)
            if g > 1:
                del basis[i]
                pending.extend((g, q // g, n // g))
                break
        else:
            basis.append(n)


def refine_basis(basis: list[int], n: int) -> None:
    """Refine a pairwise coprime list in place so that ``n`` also factors over it."""
    if n < 1:
        raise ValueError("values must be positive")
    _insert(basis, n)


def coprime_basis(values) -> CoprimeBasis:
    """Factor a list of positive integers into pairwise coprime building blocks.

    Quadratic gcd refinement; the result need not consist of primes.
    """
    values = [int(v) for v in values]
    basis: list[int] = []
    for v in values:
        refine_basis(basis, v)
    basis.sort()
    exponents = []
    for q in basis:
        mq = gmpy2.mpz(q)
        exponents.append(tuple(int(gmpy2.remove(v, mq)[1]) if v % q == 0 else 0 for v in values))
    return CoprimeBasis(tuple(basis), tuple(exponents))
