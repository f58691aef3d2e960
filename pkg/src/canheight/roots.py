"""Certified real roots of integer cubics at arbitrary precision.

Roots are isolated with exact sign evaluations at dyadic points, then
refined by Newton steps in mpfr. Every Newton iterate is checked exactly
against the bracket, so a bad step can only cost time.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from gmpy2 import mpfr

from .reals import exact, exponent, working_precision


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


class Cubic:
    """c3 x^3 + c2 x^2 + c1 x + c0 with integer coefficients and c3 > 0."""

    def __init__(self, c3: int, c2: int, c1: int, c0: int):
        if c3 <= 0:
            raise ValueError("leading coefficient must be positive")
        self.c = (c3, c2, c1, c0)

    @property
    def discriminant(self) -> int:
        a, b, c, d = self.c
        return 18 * a * b * c * d - 4 * b**3 * d + b * b * c * c - 4 * a * c**3 - 27 * a * a * d * d

    def sign_at(self, x: Fraction) -> int:
        n, d = x.numerator, x.denominator
        c3, c2, c1, c0 = self.c
        return _sign(((c3 * n + c2 * d) * n + c1 * d * d) * n + c0 * d**3)

    def value(self, x: mpfr) -> mpfr:
        c3, c2, c1, c0 = self.c
        return ((c3 * x + c2) * x + c1) * x + c0

    def slope(self, x: mpfr) -> mpfr:
        c3, c2, c1, _ = self.c
        return (3 * c3 * x + 2 * c2) * x + c1

    def root_bound(self) -> Fraction:
        """A power of two exceeding the absolute value of every root."""
        c3, c2, c1, c0 = self.c
        # Fujiwara: 2 max |c2/c3|, |c1/c3|^(1/2), |c0/(2 c3)|^(1/3)
        e = max(
            (abs(c2) // c3 + 1).bit_length(),
            ((abs(c1) // c3 + 1).bit_length() + 1) // 2,
            ((abs(c0) // (2 * c3) + 1).bit_length() + 2) // 3,
        )
        return Fraction(2 ** (e + 2))

    def _critical_brackets(self) -> tuple[Fraction, Fraction]:
        # dyadic points strictly between consecutive roots (three real roots)
        c3, c2, c1, _ = self.c
        disc = c2 * c2 - 3 * c3 * c1
        k = 64
        while True:
            s = isqrt(disc << (2 * k))
            den = 3 * c3 << k
            left = Fraction(-(c2 << k) - s, den)
            right = Fraction(-(c2 << k) + s, den)
            if self.sign_at(left) > 0 and self.sign_at(right) < 0:
                return left, right
            k *= 2

    def isolate(self) -> list[tuple[Fraction, Fraction]]:
        """Disjoint closed brackets, one per real root, in increasing order."""
        R = self.root_bound()
        if self.discriminant < 0:
            return [(-R, R)]
        if self.discriminant == 0:
            raise ValueError("repeated root")
        left, right = self._critical_brackets()
        return [(-R, left), (left, right), (right, R)]

    def real_roots(self, bits: int) -> list[mpfr]:
        """All real roots, each with relative error <= 2**-bits."""
        return [self.refine(lo, hi, bits) for lo, hi in self.isolate()]

    def refine(self, lo: Fraction, hi: Fraction, bits: int) -> mpfr:
        s_lo = self.sign_at(lo)
        if s_lo == 0:
            return _to_mpfr(lo, bits)
        s_hi = self.sign_at(hi)
        if s_hi == 0:
            return _to_mpfr(hi, bits)
        assert s_lo == -s_hi, "bracket has no sign change"
        target = bits + 4
        prec = 64
        q = (lo + hi) / 2
        for _ in range(100_000):
            width = hi - lo
            scale = max(abs(lo), abs(hi))
            if width * 2**target <= scale:
                return _to_mpfr((lo + hi) / 2, bits)
            with working_precision(prec + 16):
                x = mpfr(q.numerator) / q.denominator
                fx, dfx = self.value(x), self.slope(x)
                step = None
                if dfx != 0:
                    xn = x - fx / dfx
                    if xn.is_finite():
                        step = exact(xn)
            if step is None or not lo < step < hi:
                step = (lo + hi) / 2
            s = self.sign_at(step)
            if s == 0:
                return _to_mpfr(step, bits)
            # probe a tight bracket around the Newton iterate
            e = exponent(mpfr(step)) if step else -target
            probe = Fraction(2) ** (e - prec + 4)
            a, b = step - probe, step + probe
            if lo < a and b < hi and self.sign_at(a) == s_lo and self.sign_at(b) == -s_lo:
                lo, hi = a, b
                prec = min(2 * prec, target + 8)
            else:
                if s == s_lo:
                    lo = step
                else:
                    hi = step
                # tiny Newton moves that still miss the probe mean rounding noise
                if abs(step - q) * 2 ** (prec // 2) <= abs(step):
                    prec = min(2 * prec, target + 8)
            q = step
        raise AssertionError("root refinement did not converge")


def _to_mpfr(x: Fraction, bits: int) -> mpfr:
    with working_precision(bits):
        return mpfr(x.numerator) / x.denominator
