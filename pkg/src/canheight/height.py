"""Canonical height on E(Q): h(P) - Psi_oo(P) - Psi_f(P).

The normalization is twice the one in Silverman's book, so for example
P = (0, 0) on y^2 + y = x^3 - x has height 0.05111...
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2

import gmpy2
from gmpy2 import mpfr, mpz

from .arch_local import local_height_infinity, log_phi_bound, psi_infinity, psi_infinity_oracle_series
from .model import O, Point, WeierstrassModel, kummer_primitive
from .nonarch_global import FormalLogSum, PsiFiniteOptions, eval_log_sum, psi_finite
from .nonarch_local import mu_at
from .reals import BigReal, log_rational, working_precision

logger = logging.getLogger(__name__)

GUARD_BITS = 8
# Mazur: a rational torsion point has order at most 12
MAX_TORSION_ORDER = 12
ARCH_METHODS = ("agm", "series")


@dataclass(frozen=True)
class TorsionCheck:
    order: int | None

    def __bool__(self) -> bool:
        return self.order is not None


@dataclass(frozen=True)
class HeightBreakdown:
    h_naive: BigReal
    psi_finite: FormalLogSum
    psi_finite_value: BigReal
    psi_infinity: BigReal | None
    h_canonical: BigReal
    precision_bits: int
    torsion_order: int | None = None


def _magnitude_bits(*values) -> int:
    return max(abs(int(v)).bit_length() for v in values).bit_length() + 2


def naive_height(P: Point, d: int) -> BigReal:
    """log max(|x1|, x2) for the primitive Kummer pair of P; 0 at O."""
    if P.is_zero:
        return mpfr(0)
    x1, x2 = kummer_primitive(P)
    return log_rational(Fraction(max(abs(x1), x2)), d)


# -- torsion ------------------------------------------------------------------


def _add_mod(W: WeierstrassModel, P, Q, p: int):
    # affine points as (x, y) residues, None for O
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = (c % p for c in W.coefficients)
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2 + a1 * x2 + a3) % p == 0:
            return None
        den = (2 * y1 + a1 * x1 + a3) % p
        num = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) % p
    else:
        den = (x2 - x1) % p
        num = (y2 - y1) % p
    lam = num * pow(den, -1, p) % p
    nu = (y1 - lam * x1) % p
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % p
    y3 = (-(lam + a1) * x3 - nu - a3) % p
    return (x3, y3)


def _order_mod(W: WeierstrassModel, P: Point, p: int) -> int | None:
    """Order of P mod a good odd prime p if it is <= 12; 0 if P reduces to O."""
    if P.x.denominator % p == 0:
        return 0
    base = (P.x.numerator * pow(P.x.denominator, -1, p) % p,
            P.y.numerator * pow(P.y.denominator, -1, p) % p)
    Q = base
    for k in range(1, MAX_TORSION_ORDER + 1):
        if Q is None:
            return k
        Q = _add_mod(W, Q, base, p)
    return None


def _good_primes(W: WeierstrassModel, count: int):
    p = 3
    while count:
        if gmpy2.is_prime(p) and W.delta % p:
            yield p
            count -= 1
        p += 2


def is_torsion(W: WeierstrassModel, P: Point) -> TorsionCheck:
    """Exact torsion test; the result is truthy with its order for torsion points.

    Reduction modulo good odd primes is injective on torsion, so a point that
    reduces to O or has reduced order > 12 somewhere is of infinite order.
    Candidates surviving that filter are confirmed with the exact group law.
    """
    if P.is_zero:
        return TorsionCheck(1)
    orders = set()
    for p in _good_primes(W, 4):
        k = _order_mod(W, P, p)
        if k is None or k == 0:
            return TorsionCheck(None)
        orders.add(k)
        if len(orders) > 1:
            return TorsionCheck(None)
    (k,) = orders
    return TorsionCheck(k) if W.multiply(k, P).is_zero else TorsionCheck(None)


# -- canonical height ----------------------------------------------------------


def _series_terms(W: WeierstrassModel, bits: int) -> int:
    C = max(log_phi_bound(W), 1.0)
    return ceil((bits + 2 + log2(C)) / 2) + 1


def _psi_infinity(W, P, bits: int, arch_method: str) -> BigReal:
    if arch_method == "agm":
        return psi_infinity(W, P, bits)
    if arch_method == "series":
        return psi_infinity_oracle_series(W, P, _series_terms(W, bits), bits)
    raise ValueError(f"unknown archimedean method {arch_method!r}")


def canonical_height(
    W: WeierstrassModel,
    P: Point,
    d: int,
    opts: PsiFiniteOptions | None = None,
    arch_method: str = "agm",
) -> HeightBreakdown:
    """hat h(P) with absolute error <= 2**-d, together with its components."""
    bits = d + GUARD_BITS
    if P.is_zero:
        zero = mpfr(0)
        return HeightBreakdown(zero, FormalLogSum(), zero, None, zero, d, 1)
    torsion = is_torsion(W, P)
    h = naive_height(P, bits)
    pf = psi_finite(P, W, opts)
    pf_value = eval_log_sum(pf, bits)
    two_torsion = W.psi2(P) == 0
    pinf = None if two_torsion else _psi_infinity(W, P, bits, arch_method)
    if torsion:
        return HeightBreakdown(h, pf, pf_value, pinf, mpfr(0), d, torsion.order)
    wp = bits + _magnitude_bits(W.height_bound, P.x.numerator, P.x.denominator) + 8
    with working_precision(wp):
        value = mpfr(h) - mpfr(pinf) - mpfr(pf_value)
    return HeightBreakdown(h, pf, pf_value, pinf, value, d, None)


def canonical_height_value(W: WeierstrassModel, P: Point, d: int, **kwargs) -> BigReal:
    return canonical_height(W, P, d, **kwargs).h_canonical


def canonical_height_limit_oracle(W: WeierstrassModel, P: Point, n: int, d: int) -> BigReal:
    """h(2^n P) / 4^n from exact Kummer duplication."""
    if n > 16:
        raise ValueError("the coordinates grow by a factor 4 per doubling; keep n <= 16")
    x1, x2 = (mpz(c) for c in kummer_primitive(P))
    for _ in range(n):
        if x2 == 0:
            break
        x1, x2 = W.delta_pair(x1, x2)
        g = gmpy2.gcd(x1, x2)
        x1, x2 = x1 // g, x2 // g
    if x2 == 0:
        return mpfr(0)
    top = max(abs(x1), abs(x2))
    with working_precision(d + top.bit_length().bit_length() + 8):
        return gmpy2.log(mpfr(top)) / 4**n


def local_height_nonarch(W: WeierstrassModel, P: Point, p: int, d: int) -> BigReal:
    """log max(1, |x(P)|_p) - mu_p(P) log p; ``p`` must be prime."""
    if P.is_zero:
        raise ValueError("P must not be O")
    v = -gmpy2.remove(mpz(P.x.denominator), p)[1] if P.x.denominator % p == 0 else 0
    coeff = max(0, -v) - mu_at(P, W, p).mu
    if coeff == 0:
        return mpfr(0)
    with working_precision(d + 16):
        return log_rational(Fraction(p), d + 16) * coeff.numerator / coeff.denominator


def height_pairing(W: WeierstrassModel, P: Point, Q: Point, d: int) -> BigReal:
    """<P, Q> = (hat h(P+Q) - hat h(P) - hat h(Q)) / 2."""
    parts = [canonical_height(W, R, d + 2).h_canonical for R in (W.add(P, Q), P, Q)]
    with working_precision(max(p.precision for p in parts) + 4):
        return (parts[0] - parts[1] - parts[2]) / 2


__all__ = [
    "HeightBreakdown",
    "TorsionCheck",
    "canonical_height",
    "canonical_height_limit_oracle",
    "height_pairing",
    "is_torsion",
    "local_height_infinity",
    "local_height_nonarch",
    "naive_height",
    "O",
]
