"""Total finite-place correction sum_p mu_p(P) log p, without factoring.

The result is an exact formal sum sum_i mu_i log q_i over pairwise coprime
integers q_i, obtained by running the Kummer duplication modulo a power of
the part of the discriminant that can contribute, then splitting the gcds
that appear into coprime building blocks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod

import gmpy2

from .arith import (
    convergents,
    coprime_basis,
    floor_log,
    floor_log4_ratio,
    gcd_power,
    refine_basis,
    simplest_fraction_in_interval,
)
from .model import Point, WeierstrassModel, kummer_primitive
from .nonarch_local import mu_at
from .reals import BigReal, working_precision

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FormalLogSum:
    """sum mu * log q over pairwise coprime q >= 2 with positive rational mu."""

    terms: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(sorted((int(q), Fraction(mu)) for q, mu in self.terms)))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{mu}*log({q})" for q, mu in self.terms)

    def evaluate(self, bits: int) -> BigReal:
        return eval_log_sum(self, bits)


def eval_log_sum(s: FormalLogSum, bits: int) -> BigReal:
    """Numerical value of a formal log sum with absolute error <= 2**-bits."""
    size = 1 + sum(abs(mu) * q.bit_length() for q, mu in s.terms)
    wp = bits + int(size).bit_length() + len(s.terms).bit_length() + 16
    with working_precision(wp):
        total = gmpy2.mpfr(0)
        for q, mu in s.terms:
            total += gmpy2.log(gmpy2.mpfr(q)) * mu.numerator / mu.denominator
        return total


@dataclass(frozen=True)
class PsiFiniteOptions:
    """Practical variants of the algorithm; all of them give the same value.

    trial_division_bound: strip primes <= T from the discriminant first and
        handle them one at a time (1 disables it).
    use_2b4_variant: smaller truncation point, with the answer read off a
        continued-fraction convergent.
    incremental_basis: keep the coprime blocks up to date inside the loop and
        use a per-block bound, truncation point and modulus.
    shrink_modulus: reduce modulo D^(m+1-n) g0 at step n rather than D^(m+1) g0.
    """

    trial_division_bound: int = 1
    use_2b4_variant: bool = False
    incremental_basis: bool = False
    shrink_modulus: bool = False

    def __post_init__(self):
        if self.trial_division_bound < 1:
            raise ValueError("trial_division_bound must be >= 1")


def _truncation(B: int, use_2b4: bool) -> int:
    if use_2b4:
        return floor_log4_ratio(2 * B**4, 3)
    return floor_log4_ratio(B**5, 3)


def _select(a: Fraction, B: int, use_2b4: bool) -> Fraction:
    if not use_2b4:
        return simplest_fraction_in_interval(a, a + Fraction(1, B**4))
    for c in convergents(a):
        if c >= a and c <= a + Fraction(1, 2 * c.denominator * B * B):
            return c
    raise AssertionError("the last convergent is a itself")


def _trial_divide(n: int, T: int) -> tuple[list[int], int]:
    """Primes p <= T dividing n, and n with those primes removed."""
    small = []
    p = 2
    while p <= T and n > 1:
        if n % p == 0:
            small.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    return small, n


def _partial_sum(exps, upto: int) -> Fraction:
    return sum((Fraction(e, 4 ** (n + 1)) for n, e in enumerate(exps[: upto + 1])), Fraction(0))


def psi_finite(P: Point, W: WeierstrassModel, opts: PsiFiniteOptions | None = None) -> FormalLogSum:
    """sum_p mu_p(P) log p as an exact formal sum of logs."""
    opts = opts or PsiFiniteOptions()
    if P.is_zero:
        return FormalLogSum()
    y1, y2 = W.delta_pair(*kummer_primitive(P))
    g0 = gcd(y1, y2)
    x1, x2 = y1 // g0, y2 // g0

    terms: list[tuple[int, Fraction]] = []
    disc = abs(W.delta)
    base = 2
    if opts.trial_division_bound >= 2:
        small, disc = _trial_divide(disc, opts.trial_division_bound)
        for p in small:
            if g0 % p == 0:
                mu = mu_at(P, W, p).mu
                if mu:
                    terms.append((p, mu))
        base = opts.trial_division_bound

    D = gcd_power(disc, g0)
    B = floor_log(D, base)
    if B <= 1:
        return FormalLogSum(terms)
    g0 = gcd(g0, D)

    if opts.incremental_basis:
        terms += _incremental(W, x1, x2, g0, D, base, opts)
    else:
        terms += _batch(W, x1, x2, g0, D, B, opts)
    return FormalLogSum(terms)


def _batch(W, x1, x2, g0, D, B, opts) -> list[tuple[int, Fraction]]:
    m = _truncation(B, opts.use_2b4_variant)
    logger.debug("psi_finite: D has %d bits, B=%d, m=%d", D.bit_length(), B, m)
    gs = [g0]
    for n in range(1, m + 1):
        modulus = D ** (m + 1 - n if opts.shrink_modulus else m + 1) * g0
        y1, y2 = W.delta_pair(x1, x2)
        y1, y2 = y1 % modulus, y2 % modulus
        gn = gcd(D, gcd(y1, y2))
        x1, x2 = y1 // gn, y2 // gn
        gs.append(gn)
    basis = coprime_basis(gs)
    out = []
    for q, exps in zip(basis.bases, basis.exponents):
        mu = _select(_partial_sum(exps, m), B, opts.use_2b4_variant)
        if mu:
            out.append((q, mu))
    return out


@dataclass
class _Block:
    q: int
    D: int
    B: int
    m: int


def _incremental(W, x1, x2, g0, D, base, opts) -> list[tuple[int, Fraction]]:
    cache: dict[int, _Block] = {}

    def block(q: int) -> _Block:
        if q not in cache:
            Dq = gcd_power(D, q)
            Bq = floor_log(Dq, base)
            mq = _truncation(Bq, opts.use_2b4_variant) if Bq >= 2 else -1
            cache[q] = _Block(q, Dq, Bq, mq)
        return cache[q]

    basis: list[int] = []
    refine_basis(basis, g0)
    gs = [g0]
    n = 1
    while True:
        active = [block(q) for q in basis if block(q).m >= n]
        if not active:
            break
        D_active = prod(b.D for b in active)
        modulus = prod(b.D ** (b.m + 1) for b in active)
        y1, y2 = W.delta_pair(x1, x2)
        y1, y2 = y1 % modulus, y2 % modulus
        gn = gcd(D_active, gcd(y1, y2))
        x1, x2 = y1 // gn, y2 // gn
        gs.append(gn)
        if gn > 1:
            refine_basis(basis, gn)
        n += 1

    out = []
    for q in sorted(basis):
        b = block(q)
        if b.B <= 1:
            continue
        mq = gmpy2.mpz(q)
        exps = [int(gmpy2.remove(g, mq)[1]) if g % q == 0 else 0 for g in gs[: b.m + 1]]
        mu = _select(_partial_sum(exps, b.m), b.B, opts.use_2b4_variant)
        if mu:
            out.append((q, mu))
    return out
