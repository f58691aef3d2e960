"""Local error functions epsilon_p and mu_p at a single prime.

``mu_at`` runs the truncated p-adic duplication loop: plain integers modulo
p**k, losing one digit of precision per unit of valuation stripped off.
``mu_oracle`` recomputes the same number from exact rational doublings and
is used only to check it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import floor_log4_ratio, unique_fraction_in_interval, valuation
from .model import Point, WeierstrassModel, kummer_primitive


class PrecisionExhausted(ArithmeticError):
    """Both residues vanished modulo the current power of p."""


@dataclass(frozen=True)
class LocalMu:
    epsilon0: int
    mu: Fraction


def _val_or_inf(n: int, p: int) -> float | int:
    return float("inf") if n == 0 else valuation(n, p)


def epsilon_at(P: Point, W: WeierstrassModel, p: int) -> int:
    """epsilon_p(P) from primitive integral Kummer coordinates. ``p`` must be prime."""
    d1, d2 = W.delta_pair(*kummer_primitive(P))
    e = min(_val_or_inf(d1, p), _val_or_inf(d2, p))
    assert e != float("inf")
    return int(e)


def _truncated_valuation(r: int, p: int, k: int) -> int:
    # valuation of a residue known modulo p**k; zero means "at least k"
    if r == 0:
        return k
    return min(valuation(r, p), k)


def mu_at(P: Point, W: WeierstrassModel, p: int) -> LocalMu:
    """mu_p(P) without assuming W is minimal at p. ``p`` must be prime."""
    B = valuation(W.delta, p)
    if B <= 1:
        return LocalMu(0, Fraction(0))
    m = floor_log4_ratio(B**3, 3)
    k = (m + 1) * B + 1
    modulus = p**k
    x1, x2 = (c % modulus for c in kummer_primitive(P))
    mu0 = Fraction(0)
    eps0 = 0
    for n in range(m + 1):
        y1, y2 = W.delta_pair(x1, x2)
        y1, y2 = y1 % modulus, y2 % modulus
        ell = min(_truncated_valuation(y1, p, k), _truncated_valuation(y2, p, k))
        if ell >= k:
            raise PrecisionExhausted(f"lost all {k} digits at p={p}, step {n}")
        if n == 0:
            eps0 = ell
        if ell == 0:
            return LocalMu(eps0, mu0)
        mu0 += Fraction(ell, 4 ** (n + 1))
        pl = p**ell
        k -= ell
        modulus = p**k
        x1, x2 = (y1 // pl) % modulus, (y2 // pl) % modulus
    return LocalMu(eps0, unique_fraction_in_interval(mu0, B))


def mu_oracle(P: Point, W: WeierstrassModel, p: int, terms: int | None = None) -> Fraction:
    """mu_p(P) from sum 4^(-n-1) eps_p(2^n P) over exact rational doublings."""
    B = valuation(W.delta, p)
    if B == 0:
        return Fraction(0)
    M = max(B, 2)
    needed = floor_log4_ratio(B * M * M, 3) + 1
    if terms is None:
        terms = needed
    if terms < needed:
        raise ValueError(f"need at least {needed} terms, got {terms}")
    mu0 = Fraction(0)
    Q = P
    for n in range(terms):
        mu0 += Fraction(epsilon_at(Q, W, p), 4 ** (n + 1))
        Q = W.double(Q)
    return unique_fraction_in_interval(mu0, M)
