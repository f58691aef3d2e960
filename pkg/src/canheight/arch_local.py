"""Archimedean local height by the AGM / 2-isogeny method.

Normalization: lambda(Q) = log max(1, |x(Q)|) - Psi(Q) with
Psi(Q) = -sum_n 4^(-n-1) log Phi(2^n Q), so lambda(Q) - log|x(Q)| -> 0 at O.
Under x = u^2 x' + r this makes lambda drop by 2 log|u| and leaves it
unchanged for u = 1, which is all the reduction below uses.

The reduction to y^2 = x (x + a0^2)(x + b0^2) records two kinds of
corrections, both exact consequences of that normalization:

* duplication:  lambda(2P) = 4 lambda(P) - log|psi2(P)^2|, with
  psi2 = 2y + a1 x + a3;
* the 2-isogeny (x, y) -> ((x^2+ux+v)/x, ...) of y^2 = x(x^2+ux+v):
  lambda'(phi P) = 2 lambda(P) - log|x(P)|.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, log2

import gmpy2
from gmpy2 import mpfr

from .model import Point, WeierstrassModel, primitive
from .reals import (
    BigReal,
    exponent,
    log_near_one,
    log_rational,
    to_real,
    working_precision,
)
from .roots import Cubic

logger = logging.getLogger(__name__)

# guard bits on top of d + N (and the extra n bits per AGM term)
GUARD_BITS = 32
# tolerated cancellation in a subtraction involving a root before retrying
LOSS_BUDGET = 24


class TwoTorsionPoint(ValueError):
    """2P = O: the AGM method does not apply."""


class TorsionOrbitHitO(ValueError):
    """Some 2^n P with n < terms is the point at infinity."""


@dataclass(frozen=True)
class AgmInput:
    a0: BigReal
    b0: BigReal
    x0: BigReal

    def __post_init__(self):
        if not (0 < self.b0 < self.a0):
            raise ValueError("need 0 < b0 < a0")
        if self.x0 < 0:
            raise ValueError("need x0 >= 0")


@dataclass
class CorrectionLedger:
    """lambda_W(P) = (lambda_0(P0) + sum log|value|) / degree_factor.

    Each additive term keeps the number whose log is taken: a Fraction when
    it is exact, otherwise an mpfr at the working precision.
    """

    degree_factor: Fraction = Fraction(1)
    additive_terms: list[tuple[str, object]] = field(default_factory=list)

    def record(self, label: str, value, degree: int) -> None:
        self.additive_terms.append((label, value))
        self.degree_factor *= degree

    def unwind(self, lam0: BigReal, bits: int) -> BigReal:
        with working_precision(bits):
            total = mpfr(lam0)
            for _, value in self.additive_terms:
                if isinstance(value, Fraction):
                    total += log_rational(value, bits)
                else:
                    total += gmpy2.log(abs(value))
            return total * self.degree_factor.denominator / self.degree_factor.numerator


class _Loss(Exception):
    def __init__(self, bits: int):
        self.bits = bits


def _checked_sub(a: mpfr, b: mpfr, budget: int) -> mpfr:
    diff = a - b
    lost = max(exponent(a), exponent(b)) - exponent(diff)
    if diff == 0 or lost > budget:
        raise _Loss(max(lost, 64))
    return diff


def _rat(q: Fraction) -> mpfr:
    return mpfr(gmpy2.mpq(q.numerator, q.denominator))


def _is_two_torsion(W: WeierstrassModel, P: Point) -> bool:
    return not P.is_zero and W.psi2(P) == 0


def reduce_to_agm_data(W: WeierstrassModel, P: Point, bits: int) -> tuple[AgmInput, CorrectionLedger]:
    """Move P to a point on the identity component of y^2 = x(x+a0^2)(x+b0^2).

    ``bits`` is the relative precision wanted for a0, b0 and x0.
    """
    if P.is_zero:
        raise ValueError("P must not be O")
    if _is_two_torsion(W, P):
        raise TwoTorsionPoint(f"{P} has order 2")
    cubic = Cubic(4, W.b2, 2 * W.b4, W.b6)
    root_bits = bits + 32
    for _ in range(64):
        try:
            return _reduce(W, P, cubic, bits, root_bits)
        except _Loss as exc:
            root_bits += exc.bits + 32
            logger.debug("cancellation of %d bits; roots now at %d bits", exc.bits, root_bits)
    raise AssertionError("precision escalation did not terminate")


def _reduce(W, P, cubic: Cubic, bits: int, root_bits: int) -> tuple[AgmInput, CorrectionLedger]:
    ledger = CorrectionLedger()
    # completing the square (u = 1) leaves (2Y)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    wp = root_bits
    roots = cubic.real_roots(root_bits)
    with working_precision(wp):
        if len(roots) == 3:
            e1, e2, e3 = roots
            x = P.x
            if not _on_identity_component(W, x):
                # the egg: use 2P, which lies on the identity component
                psi_sq = W.psi2(P) ** 2
                ledger.record("duplication: log|psi2(P)^2|", psi_sq, 4)
                x = W.double(P).x
            a0sq = _checked_sub(e3, e1, LOSS_BUDGET)
            b0sq = _checked_sub(e3, e2, LOSS_BUDGET)
            x0 = _checked_sub(_rat(x), e3, LOSS_BUDGET) if x != 0 else -e3
            if x0 < 0:
                # x sits on the far side of a root only through rounding
                raise _Loss(64)
        else:
            (e,) = roots
            X = _checked_sub(_rat(P.x), e, LOSS_BUDGET) if P.x != 0 else -e
            if X <= 0:
                raise _Loss(64)
            # y^2 = X (X^2 + uX + v) after x -> X + e, with v = f'(e)/4 > 0
            u = 3 * e + mpfr(W.b2) / 4
            v = (3 * e * e + mpfr(W.b2) / 2 * e + mpfr(W.b4) / 2)
            _guard_quadratic(e, W, v)
            sv = gmpy2.sqrt(v)
            # image under the 2-isogeny, then shift its largest root u + 2 sqrt(v) to 0
            ledger.record("2-isogeny: log|X(P)|", X, 2)
            a0sq = 4 * sv
            b0sq = u + 2 * sv if u >= 0 else _stable_b0sq(u, v, sv)
            x0 = (X - sv) ** 2 / X
        a0, b0 = gmpy2.sqrt(a0sq), gmpy2.sqrt(b0sq)
        if b0 >= a0:
            raise _Loss(64)
        return AgmInput(a0, b0, x0), ledger


def _guard_quadratic(e: mpfr, W: WeierstrassModel, v: mpfr) -> None:
    # v = 3e^2 + (b2/2) e + b4/2 may cancel; check the loss against its terms
    big = max(exponent(3 * e * e), exponent(mpfr(W.b2) / 2 * e), exponent(mpfr(W.b4)))
    if v <= 0 or big - exponent(v) > LOSS_BUDGET:
        raise _Loss(max(64, big - exponent(v)) if v > 0 else 64)


def _stable_b0sq(u: mpfr, v: mpfr, sv: mpfr) -> mpfr:
    # u + 2 sqrt(v) = (u^2 - 4v) / (u - 2 sqrt(v)) when u is very negative
    return (u * u - 4 * v) / (u - 2 * sv)


def _on_identity_component(W: WeierstrassModel, x: Fraction) -> bool:
    """Exact test x >= e3 for a real point when all three 2-torsion roots are real.

    x(P) lies in [e1, e2] or [e3, oo); the critical point
    c+ = (-b2 + sqrt(b2^2 - 24 b4)) / 12 separates the two ranges.
    """
    t = 12 * x + W.b2
    return t > 0 and t * t > W.b2 * W.b2 - 24 * W.b4


def agm_truncation(a0: BigReal, b0: BigReal, bits: int) -> int:
    """Number of AGM terms N for a tail bound of 2**-bits."""
    with working_precision(max(a0.precision, b0.precision, 64) + 8):
        r = (a0 - b0) / b0
        theta = r + gmpy2.sqrt(r)
        if theta <= 0:
            return 3
        inner = bits + 2 + float(gmpy2.log2(theta))
    if inner <= 1:
        return 3
    return max(3, ceil(log2(inner)) + 1)


def agm_step(a: BigReal, b: BigReal, x: BigReal) -> tuple[BigReal, BigReal, BigReal]:
    """One step of the AGM and of the point preimage x_n.

    x_n = (x - ab + sqrt((x + a^2)(x + b^2))) / 2, rewritten without the
    cancellation between -ab and the square root.
    """
    a2, b2 = a * a, b * b
    ab = a * b
    S = gmpy2.sqrt((x + a2) * (x + b2))
    xn = x / 2 * (1 + (x + a2 + b2) / (S + ab))
    return (a + b) / 2, gmpy2.sqrt(ab), xn


def agm_lambda(inp: AgmInput, bits: int) -> BigReal:
    """lambda(P) on y^2 = x(x+a0^2)(x+b0^2) for P on the identity component.

    lambda = log(x1 + a1^2) + sum_{n>=1} 2^n log((x_{n+1} + a_{n+1}^2)/(x_n + a_n^2)),
    truncated after N terms; absolute error <= 2**-bits.
    """
    N = agm_truncation(inp.a0, inp.b0, bits)
    wp = bits + 2 * N + GUARD_BITS + 8
    near_one_cut = -(wp // 8)
    with working_precision(wp + N):
        a, b, x = mpfr(inp.a0), mpfr(inp.b0), mpfr(inp.x0)
        a, b, x = agm_step(a, b, x)
        prev = x + a * a
        total = gmpy2.log(prev)
        for n in range(1, N + 1):
            a, b, x = agm_step(a, b, x)
            cur = x + a * a
            ratio = cur / prev
            s = 1 - ratio
            if s == 0:
                term = mpfr(0)
            elif exponent(s) < near_one_cut:
                term = log_near_one(ratio, wp + n)
            else:
                term = gmpy2.log(ratio)
            total += term * 2**n
            prev = cur
        return total


def _working_bits(W: WeierstrassModel, P: Point, bits: int) -> int:
    size = W.height_bound.bit_length() + max(P.x.numerator.bit_length(), P.x.denominator.bit_length())
    return bits + GUARD_BITS + size.bit_length() + 8


def local_height_infinity(W: WeierstrassModel, P: Point, bits: int) -> BigReal:
    """lambda_oo(P) on the model W, absolute error <= 2**-bits."""
    wp = _working_bits(W, P, bits)
    inp, ledger = reduce_to_agm_data(W, P, wp)
    lam0 = agm_lambda(inp, wp)
    return ledger.unwind(lam0, wp)


def psi_infinity(W: WeierstrassModel, P: Point, bits: int) -> BigReal:
    """Psi_oo(P) = log max(1, |x(P)|) - lambda_oo(P), absolute error <= 2**-bits."""
    if P.is_zero:
        raise ValueError("Psi_oo is evaluated at affine points only")
    wp = _working_bits(W, P, bits)
    lam = local_height_infinity(W, P, bits + 4)
    with working_precision(wp):
        x = abs(P.x)
        log_x = log_rational(x, wp) if x > 1 else mpfr(0)
        return log_x - lam


# -- series oracle -------------------------------------------------------------


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rhs)
    A = [row[:] + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col] / A[col][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] / A[i][i] for i in range(n)]


def _bezout_bound(W: WeierstrassModel) -> Fraction:
    """K with max(|x1|,|x2|)^7 <= K max(|delta1|,|delta2|) * max(|x1|,|x2|)^3.

    Solves A1 delta1 + A2 delta2 = x1^7 and B1 delta1 + B2 delta2 = x2^7 with
    cubic forms A_i, B_i, which exist because the resultant is nonzero.
    """
    b2, b4, b6, b8 = W.b2, W.b4, W.b6, W.b8
    # coefficients by powers x1^(4-i) x2^i
    d1 = [1, 0, -b4, -2 * b6, -b8]
    d2 = [0, 4, b2, 2 * b4, b6]
    matrix = [[Fraction(0)] * 8 for _ in range(8)]
    for j in range(4):  # A1 = sum alpha_j x1^(3-j) x2^j
        for i in range(5):
            matrix[i + j][j] += d1[i]
            matrix[i + j][4 + j] += d2[i]
    K = Fraction(0)
    for target in (0, 7):
        rhs = [Fraction(int(k == target)) for k in range(8)]
        sol = _solve(matrix, rhs)
        K = max(K, sum(abs(c) for c in sol))
    return K


def log_phi_bound(W: WeierstrassModel) -> float:
    """C >= sup |log Phi_oo| over E(R)."""
    upper = max(1 + abs(W.b4) + 2 * abs(W.b6) + abs(W.b8), 4 + abs(W.b2) + 2 * abs(W.b4) + abs(W.b6))
    K = _bezout_bound(W)
    log2_K = log2(K.numerator) - log2(K.denominator) if K > 0 else 0.0
    return max(log2(upper), log2_K) * 0.6931471805599453 + 1e-9


def series_error_bound(W: WeierstrassModel, terms: int, bits: int) -> float:
    """Error bound of psi_infinity_oracle_series: C 4^-terms / 3 + 2^-bits."""
    return log_phi_bound(W) * 4.0 ** (-terms) / 3 + 2.0 ** (-bits)


def _two_power_torsion(W: WeierstrassModel, P: Point, terms: int) -> bool:
    # over Q a torsion point of 2-power order has order dividing 8
    k = (P.x.numerator, P.x.denominator)
    for _ in range(min(terms, 3)):
        k = primitive(W.delta_pair(*k))
        if k[1] == 0:
            return True
    return False


def psi_infinity_oracle_series(W: WeierstrassModel, P: Point, terms: int, bits: int) -> BigReal:
    """Psi_oo(P) = -sum_{n<terms} 4^(-n-1) log Phi_oo(2^n P), summed directly.

    Kummer coordinates are carried as reals rescaled to max norm 1 at each
    step; exact integers would grow by a factor 4 per doubling.
    """
    if P.is_zero:
        raise ValueError("P must not be O")
    if _two_power_torsion(W, P, terms):
        raise TorsionOrbitHitO(f"a multiple 2^n P with n < {terms} is O")
    wp = bits + 2 * terms + 64
    with working_precision(wp):
        b2, b4, b6, b8 = (mpfr(c) for c in (W.b2, W.b4, W.b6, W.b8))
        x1, x2 = to_real(P.x, wp), mpfr(1)
        norm = max(abs(x1), x2)
        x1, x2 = x1 / norm, x2 / norm
        total = mpfr(0)
        for n in range(terms):
            s1, s2, p12 = x1 * x1, x2 * x2, x1 * x2
            d1 = s1 * s1 - b4 * s1 * s2 - 2 * b6 * p12 * s2 - b8 * s2 * s2
            d2 = 4 * s1 * p12 + b2 * s1 * s2 + 2 * b4 * p12 * s2 + b6 * s2 * s2
            out = max(abs(d1), abs(d2))
            total -= gmpy2.log(out) / 4 ** (n + 1)
            x1, x2 = d1 / out, d2 / out
        return total
