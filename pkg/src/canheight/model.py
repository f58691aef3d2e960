"""Integral Weierstrass models, rational points and Kummer coordinates."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional


class SingularCurve(ValueError):
    """The discriminant of the equation vanishes."""


class NonIntegralResult(ValueError):
    """A change of coordinates produced non-integral coefficients."""


class NotOnCurve(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """A rational point; ``x is None`` encodes the point at infinity O."""

    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if (self.x is None) != (self.y is None):
            raise ValueError("give both coordinates or neither")
        if self.x is not None:
            object.__setattr__(self, "x", Fraction(self.x))
            object.__setattr__(self, "y", Fraction(self.y))

    @property
    def is_zero(self) -> bool:
        return self.x is None

    def __repr__(self) -> str:
        return "O" if self.is_zero else f"({self.x}, {self.y})"


O = Point()

KummerPair = tuple[int, int]


@dataclass(frozen=True)
class WeierstrassModel:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    b2: int = field(init=False)
    b4: int = field(init=False)
    b6: int = field(init=False)
    b8: int = field(init=False)
    delta: int = field(init=False)

    def __post_init__(self):
        a1, a2, a3, a4, a6 = (int(a) for a in self.coefficients)
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        delta = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
        if delta == 0:
            raise SingularCurve(f"discriminant of {list(self.coefficients)} is zero")
        for name, value in zip(("a1", "a2", "a3", "a4", "a6", "b2", "b4", "b6", "b8", "delta"),
                               (a1, a2, a3, a4, a6, b2, b4, b6, b8, delta)):
            object.__setattr__(self, name, value)

    @property
    def coefficients(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def height_bound(self) -> int:
        """||W||: the largest absolute value of a coefficient."""
        return max(1, *(abs(a) for a in self.coefficients))

    def __repr__(self) -> str:
        return f"WeierstrassModel{list(self.coefficients)}"

    # -- points ----------------------------------------------------------

    def contains(self, P: Point) -> bool:
        if P.is_zero:
            return True
        x, y = P.x, P.y
        return (y * y + self.a1 * x * y + self.a3 * y
                == x**3 + self.a2 * x * x + self.a4 * x + self.a6)

    def point(self, x, y) -> Point:
        P = Point(Fraction(x), Fraction(y))
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on {self}")
        return P

    def negate(self, P: Point) -> Point:
        if P.is_zero:
            return P
        return Point(P.x, -P.y - self.a1 * P.x - self.a3)

    def psi2(self, P: Point) -> Fraction:
        """2y + a1 x + a3; its square is 4x^3 + b2 x^2 + 2 b4 x + b6."""
        return 2 * P.y + self.a1 * P.x + self.a3

    def add(self, P: Point, Q: Point) -> Point:
        if P.is_zero:
            return Q
        if Q.is_zero:
            return P
        a1, a2, a3, a4, a6 = self.coefficients
        x1, y1, x2, y2 = P.x, P.y, Q.x, Q.y
        if x1 == x2:
            if y1 + y2 + a1 * x2 + a3 == 0:
                return O
            den = 2 * y1 + a1 * x1 + a3
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
            nu = (-x1**3 + a4 * x1 + 2 * a6 - a3 * y1) / den
        else:
            lam = (y2 - y1) / (x2 - x1)
            nu = (y1 * x2 - y2 * x1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = -(lam + a1) * x3 - nu - a3
        return Point(x3, y3)

    def double(self, P: Point) -> Point:
        return self.add(P, P)

    def multiply(self, k: int, P: Point) -> Point:
        if k < 0:
            return self.multiply(-k, self.negate(P))
        result, base = O, P
        while k:
            if k & 1:
                result = self.add(result, base)
            k >>= 1
            if k:
                base = self.add(base, base)
        return result

    # -- Kummer line -------------------------------------------------------

    def delta_pair(self, x1: int, x2: int) -> KummerPair:
        """The duplication quartics (delta1, delta2) evaluated at (x1, x2)."""
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        s1, s2 = x1 * x1, x2 * x2
        p12 = x1 * x2
        d1 = s1 * s1 - b4 * s1 * s2 - 2 * b6 * p12 * s2 - b8 * s2 * s2
        d2 = 4 * s1 * p12 + b2 * s1 * s2 + 2 * b4 * p12 * s2 + b6 * s2 * s2
        return d1, d2


def derive_invariants(a1, a2, a3, a4, a6) -> WeierstrassModel:
    return WeierstrassModel(a1, a2, a3, a4, a6)


def kummer_primitive(P: Point) -> KummerPair:
    """Coprime integers (x1, x2), x2 >= 0, with x(P) = x1/x2; (1, 0) for O."""
    if P.is_zero:
        return (1, 0)
    return (P.x.numerator, P.x.denominator)


def primitive(k: KummerPair) -> KummerPair:
    x1, x2 = k
    g = gcd(x1, x2)
    if g == 0:
        raise ValueError("(0, 0) is not a Kummer pair")
    x1, x2 = x1 // g, x2 // g
    if x2 < 0 or (x2 == 0 and x1 < 0):
        x1, x2 = -x1, -x2
    return x1, x2


def duplicate_kummer(k: KummerPair, W: WeierstrassModel) -> KummerPair:
    """Kummer coordinates of 2P from those of P (not reduced)."""
    x1, x2 = k
    if x1 == 0 and x2 == 0:
        raise ValueError("(0, 0) is not a Kummer pair")
    out = W.delta_pair(x1, x2)
    assert out != (0, 0), "nonsingular curves never map a Kummer pair to (0, 0)"
    return out


def double_point(P: Point, W: WeierstrassModel) -> Point:
    return W.double(P)


def add_points(P: Point, Q: Point, W: WeierstrassModel) -> Point:
    return W.add(P, Q)


def _as_integer(value: Fraction, name: str) -> int:
    if value.denominator != 1:
        raise NonIntegralResult(f"{name} = {value} is not an integer")
    return value.numerator


def transform_model(W: WeierstrassModel, u, r, s, t) -> tuple[WeierstrassModel, Callable[[Point], Point]]:
    """Apply x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.

    ``u`` may be any nonzero rational as long as the new coefficients are
    integral (u = 1/k scales a model up). Returns the new model and the map
    sending points of W to the corresponding points of the new model.
    """
    u, r, s, t = (Fraction(v) for v in (u, r, s, t))
    if u == 0:
        raise ValueError("u must be nonzero")
    a1, a2, a3, a4, a6 = W.coefficients
    new = (
        (a1 + 2 * s) / u,
        (a2 - s * a1 + 3 * r - s * s) / u**2,
        (a3 + r * a1 + 2 * t) / u**3,
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4,
        (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6,
    )
    W2 = WeierstrassModel(*(_as_integer(c, f"a{i}") for c, i in zip(new, (1, 2, 3, 4, 6))))

    def image(P: Point) -> Point:
        if P.is_zero:
            return P
        xp = (P.x - r) / u**2
        return Point(xp, (P.y - s * u**2 * xp - t) / u**3)

    return W2, image


def inverse_transform(u, r, s, t) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Parameters [u', r', s', t'] undoing [u, r, s, t]."""
    u, r, s, t = (Fraction(v) for v in (u, r, s, t))
    return 1 / u, -r / u**2, -s / u, (r * s - t) / u**3
