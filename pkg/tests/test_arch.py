import random
from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpfr

from canheight.arch_local import (
    AgmInput,
    TorsionOrbitHitO,
    TwoTorsionPoint,
    agm_lambda,
    agm_step,
    agm_truncation,
    psi_infinity,
    psi_infinity_oracle_series,
    reduce_to_agm_data,
    series_error_bound,
)
from canheight.model import WeierstrassModel
from canheight.reals import exact, working_precision
from canheight.roots import Cubic
from support import random_nontorsion

TWO = mpfr(2)


def close(a, b, bits):
    with working_precision(bits + 64):
        return abs(mpfr(a) - mpfr(b)) <= TWO ** -bits


@pytest.mark.parametrize(
    "coeffs",
    [(4, 0, -4 * 10**30, 4 * 10**30), (1, 0, -2, 0), (1, -6, 11, -6), (4, 1, 2, 3), (1, 0, 0, -2), (7, -10**20, 3, 1)],
)
def test_cubic_roots_are_certified(coeffs):
    c = Cubic(*coeffs)
    roots = c.real_roots(200)
    assert len(roots) == (3 if c.discriminant > 0 else 1)
    for r in roots:
        q = exact(r)
        eps = abs(q) * Fraction(1, 2**196) if q else Fraction(1, 2**196)
        assert c.sign_at(q) == 0 or c.sign_at(q - eps) != c.sign_at(q + eps)
    assert roots == sorted(roots)


def test_agm_step_example():
    with working_precision(100):
        a, b, _ = agm_step(mpfr(2), mpfr(1), mpfr(2))
        assert a == mpfr(3) / 2
        assert abs(b - gmpy2.sqrt(2)) < TWO ** -95


def test_agm_monotone_and_contracting():
    with working_precision(200):
        a, b, x = mpfr(7), mpfr(1), mpfr(3)
        a0b0 = a - b
        slack = TWO ** -190 * a
        for n in range(1, 8):
            an, bn, xn = agm_step(a, b, x)
            assert b - slack <= bn <= an + slack and an <= a + slack
            assert an - bn <= TWO ** (1 - 2**n) * a0b0 + TWO ** -190
            s = 1 - (xn + an * an) / (x + a * a) if n > 1 else None
            if s is not None:
                assert 0 <= s < 1
            a, b, x = an, bn, xn


def test_truncation():
    with working_precision(400):
        assert agm_truncation(mpfr(1) + TWO ** -300, mpfr(1), 100) == 3
        assert agm_truncation(mpfr(1) + TWO ** -70, mpfr(1), 10000) >= 13
        assert agm_truncation(mpfr(2), mpfr(1), 100) >= 3
        assert agm_truncation(mpfr(2), mpfr(1), 10000) > agm_truncation(mpfr(2), mpfr(1), 100)


def test_agm_input_invariants():
    with pytest.raises(ValueError):
        AgmInput(mpfr(1), mpfr(1), mpfr(0))
    with pytest.raises(ValueError):
        AgmInput(mpfr(2), mpfr(1), mpfr(-1))


def test_reduce_factored_form():
    W = WeierstrassModel(0, 5, 0, 4, 0)  # y^2 = x(x+1)(x+4)
    inp, ledger = reduce_to_agm_data(W, W.point(2, 6), 100)
    assert close(inp.a0, 2, 90) and close(inp.b0, 1, 90) and close(inp.x0, 2, 90)
    assert ledger.additive_terms == [] and ledger.degree_factor == 1


def test_reduce_egg_point_doubles():
    W = WeierstrassModel(0, 5, 0, 4, 0)
    inp, ledger = reduce_to_agm_data(W, W.point(-2, 2), 100)
    assert ledger.degree_factor == 4 and len(ledger.additive_terms) == 1
    assert inp.x0 >= 0


def test_reduce_one_real_root_uses_isogeny():
    W = WeierstrassModel(0, 0, 0, 0, 1)
    inp, ledger = reduce_to_agm_data(W, W.point(2, 3), 100)
    assert ledger.degree_factor == 2 and len(ledger.additive_terms) == 1
    assert 0 < inp.b0 < inp.a0


def test_two_torsion_rejected():
    W = WeierstrassModel(0, 0, 0, 0, 1)
    with pytest.raises(TwoTorsionPoint):
        psi_infinity(W, W.point(-1, 0), 64)


def test_torsion_identities():
    W = WeierstrassModel(0, 0, 0, 0, 1)
    with working_precision(200):
        log2, log3 = gmpy2.log(2), gmpy2.log(3)
        assert close(psi_infinity(W, W.point(2, 3), 64), log2 / 3 - log3 / 2, 64)
        assert close(psi_infinity(W, W.point(0, 1), 64), -2 * log2 / 3, 64)
    assert str(psi_infinity(W, W.point(2, 3), 64)).startswith("-0.318257084")


def test_series_torsion_orbit():
    W = WeierstrassModel(0, 0, 0, 0, 1)
    with pytest.raises(TorsionOrbitHitO):
        psi_infinity_oracle_series(W, W.point(-1, 0), 10, 64)
    # (2, 3) has order 6, so its 2-power multiples never reach O
    psi_infinity_oracle_series(W, W.point(2, 3), 10, 64)


def test_symmetric_and_stable_in_precision():
    rng = random.Random(12)
    for _ in range(20):
        W, P = random_nontorsion(rng, multiple=True)
        a = psi_infinity(W, P, 100)
        assert close(a, psi_infinity(W, W.negate(P), 100), 100)
        assert close(a, psi_infinity(W, P, 200), 100)


def test_agm_matches_series_random():
    rng = random.Random(13)
    for _ in range(20):
        W, P = random_nontorsion(rng, multiple=True)
        terms = 50
        bound = series_error_bound(W, terms, 120)
        diff = abs(float(psi_infinity(W, P, 120) - psi_infinity_oracle_series(W, P, terms, 120)))
        assert diff <= bound


@pytest.mark.parametrize(
    "a", [10**12, 10**40, 3 * 10**25 + 7, 7 * 10**4999 + 12345, 10**500 - 1], ids=["12", "40", "26", "5000", "500"]
)
def test_agm_matches_series_large_coefficients(a):
    # y^2 = x^3 - a x + a: P = (1, 1) sits on the egg, next to a root at 1 + O(1/a)
    W = WeierstrassModel(0, 0, 0, -a, a)
    P = W.point(1, 1)
    terms = 90
    with working_precision(300):
        diff = abs(psi_infinity(W, P, 150) - psi_infinity_oracle_series(W, P, terms, 150))
    assert diff <= series_error_bound(W, terms, 150)


def test_agm_lambda_on_factored_model():
    # y^2 = x(x+4)(x+25); 2P lies on the identity component, so lambda is read off directly
    W = WeierstrassModel(0, 29, 0, 100, 0)
    P = W.double(W.point(-20, 40))
    with working_precision(400):
        x = mpfr(P.x.numerator) / P.x.denominator
        lam = agm_lambda(AgmInput(mpfr(5), mpfr(2), x), 150)
        ref = gmpy2.log(abs(x)) - psi_infinity_oracle_series(W, P, 90, 150)
        assert abs(lam - ref) <= series_error_bound(W, 90, 150)
