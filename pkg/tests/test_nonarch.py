import random
from fractions import Fraction

import gmpy2
import pytest

from canheight.arith import valuation
from canheight.model import O, WeierstrassModel
from canheight.nonarch_global import FormalLogSum, PsiFiniteOptions, eval_log_sum, psi_finite
from canheight.nonarch_local import epsilon_at, mu_at, mu_oracle
from canheight.reals import working_precision
from support import factor, random_nontorsion

ALL_OPTIONS = [
    PsiFiniteOptions(),
    PsiFiniteOptions(trial_division_bound=100),
    PsiFiniteOptions(use_2b4_variant=True),
    PsiFiniteOptions(incremental_basis=True),
    PsiFiniteOptions(shrink_modulus=True),
    PsiFiniteOptions(trial_division_bound=10, use_2b4_variant=True, incremental_basis=True),
]


@pytest.fixture
def w1():
    W = WeierstrassModel(0, 0, 0, 0, 1)
    return W, W.point(2, 3)


def test_epsilon_examples(w1):
    W, P = w1
    assert epsilon_at(P, W, 2) == 2
    assert epsilon_at(P, W, 3) == 2
    assert epsilon_at(P, W, 5) == 0
    assert epsilon_at(O, W, 2) == 0


def test_mu_examples(w1):
    W, P = w1
    assert mu_at(P, W, 2).mu == Fraction(2, 3)
    assert mu_at(P, W, 2).epsilon0 == 2
    assert mu_at(P, W, 3).mu == Fraction(1, 2)
    assert mu_at(P, W, 5).mu == 0
    assert mu_oracle(P, W, 2, terms=8) == Fraction(2, 3)
    assert mu_oracle(P, W, 3) == Fraction(1, 2)
    assert mu_oracle(P, W, 5) == 0


def test_mu_oracle_needs_enough_terms(w1):
    W, P = w1
    with pytest.raises(ValueError):
        mu_oracle(P, W, 2, terms=1)


def test_psi_finite_examples(w1):
    W, P = w1
    s = psi_finite(P, W)
    assert s.terms == ((4, Fraction(1, 3)), (9, Fraction(1, 4)))
    assert str(s) == "1/3*log(4) + 1/4*log(9)"
    W2 = WeierstrassModel(0, 0, 0, 0, -2)
    assert not psi_finite(W2.point(3, 5), W2)
    W3 = WeierstrassModel(0, 0, 1, -1, 0)
    assert not psi_finite(W3.point(0, 0), W3)
    assert not psi_finite(O, W)


def test_eval_log_sum_examples():
    assert eval_log_sum(FormalLogSum(), 64) == 0
    value = eval_log_sum(FormalLogSum(((4, Fraction(1, 3)), (9, Fraction(1, 4)))), 64)
    with working_precision(128):
        assert abs(value - (gmpy2.log(2) * 2 / 3 + gmpy2.log(3) / 2)) < gmpy2.mpfr(2) ** -64
        assert abs(eval_log_sum(FormalLogSum(((2, 1),)), 64) - gmpy2.log(2)) < gmpy2.mpfr(2) ** -64
    assert str(value).startswith("1.0114042647")


def _local_invariants(P, W, p):
    B = valuation(W.delta, p)
    lm = mu_at(P, W, p)
    assert 0 <= lm.epsilon0 <= B
    assert 0 <= lm.mu <= Fraction(B, 4)
    assert lm.mu == 0 or lm.mu.denominator <= B
    return lm.mu


def test_local_laws_random():
    rng = random.Random(8)
    for _ in range(60):
        W, P = random_nontorsion(rng, multiple=True)
        for p in factor(W.delta):
            if p > 100:
                continue
            mu = _local_invariants(P, W, p)
            # epsilon(P) = 4 mu(P) - mu(2P)
            assert epsilon_at(P, W, p) == 4 * mu - mu_at(W.double(P), W, p).mu


def factored_psi(P, W) -> dict[int, Fraction]:
    return {p: mu_at(P, W, p).mu for p in factor(W.delta)}


def per_prime(s: FormalLogSum) -> dict[int, Fraction]:
    """Spread each mu log q over the primes of q."""
    got: dict[int, Fraction] = {}
    for q, mu in s:
        for p, k in factor(q).items():
            got[p] = got.get(p, 0) + k * mu
    return got


def test_psi_finite_options_agree_and_match_factorization():
    rng = random.Random(9)
    for _ in range(40):
        W, P = random_nontorsion(rng, multiple=True)
        expected = factored_psi(P, W)
        for opts in ALL_OPTIONS:
            s = psi_finite(P, W, opts)
            qs = [q for q, _ in s]
            assert all(gmpy2.gcd(a, b) == 1 for i, a in enumerate(qs) for b in qs[i + 1:])
            assert per_prime(s) == {p: mu for p, mu in expected.items() if mu}, (W, P, opts)


def test_psi_finite_with_large_valuations():
    # y^2 = x^3 + 5^k x type curves stress the truncation bounds
    for k in (3, 7, 11):
        W = WeierstrassModel(0, 0, 0, 5**k, 0)
        P = W.point(0, 0)
        expected = {p: mu_at(P, W, p).mu for p in factor(W.delta)}
        for opts in ALL_OPTIONS:
            assert per_prime(psi_finite(P, W, opts)) == {p: mu for p, mu in expected.items() if mu}
