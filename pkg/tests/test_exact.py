import random
from fractions import Fraction as F

import pytest

from dsres.exact import (
    KappaNumber,
    MultiSeries,
    PuiseuxMatrix,
    ScalarSeries,
    SizeMismatch,
    XPoly,
    expand_inverse_difference,
    fmt_rational,
    kappa_square,
    multiply_pruned,
    pairing,
    parse_rational,
    series_mul,
)
from dsres.lie import AlgebraSpec
from dsres.topo import lambda_series


def single(size, e, i, j, c=1):
    return PuiseuxMatrix(size, {e: {(i, j): F(c)}})


def test_rational_text_round_trip():
    for x in (F(0), F(3), F(-25, 3), F(7, 128)):
        assert parse_rational(fmt_rational(x)) == x
    assert fmt_rational(F(-4, 2)) == "-2"


def test_single_term_product():
    # (lambda E21) x (E12) = lambda E22
    p = series_mul(single(2, 1, 1, 0), single(2, 0, 0, 1))
    assert p.terms == {F(1): {(1, 1): F(1)}}


def test_identity_product_keeps_terms_and_floor():
    A = PuiseuxMatrix(2, {F(-1, 2): {(0, 1): F(3)}, F(-5, 2): {(1, 0): F(1)}}, floor=F(-3))
    one = PuiseuxMatrix(2, {0: {(0, 0): 1, (1, 1): 1}})
    assert series_mul(A, one) == A
    assert series_mul(A, one).floor == F(-3)


def test_lambda_squared_r3():
    L = lambda_series(AlgebraSpec(2))
    sq = series_mul(L, L)
    assert sq.terms == {F(0): {(0, 2): 1}, F(1): {(1, 0): 1, (2, 1): 1}}


def test_derivative_examples():
    C = {(0, 1): F(1)}
    d = PuiseuxMatrix(2, {F(1, 2): C}).derivative()
    assert d.terms == {F(-1, 2): {(0, 1): F(1, 2)}}
    assert PuiseuxMatrix(2, {0: C}).derivative().is_zero()
    d = PuiseuxMatrix(2, {F(-4, 3): C}, floor=F(-5)).derivative()
    assert d.terms == {F(-7, 3): {(0, 1): F(-4, 3)}}
    assert d.floor == F(-6)


def test_pairing_examples():
    L2 = lambda_series(AlgebraSpec(1))
    assert pairing(L2, L2).terms == {F(1): 2}
    E12 = single(2, 0, 0, 1)
    assert pairing(E12, E12).is_zero()
    spec = AlgebraSpec(2)
    L3 = lambda_series(spec)
    assert pairing(L3, series_mul(L3, L3)).terms == {F(1): 3}


def test_size_mismatch():
    with pytest.raises(SizeMismatch):
        series_mul(single(2, 0, 0, 1), single(3, 0, 0, 1))


def random_series(rng, size, floor=F(-4)):
    terms = {}
    for _ in range(4):
        e = F(rng.randint(-9, 3), 3)
        terms.setdefault(e, {})[(rng.randrange(size), rng.randrange(size))] = F(rng.randint(-5, 5), rng.randint(1, 3))
    return PuiseuxMatrix(size, terms, floor)


def test_ring_laws_and_leibniz_on_random_instances():
    rng = random.Random(11)
    for _ in range(20):
        A, B, C = (random_series(rng, 3) for _ in range(3))
        left = series_mul(series_mul(A, B), C)
        right = series_mul(A, series_mul(B, C))
        cut = max(left.floor, right.floor)
        assert left.truncate(cut) == right.truncate(cut)
        d1 = series_mul(A, B + C)
        d2 = series_mul(A, B) + series_mul(A, C)
        cut = max(d1.floor, d2.floor)
        assert d1.truncate(cut) == d2.truncate(cut)
        lhs = series_mul(A, B).derivative()
        rhs = series_mul(A.derivative(), B) + series_mul(A, B.derivative())
        cut = max(lhs.floor, rhs.floor)
        assert lhs.truncate(cut) == rhs.truncate(cut)


def test_pairing_symmetric_and_ad_invariant():
    rng = random.Random(5)
    for _ in range(30):
        X, A, B = (single(3, rng.randint(-1, 1), rng.randrange(3), rng.randrange(3), rng.randint(1, 4)) for _ in range(3))
        assert pairing(A, B) == pairing(B, A)
        assert (pairing(X.commutator(A), B) + pairing(A, X.commutator(B))).is_zero()


def test_truncate_cannot_go_below_floor():
    A = random_series(random.Random(1), 2, floor=F(-2))
    with pytest.raises(ValueError):
        A.truncate(-3)


def test_scalar_series_calculus():
    s = ScalarSeries({F(1, 2): F(2), F(-3, 2): F(1)})
    assert s.antiderivative().derivative() == s
    with pytest.raises(ArithmeticError):
        ScalarSeries({-1: 1}).antiderivative()


def test_kappa_arithmetic():
    k2 = kappa_square(3)
    assert k2 == F(-1, 27)
    kap = KappaNumber.kappa(k2)
    assert kap * kap == k2
    assert kap * kap.inverse() == 1
    x = KappaNumber(F(1, 2), 3, k2)
    assert (x / x) == 1
    assert x ** 3 == x * x * x
    assert KappaNumber.from_json(x.to_json(), k2) == x
    assert kappa_square(2) == F(1, 4)


def test_expand_inverse_difference_examples():
    e = expand_inverse_difference(0, 1, 1, 2)
    assert e.terms == {(F(-1), F(0)): 1, (F(-2), F(1)): 1}
    e = expand_inverse_difference(1, 0, 1, 2)
    assert e.terms == {(F(-1), F(0)): -1, (F(-2), F(1)): -1}
    with pytest.raises(ValueError):
        expand_inverse_difference(0, 1, -1, 2)


def test_squared_inverse_difference():
    g = expand_inverse_difference(0, 1, 3, 2)
    sq = multiply_pruned([g, g], [(None, None), (None, None)], 2)
    sq = sq.restrict([(None, None), (None, 3)])
    want = {(F(-m - 1), F(m - 1)): m for m in range(1, 5)}
    assert sq.terms == want
    assert expand_inverse_difference(0, 1, 3, 2, power=2).terms == want


def test_multiply_pruned_matches_full_product_inside_window():
    rng = random.Random(3)
    f = [MultiSeries(2, {(rng.randint(-3, 1), rng.randint(-3, 1)): rng.randint(1, 3) for _ in range(5)})
         for _ in range(3)]
    window = [(-4, None), (-3, None)]
    full = multiply_pruned(f, [(None, None)] * 2, 2).restrict(window)
    assert multiply_pruned(f, window, 2) == full


def test_xpoly():
    x = XPoly.x()
    p = x * x * 3 + 1
    assert p.derivative() == x * 6
    assert p.at(F(1, 3)) == F(4, 3)
