from fractions import Fraction as F

import pytest

from dsres.diffpoly import DiffPoly
from dsres.dressing import (
    DepthError,
    SliceError,
    audit_pair,
    basic_resolvent,
    degree_audit,
    dressing_pair,
    evaluate_topological,
    full_borel_slice,
    gauge_transform,
    key_lemma_defect,
    lax_commutator,
    lowest_weight_slice,
    make_slice,
    q_coefficient,
    slice_from_q,
)
from dsres.exact import XPoly
from dsres.lie import AlgebraSpec, lambda_j, lambda_power, le_bracket, le_mul, le_trace_coeff, unit, zeros


def as_poly_matrix(m):
    return [[DiffPoly.lift(x) for x in row] for row in m]


def test_vacuum():
    spec = AlgebraSpec(2)
    pair = dressing_pair(slice_from_q(spec, {}, {}), 6)
    assert not any(pair.U.values()) and not any(pair.H.values())
    for a in spec.exponents:
        R = basic_resolvent(pair, a, 6)
        assert list(R.parts) == [a]
        assert q_coefficient(R) == as_poly_matrix(lambda_power(spec, a)[1])


def test_lowest_weight_has_no_first_correction():
    for n in (1, 2, 3):
        pair = dressing_pair(lowest_weight_slice(AlgebraSpec(n)), 2)
        assert not pair.U[-1]


def test_a1_first_hamiltonian_density():
    spec = AlgebraSpec(1)
    pair = dressing_pair(lowest_weight_slice(spec), 4)
    base = lambda_j(spec, -1)
    H = pair.H[-1]
    assert set(H) == set(base)
    ratios = {H[k] * (1 / base[k]) for k in base}
    assert len(ratios) == 1
    (c,) = ratios
    assert c == DiffPoly.jet("u1", 0, F(1, 2))


@pytest.mark.parametrize("n", [1, 2])
def test_lax_commutator_vanishes(n):
    spec = AlgebraSpec(n)
    pair = dressing_pair(lowest_weight_slice(spec), 3 * spec.h)
    for a in spec.exponents:
        R = basic_resolvent(pair, a, 3 * spec.h)
        assert not any(lax_commutator(pair, R).values())


@pytest.mark.parametrize("n", [1, 2])
def test_q_coefficients(n):
    spec = AlgebraSpec(n)
    pair = dressing_pair(lowest_weight_slice(spec), 2 * spec.h)
    e_theta = unit(spec.r, spec.r - 1, 0)
    Q1 = q_coefficient(basic_resolvent(pair, 1, 2 * spec.h))
    assert Q1 == as_poly_matrix(e_theta)
    for b in spec.exponents:
        Q = q_coefficient(basic_resolvent(pair, b, 2 * spec.h))
        r = spec.r
        br = [[sum((e_theta[i][k] * Q[k][j] - Q[i][k] * e_theta[k][j] for k in range(r)), DiffPoly())
               for j in range(r)] for i in range(r)]
        assert not any(x for row in br for x in row)


def test_schedules_agree():
    for sl in (lowest_weight_slice(AlgebraSpec(2)), full_borel_slice(AlgebraSpec(1))):
        x = dressing_pair(sl, 5)
        y = dressing_pair(sl, 5, schedule="direct")
        assert x.U == y.U and x.H == y.H


def test_resolvents_commute_and_are_normalized():
    spec = AlgebraSpec(2)
    D = 3 * spec.h
    pair = dressing_pair(lowest_weight_slice(spec), D)
    R = {a: basic_resolvent(pair, a, D) for a in spec.exponents}
    for a in spec.exponents:
        for b in spec.exponents:
            bound = max(R[a].lowest + b, R[b].lowest + a)
            c = le_bracket(R[a].loop(), R[b].loop())
            assert not any(v for (i, j, k), v in c.items() if (j - i) + spec.h * k >= bound)
            prod = le_mul(R[a].loop(), R[b].loop())
            for k in range(-(-bound // spec.h), 3):
                want = spec.h * spec.eta(a, b) if k == 1 else 0
                assert le_trace_coeff(prod, k) == want


def test_extended_degree_audits():
    for sl in (lowest_weight_slice(AlgebraSpec(2)), full_borel_slice(AlgebraSpec(2))):
        pair = dressing_pair(sl, 6)
        assert audit_pair(pair) == {"U": [], "H": []}
        for a in sl.spec.exponents:
            R = basic_resolvent(pair, a, 6)
            assert degree_audit(R.parts, sl.weights, a, sl.spec.h) == []
    bad = {(1, 0, 0): DiffPoly.jet("u1") + 1}
    assert degree_audit(bad, {"u1": 2}, 1, 2) == [(1, 0, 0)]


def test_gauge_transform_identity_and_guards():
    spec = AlgebraSpec(2)
    sl = full_borel_slice(spec)
    assert gauge_transform(sl, zeros(3)) == sl.q
    N = zeros(3)
    N[0][1] = F(1)
    with pytest.raises(ValueError):
        gauge_transform(sl, N)


def test_key_lemma_is_not_vacuous():
    spec = AlgebraSpec(1)
    sl = lowest_weight_slice(spec)
    pair = dressing_pair(sl, 6 * spec.h)
    R = basic_resolvent(pair, 1, 6 * spec.h)
    Rx, kap = evaluate_topological(R, sl)
    assert key_lemma_defect(Rx, kap) == {}
    d = min(Rx.parts)
    key = next(iter(Rx.parts[d + 4]))
    Rx.parts[d + 4][key] = Rx.parts[d + 4][key] + XPoly.x()
    assert key_lemma_defect(Rx, kap) != {}


def test_slice_guards():
    spec = AlgebraSpec(1)
    with pytest.raises(SliceError):
        make_slice(spec, "upper")
    with pytest.raises(SliceError):
        evaluate_topological(basic_resolvent(dressing_pair(full_borel_slice(spec), 2), 1, 2), full_borel_slice(spec))
    pair = dressing_pair(lowest_weight_slice(spec), 2)
    with pytest.raises(DepthError):
        basic_resolvent(pair, 1, 3)
    with pytest.raises(DepthError):
        basic_resolvent(pair, 1, 2).lambda_coefficient(-2)
