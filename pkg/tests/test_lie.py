import random
from fractions import Fraction as F

import pytest

from dsres.lie import (
    AlgebraSpec,
    UnsolvableError,
    ad_lambda_solve,
    adjoint_form,
    build_lambda,
    graded_basis,
    kernel_dimension,
    lambda_loop,
    lambda_power,
    le_bracket,
    le_from_matrix,
    le_sub,
    lowest_weight_gauge,
    mm,
    mtrace,
    unit,
    zeros,
)


def test_lambda_r2():
    B, E = build_lambda(AlgebraSpec(1))
    assert B == [[0, 1], [0, 0]]
    assert E == [[0, 0], [1, 0]]


def test_lambda_r3_and_traceless():
    B, E = build_lambda(AlgebraSpec(2))
    assert B == [[0, 1, 0], [0, 0, 1], [0, 0, 0]]
    assert E == unit(3, 2, 0)
    for n in range(1, 6):
        B, E = build_lambda(AlgebraSpec(n))
        assert mtrace(B) == 0 and mtrace(E) == 0


def test_lambda_powers():
    L, K = lambda_power(AlgebraSpec(1), 1)
    assert L == unit(2, 0, 1) and K == unit(2, 1, 0)
    L, K = lambda_power(AlgebraSpec(2), 2)
    assert L == unit(3, 0, 2)
    assert K == [[0, 0, 0], [1, 0, 0], [0, 1, 0]]
    with pytest.raises(ValueError):
        lambda_power(AlgebraSpec(2), 3)


def test_kernel_elements_commute_with_lambda():
    for n in range(1, 5):
        spec = AlgebraSpec(n)
        lam = lambda_loop(spec)
        for a in spec.exponents:
            L, K = lambda_power(spec, a)
            p = le_from_matrix(L, 0)
            p.update(le_from_matrix(K, 1))
            assert not le_bracket(p, lam)


def keys(basis):
    out = set()
    for g in basis:
        (m, k), = g.parts
        nz = [(i, j) for i in range(len(m)) for j in range(len(m)) if m[i][j]]
        out.add((tuple(nz), k))
    return out


def test_graded_basis_examples():
    spec = AlgebraSpec(2)
    assert keys(graded_basis(spec, -1)) == {(((1, 0),), 0), (((2, 1),), 0), (((0, 2),), -1)}
    zero = graded_basis(spec, 0, window=(0, 0))
    assert len(zero) == 2
    assert all(g.parts[0][1] == 0 and mtrace(g.parts[0][0]) == 0 for g in zero)
    for n in range(1, 5):
        spec = AlgebraSpec(n)
        top = graded_basis(spec, spec.h - 1, window=(0, 0))
        assert keys(top) == {(((0, spec.r - 1),), 0)}


def test_grading_operator_acts_by_degree():
    spec = AlgebraSpec(3)
    h = spec.h
    rho = [F(spec.r - 1 - 2 * i, 2) for i in range(spec.r)]
    for d in range(-6, 7):
        for g in graded_basis(spec, d):
            (m, k), = g.parts
            for i in range(spec.r):
                for j in range(spec.r):
                    if m[i][j]:
                        assert h * k + rho[i] - rho[j] == d


def test_ad_lambda_solve_zero_and_cartan():
    spec = AlgebraSpec(1)
    X, slot = ad_lambda_solve(spec, {}, 2)
    assert not X and slot is not None
    G = {(0, 0, 0): F(1), (1, 1, 0): F(-1)}
    X, slot = ad_lambda_solve(spec, G, 0)
    assert not le_sub(le_bracket(X, lambda_loop(spec)), G)


def test_ad_lambda_solve_kernel_is_unsolvable():
    spec = AlgebraSpec(1)
    lam = lambda_loop(spec)
    with pytest.raises(UnsolvableError) as exc:
        ad_lambda_solve(spec, lam, 1)
    assert not le_sub(exc.value.residual, lam)


def test_random_solves_round_trip():
    rng = random.Random(1)
    spec = AlgebraSpec(3)
    lam = lambda_loop(spec)
    for d in range(-7, 7):
        basis = graded_basis(spec, d - 1)
        X0 = {}
        for g in basis:
            for key, c in le_from_matrix(*g.parts[0]).items():
                X0[key] = X0.get(key, 0) + c * rng.randint(-3, 3)
        G = le_bracket(X0, lam)
        X, _ = ad_lambda_solve(spec, G, d)
        assert not le_sub(le_bracket(X, lam), G)


def test_kernel_dimension_matches_exponents():
    for n in (1, 2, 3):
        spec = AlgebraSpec(n)
        for d in range(-2 * spec.h, 2 * spec.h):
            assert kernel_dimension(spec, d) == int(spec.in_E(d))


def test_lowest_weight_gauge_r2():
    gd = lowest_weight_gauge(AlgebraSpec(1))
    assert gd.rho == [[F(1, 2), 0], [0, F(-1, 2)]]
    assert gd.I_minus == unit(2, 1, 0)
    assert gd.gamma == [unit(2, 1, 0)]


def test_lowest_weight_gauge_invariants():
    for n in range(1, 5):
        spec = AlgebraSpec(n)
        gd = lowest_weight_gauge(spec)
        assert gd.gamma[-1] == unit(spec.r, spec.r - 1, 0)
        for a in spec.exponents:
            for b in spec.exponents:
                assert mtrace(mm(gd.L[a - 1], gd.K[b - 1])) == spec.eta(a, b) * b


def random_traceless(rng, r):
    m = [[F(rng.randint(-3, 3)) for _ in range(r)] for _ in range(r)]
    m[r - 1][r - 1] -= mtrace(m)
    return m


def test_adjoint_form_is_twice_dual_coxeter_trace():
    rng = random.Random(2)
    for r in (2, 3):
        spec = AlgebraSpec(r - 1)
        for _ in range(5):
            x, y, z = (random_traceless(rng, r) for _ in range(3))
            assert adjoint_form(x, y) == 2 * spec.dual_h * mtrace(mm(x, y))
            assert adjoint_form(x, y, z) == adjoint_form(y, z, x)


def test_adjoint_form_rejects_trace():
    m = zeros(2)
    m[0][0] = F(1)
    with pytest.raises(ValueError):
        adjoint_form(m, m)
