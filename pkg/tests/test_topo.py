import json
import os
from fractions import Fraction as F

import pytest

from dsres.exact import PuiseuxMatrix
from dsres.lie import AlgebraSpec, InvariantError, lambda_power
from dsres.topo import (
    AirySolution,
    cached_solve,
    from_json,
    ode_residual,
    oracle_solve,
    pairing_check,
    solve_regular,
    to_json,
)


def test_r2_leading_entries():
    sol = solve_regular(AlgebraSpec(1), 1, F(-11, 2))
    s = sol.series
    assert s.entry(0, 1)[F(-1, 2)] == 1
    assert s.entry(0, 0)[F(-3, 2)] == F(-1, 4)
    assert s.entry(1, 0)[F(1, 2)] == 1
    assert s.entry(0, 0)[F(-9, 2)] == F(-35, 128)


def test_boundary_terms():
    for n in (1, 2, 3):
        spec = AlgebraSpec(n)
        for a in spec.exponents:
            sol = solve_regular(spec, a, -2 * spec.h)
            L, K = lambda_power(spec, a)
            assert sol.series.max_exponent() == F(spec.h - a, spec.h)
            assert sol.series.coefficient(F(spec.h - a, spec.h)) == K
            # lower principal degrees share the exponent -m/h; only the degree-m entries are L
            c = sol.series.coefficient(F(-a, spec.h))
            top = [[c[i][j] if j - i == a else 0 for j in range(spec.r)] for i in range(spec.r)]
            assert top == L


def test_oracle_examples():
    spec = AlgebraSpec(1)
    assert oracle_solve(spec, 1, F(-11, 2)).series == solve_regular(spec, 1, F(-11, 2)).series
    spec = AlgebraSpec(2)
    for a in (1, 2):
        assert oracle_solve(spec, a, F(-25, 3)).series == solve_regular(spec, a, F(-25, 3)).series


def test_oracle_at_trivial_depth():
    spec = AlgebraSpec(2)
    # just below the boundary pair, the oracle must still return the boundary exactly
    sol = oracle_solve(spec, 1, F(-2, 3))
    assert sol.series == solve_regular(spec, 1, F(-2, 3)).series
    L, K = lambda_power(spec, 1)
    assert sol.series.coefficient(F(-1, 3)) == L


def test_residual_vanishes_and_detects_perturbation():
    spec = AlgebraSpec(2)
    sol = solve_regular(spec, 1, -6)
    assert ode_residual(sol).is_zero()
    e = F(-7, 3)
    terms = {k: dict(v) for k, v in sol.series.terms.items()}
    terms[e][(0, 0)] = terms[e].get((0, 0), 0) + 1
    bad = AirySolution(spec, 1, PuiseuxMatrix(3, terms, sol.floor))
    res = ode_residual(bad)
    # the bracket with lambda*E lifts the defect by one power of lambda
    assert res.max_exponent() == e + 1
    assert not res.is_zero()


def test_boundary_alone_is_not_a_solution():
    spec = AlgebraSpec(1)
    L, K = lambda_power(spec, 1)
    M = PuiseuxMatrix.from_dense(2, {F(1, 2): K, F(-1, 2): L}, floor=-3)
    res = ode_residual(AirySolution(spec, 1, M))
    assert not res.is_zero()
    assert res.max_exponent() == F(-1, 2)


def test_pairing_examples():
    s1 = solve_regular(AlgebraSpec(1), 1, -8)
    assert pairing_check(s1, s1).is_zero()
    spec = AlgebraSpec(2)
    m1, m2 = solve_regular(spec, 1, -9), solve_regular(spec, 2, -9)
    assert pairing_check(m1, m1).is_zero()
    assert pairing_check(m1, m2).is_zero()


def test_stability_under_deepening():
    spec = AlgebraSpec(3)
    for a in spec.exponents:
        x = solve_regular(spec, a, -8)
        y = solve_regular(spec, a, -8 - spec.h)
        assert y.truncate(-8).series == x.series


def test_all_coefficients_rational():
    sol = solve_regular(AlgebraSpec(3), 2, -10)
    for m in sol.series.terms.values():
        assert all(isinstance(c, F) for c in m.values())


def test_floor_must_lie_below_leading_order():
    with pytest.raises(ValueError):
        solve_regular(AlgebraSpec(2), 1, 0)
    with pytest.raises(ValueError):
        solve_regular(AlgebraSpec(2), 2, F(-2, 3))


def test_json_round_trip():
    sol = solve_regular(AlgebraSpec(2), 2, F(-25, 3))
    data = json.loads(json.dumps(to_json(sol)))
    assert data["version"] == 1 and data["type"] == "A" and data["rank"] == 2
    back = from_json(data)
    assert back.series == sol.series and back.floor == sol.floor


def test_cache_hit_and_truncation(tmp_path):
    spec = AlgebraSpec(2)
    stats = {}
    a = cached_solve(spec, 1, -9, str(tmp_path), stats)
    b = cached_solve(spec, 1, -6, str(tmp_path), stats)
    assert stats == {"miss": 1, "hit": 1}
    assert b.series == a.truncate(-6).series
    assert os.listdir(tmp_path) == ["airy_A2_a1_kappa1.json"]


def test_corrupted_cache_entry_is_rejected(tmp_path):
    spec = AlgebraSpec(1)
    cached_solve(spec, 1, -5, str(tmp_path))
    path = tmp_path / "airy_A1_a1_kappa1.json"
    data = json.loads(path.read_text())
    data["coefficients"][3]["matrix"][0][0] = "12345"
    path.write_text(json.dumps(data))
    with pytest.raises(InvariantError):
        cached_solve(spec, 1, -5, str(tmp_path))
