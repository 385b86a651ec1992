from fractions import Fraction as F
from math import factorial

import pytest

from dsres.correlators import (
    CSV_HEADER,
    ResolventSet,
    correlator,
    correlator_table,
    ds_flow,
    extract_correlators,
    flow_commutator,
    genus,
    miura_inverse,
    n_point_adjoint,
    n_point_trace,
    normal_coordinates,
    one_point_series,
    parse_insertions,
    raw_coefficient,
    two_point_gen,
    two_point_residue,
)
from dsres.diffpoly import DiffPoly
from dsres.dressing import lowest_weight_slice, slice_from_q
from dsres.lie import AlgebraSpec

A1, A2, A3 = AlgebraSpec(1), AlgebraSpec(2), AlgebraSpec(3)


def jet(name, d=0, c=1):
    return DiffPoly.jet(name, d, c)


def test_vacuum_two_point_vanishes():
    rs = ResolventSet(slice_from_q(A1, {}, {"u1": 2}), -4)
    tab = two_point_gen(rs, 1, 1, 3)
    assert not any(tab.omega.values())
    assert not any(two_point_residue(rs, 1, 1, 3))


def test_first_two_point_function_a1():
    rs = ResolventSet(lowest_weight_slice(A1), -2)
    assert two_point_gen(rs, 1, 1, 1)[(0, 0)] == jet("u1", 0, F(-1, 2))


def test_symmetry_and_residue_route_a2():
    rs = ResolventSet(lowest_weight_slice(A2), -4)
    tabs = {(a, b): two_point_gen(rs, a, b, 3) for a in (1, 2) for b in (1, 2)}
    for (a, b), t in tabs.items():
        for (k, l), v in t.omega.items():
            assert v == tabs[(b, a)][(l, k)]
        res = two_point_residue(rs, a, b, 3)
        assert res == [t[(k, 0)] for k in range(4)]


def test_normal_coordinates():
    rs = ResolventSet(lowest_weight_slice(A1), -1)
    r1 = normal_coordinates(rs)[1]
    assert r1 == jet("u1", 0, F(-1, 2))
    assert miura_inverse(A1, {1: r1}) == {"u1": jet("r1", 0, -2)}
    rc = normal_coordinates(ResolventSet(lowest_weight_slice(A3), -1))
    assert [rc[a].t[((f"u{a}", 0),)] for a in (1, 2, 3)] == [F(-1, 4), F(-2, 4), F(-3, 4)]


def test_miura_round_trip_a2():
    rc = normal_coordinates(ResolventSet(lowest_weight_slice(A2), -1))
    umap = miura_inverse(A2, rc)
    back = {f"r{a}": rc[a] for a in (1, 2)}
    for a in (1, 2):
        assert umap[f"u{a}"].substitute(back) == jet(f"u{a}")
    weights = {"r1": 2, "r2": 3}
    for a in (1, 2):
        assert umap[f"u{a}"].is_homogeneous(weights, a + 1)


def test_flows_a1():
    rs = ResolventSet(lowest_weight_slice(A1), -3)
    umap = miura_inverse(A1, normal_coordinates(rs))
    f10 = ds_flow(rs, 1, 1, 0, umap)
    assert f10 == -jet("r1", 1)
    f11 = ds_flow(rs, 1, 1, 1, umap)
    # KdV shape: alpha r r_x + beta r_xxx
    assert set(f11.t) == {(("r1", 0), ("r1", 1)), (("r1", 3),)}
    assert not any(flow_commutator({"r1": f10}, {"r1": f11}).values())


def test_genus_formula():
    assert genus(2, [(1, 1)]) == 1
    assert genus(2, [(1, 4)]) == 2
    for m in (1, 2, 3):
        assert genus(3, [(1, 8 * m - 7)]) == 3 * m - 2
    assert genus(3, [(1, 0)]).denominator != 1


def test_one_point_extraction():
    F2 = one_point_series(A1, 1, F(-15, 2))
    recs = {rec.insertions: rec for rec in extract_correlators(F2, 2)}
    assert recs[((1, 1),)].genus == 1 and recs[((1, 1),)].value == F(1, 24)
    assert recs[((1, 4),)].value == F(1, 1152)
    F3 = one_point_series(A2, 1, F(-10, 3))
    assert {rec.insertions: rec.value for rec in extract_correlators(F3, 3)}[((1, 1),)] == F(1, 12)
    F3 = one_point_series(A2, 2, F(-26, 3))
    assert {rec.insertions: rec.value for rec in extract_correlators(F3, 3)}[((2, 6),)] == F(1, 31104)


@pytest.mark.parametrize("ins,value", [
    ([(1, 0)] * 3, F(1)),
    ([(1, 0), (1, 2)], F(1, 24)),
    ([(1, 1), (1, 1)], F(1, 24)),
    ([(1, 1)] * 3, F(1, 12)),
    ([(1, 2), (1, 3)], F(29, 5760)),
    ([(1, 2)] * 3, F(7, 240)),
    ([(1, 1), (1, 4)], F(1, 384)),
    ([(1, 0), (1, 5)], F(1, 1152)),
])
def test_witten_kontsevich_values(ins, value):
    assert correlator(A1, ins).value == value


def test_three_spin_values():
    assert correlator(A2, [(1, 0), (1, 0), (2, 0)]).value == 1
    assert correlator(A2, [(1, 0)] * 3).value == 0
    # dilaton: inserting tau_(1,1) multiplies by 2g - 2 + n
    assert correlator(A2, [(1, 1), (1, 1)]).value == correlator(A2, [(1, 1)]).value
    x = correlator(A2, [(1, 1), (2, 6)])
    one = correlator(A2, [(2, 6)])
    assert one.genus == 3 and x.value == (2 * 3 - 2 + 1) * one.value


def test_permutation_invariance():
    a = correlator(A2, [(2, 3), (1, 0), (1, 2)], recheck=False)
    b = correlator(A2, [(1, 2), (2, 3), (1, 0)], recheck=False)
    assert a == b


def test_non_integral_genus_gives_zero():
    ins = [(1, 1), (1, 0)]
    assert genus(2, ins).denominator != 1
    assert correlator(A1, ins).value == 0
    assert raw_coefficient(A1, ins, recheck=False) == 0


def test_trace_and_adjoint_forms_agree():
    win = [F(-1, 2) - 3, F(-1, 2) - 2]
    assert n_point_trace(A1, [1, 1], win).series == n_point_adjoint(A1, [1, 1], win).series


def test_records_and_table():
    rec = correlator(A1, [(1, 4)])
    assert rec.csv_row() == ["2", "1", "1:4", "2", "1/1152"]
    assert rec.to_json() == {"r": 2, "insertions": [[1, 4]], "genus": "2", "value": "1/1152"}
    assert CSV_HEADER == ["r", "N", "insertions", "genus", "value"]
    tab = correlator_table(A1, 1, 2, nonzero_only=True)
    assert {r.key(): r.value for r in tab} == {"1:1": F(1, 24), "1:1;1:1": F(1, 24)}


def test_parse_insertions():
    assert parse_insertions("1:4;2:0") == [(1, 4), (2, 0)]
    assert parse_insertions("1:0, 1:1") == [(1, 0), (1, 1)]
    with pytest.raises(ValueError):
        parse_insertions(" ; ")


def test_bad_insertions():
    with pytest.raises(ValueError):
        correlator(A1, [(2, 0)])
    with pytest.raises(ValueError):
        correlator(A1, [])


def test_one_point_tower_closed_form():
    for g in range(1, 4):
        assert correlator(A1, [(1, 3 * g - 2)]).value == F(1, 24 ** g * factorial(g))
