"""
Writing down the Drinfeld-Sokolov hierarchy
============================================

Dress the Lax operator d/dx + Lambda + q in the lowest weight gauge, form
the basic resolvents R_a, build the two-point functions and express the
flows in the normal coordinates r_a.  For A_1 this is KdV, for A_2 the
Boussinesq pair.
"""
from dsres.correlators import (
    ResolventSet,
    ds_flow,
    flow_commutator,
    miura_inverse,
    normal_coordinates,
    two_point_gen,
)
from dsres.dressing import lowest_weight_slice
from dsres.lie import AlgebraSpec

A1 = AlgebraSpec(1)
rs = ResolventSet(lowest_weight_slice(A1), -4)
rc = normal_coordinates(rs)
print("r1 =", rc[1].render())

tab = two_point_gen(rs, 1, 1, 2)
for (k, l), v in sorted(tab.omega.items()):
    print(f"Omega_(1,{k};1,{l}) =", v.render())

umap = miura_inverse(A1, rc)
f10 = ds_flow(rs, 1, 1, 0, umap)
f11 = ds_flow(rs, 1, 1, 1, umap)
print("dr1/dT^(1,0) =", f10.render())
print("dr1/dT^(1,1) =", f11.render())
print("flows commute:", not any(flow_commutator({"r1": f10}, {"r1": f11}).values()))

A2 = AlgebraSpec(2)
rs2 = ResolventSet(lowest_weight_slice(A2), -2)
rc2 = normal_coordinates(rs2)
umap2 = miura_inverse(A2, rc2)
for a in A2.exponents:
    print(f"r{a} =", rc2[a].render())
    print(f"   u{a} =", umap2[f"u{a}"].render())
for a in A2.exponents:
    print(f"dr{a}/dT^(2,0) =", ds_flow(rs2, a, 2, 0, umap2).render())
