"""
From the dressing engine back to the topological ODE
=====================================================

At the topological point u_n = x/kappa (all other jets zero) the resolvents
satisfy d/dx R = kappa^(-1) d/dlambda R.  Setting x = 0 and multiplying by
lambda^(-m/h) gives a solution of M' = kappa [M, Lambda].  For odd h the
constant kappa is a square root, so the arithmetic runs in Q(kappa).
"""
from dsres.dressing import (
    basic_resolvent,
    dressing_pair,
    evaluate_topological,
    key_lemma_defect,
    lowest_weight_slice,
    resolvent_to_series,
)
from dsres.lie import AlgebraSpec
from dsres.topo import KAPPA, AirySolution, ode_residual

for n in (1, 2):
    spec = AlgebraSpec(n)
    sl = lowest_weight_slice(spec)
    depth = 6 * spec.h
    pair = dressing_pair(sl, depth)
    for a in spec.exponents:
        R = basic_resolvent(pair, a, depth)
        Rx, kap = evaluate_topological(R, sl)
        print(f"A{n}, a={a}: kappa = {kap!r}")
        print("   x/lambda identity holds:", not key_lemma_defect(Rx, kap))
        M = resolvent_to_series(Rx, 0)
        res = ode_residual(AirySolution(spec, a, M, KAPPA, kap))
        print(f"   kappa-ODE residual zero down to lambda^{M.floor}:", res.is_zero())
