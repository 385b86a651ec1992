"""
The r = 2 case: matrix Airy resolvent and psi-class numbers
============================================================

For sl_2 the regular solution of M' = [M, Lambda] has closed-form entries,
and the one-point function built from its (1,2) entry produces the
intersection numbers <tau_(3g-2)>_g = 1/(24^g g!).  Run with

    python demos/01_witten_kontsevich.py
"""
from fractions import Fraction
from math import factorial

from dsres.correlators import correlator, extract_correlators, one_point_series
from dsres.exact import fmt_rational
from dsres.lie import AlgebraSpec
from dsres.topo import ode_residual, solve_regular

spec = AlgebraSpec(1)  # A_1, so r = h = 2

# Solve the topological ODE down to lambda^(-19/2) and look at a few terms.
M = solve_regular(spec, 1, Fraction(-19, 2))
print("residual vanishes:", ode_residual(M).is_zero())
for e in M.series.exponents()[:5]:
    print(f"lambda^({fmt_rational(e)}):", [[fmt_rational(x) for x in row] for row in M.series.coefficient(e)])

# The (1,1) entry at lambda^(-9/2) is the g = 2 term of -(1/4)(6g-5)!!/(96^(g-1)(g-1)!).
print("(1,1) at lambda^(-9/2):", M.series.entry(0, 0)[Fraction(-9, 2)])

# One-point function: integrate -(M)_(1,2) and read off the coefficients.
F = one_point_series(spec, 1, Fraction(-19, 2))
for rec in extract_correlators(F, 2):
    g = int(rec.genus)
    print(f"<tau_{rec.insertions[0][1]}>_{g} = {fmt_rational(rec.value)}",
          "  closed form", fmt_rational(Fraction(1, 24 ** g * factorial(g))))

# Multi-point numbers come from cyclic traces of several resolvents.
for ins in ([(1, 0)] * 3, [(1, 1), (1, 1)], [(1, 2), (1, 3)], [(1, 2)] * 3):
    rec = correlator(spec, ins)
    print(" ".join(f"tau_{k}" for _, k in ins), "genus", rec.genus, "=", fmt_rational(rec.value))
