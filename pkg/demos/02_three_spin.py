"""
The r = 3 case: 3-spin numbers and the reference tables
=========================================================

Two regular solutions M_1, M_2 of the sl_3 topological ODE.  Only the
insertions tau_(1, 8m-7) and tau_(2, 8m-2) give nonzero one-point numbers.
The second half compares the solver with the Gamma-ratio tables and prints
the family-by-family discrepancy report.
"""
from fractions import Fraction
from math import factorial

from dsres.correlators import correlator
from dsres.exact import fmt_rational
from dsres.lie import AlgebraSpec
from dsres.topo import pairing_check, solve_regular
from dsres.verify import appendix_report


def poch(x, n):
    p = Fraction(1)
    for i in range(n):
        p *= x + i
    return p


spec = AlgebraSpec(2)
M1 = solve_regular(spec, 1, -12)
M2 = solve_regular(spec, 2, -12)
print("tr(M1 M1) = 0 and tr(M1 M2) = 3:", pairing_check(M1, M1).is_zero(), pairing_check(M1, M2).is_zero())

for m in (1, 2, 3):
    a1 = correlator(spec, [(1, 8 * m - 7)])
    a2 = correlator(spec, [(2, 8 * m - 2)])
    w1 = 1 / (6 ** (6 * m - 4) * factorial(m - 1) * poch(Fraction(1, 3), m))
    w2 = 1 / (6 ** (6 * m) * factorial(m) * poch(Fraction(2, 3), m))
    print(f"m={m}: {fmt_rational(a1.value)} (expected {fmt_rational(w1)}),",
          f"{fmt_rational(a2.value)} (expected {fmt_rational(w2)})")

# The string equation removes a tau_(1,0) insertion.
for a, k in ((1, 1), (2, 6)):
    x = correlator(spec, [(a, k + 1), (1, 0)]).value
    y = correlator(spec, [(a, k)]).value
    print(f"<tau_({a},{k + 1}) tau_(1,0)> = {fmt_rational(x)}   <tau_({a},{k})> = {fmt_rational(y)}")

checks, lines = appendix_report()
print("\n".join(lines))
