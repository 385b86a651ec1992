"""Exact linear algebra over the rationals.

Two tools: a dense Gauss-Jordan inverse for the small per-degree systems of
the graded solver, and a sparse row reduction for the large but very sparse
systems of the brute-force oracle.
"""
from __future__ import annotations

from fractions import Fraction


class SingularMatrix(ArithmeticError):
    pass


def dense_inverse(rows):
    """Inverse of a square matrix given as a list of lists of Fractions."""
    n = len(rows)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = None
        for i in range(col, n):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            raise SingularMatrix(f"singular at column {col}")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        if p != 1:
            a[col] = [x / p for x in a[col]]
        prow = a[col]
        for i in range(n):
            if i != col and a[i][col]:
                f = a[i][col]
                row = a[i]
                a[i] = [x - f * y for x, y in zip(row, prow)]
    return [row[n:] for row in a]


def mat_vec(m, v):
    """Apply a dense rational matrix to a vector over any Q-module."""
    out = []
    for row in m:
        acc = None
        for c, x in zip(row, v):
            if c and x:
                t = x * c
                acc = t if acc is None else acc + t
        out.append(acc if acc is not None else 0)
    return out


def sparse_rref(equations, nvars=None):
    """Reduce sparse linear equations ``{var: coeff}`` with a ``'rhs'`` key.

    Each equation means sum(coeff * var) = rhs.  Returns ``(pivots, free)``
    where ``pivots`` maps a pivot variable to its fully reduced row (so the
    row expresses the pivot in terms of free variables and the constant).
    Raises SingularMatrix on an inconsistent system (0 = nonzero).
    """
    pivots = {}  # var -> row dict (coeff of var is 1)
    order = []
    for eq in equations:
        row = {k: Fraction(v) for k, v in eq.items() if v}
        # eliminate known pivots
        changed = True
        while changed:
            changed = False
            for var in [k for k in row if k != "rhs" and k in pivots]:
                f = row.get(var)
                if not f:
                    continue
                for k, v in pivots[var].items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
                changed = True
        vars_ = [k for k in row if k != "rhs"]
        if not vars_:
            if row.get("rhs", 0):
                raise SingularMatrix("inconsistent linear system")
            continue
        pv = min(vars_, key=_var_key)
        f = row[pv]
        row = {k: v / f for k, v in row.items()}
        # back-substitute into existing pivots
        for var, prow in pivots.items():
            g = prow.get(pv)
            if g:
                for k, v in row.items():
                    nv = prow.get(k, 0) - g * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[pv] = row
        order.append(pv)
    return pivots


def _var_key(v):
    return v if isinstance(v, tuple) else (v,)
