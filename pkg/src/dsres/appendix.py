"""Reference data for the 3-spin regular solutions, transcribed as Gamma-ratio series.

Each entry of ``M_a`` is a sum of families

    pref * sum_g (-1)^g 3^(6g) Gamma(8g + alpha) / (108^(s*g) g! Gamma(g + beta)) * lambda^(-(24g + c)/3)

stored as tuples ``(pref, alpha, beta, c, s)``.  Because alpha - beta is an
integer, every coefficient is rational (a Pochhammer ratio).

Transcription notes.  The block printed as ``(M_3)^3_j`` sits inside the
``M_2`` listing and is read as the third row of ``M_2``.  The family inside
``(M_1)^1_3`` carries ``108^(3g)`` where every sibling has ``108^g``; the
table is stored exactly as printed (s = 3 there, s = 1 elsewhere).  The
corrected reading further down is the one the solver reproduces.
"""
from __future__ import annotations

from fractions import Fraction as Fr
from math import factorial

from .exact import fmt_rational

T = Fr(1, 3)

# (pref, alpha, beta, c, s); indices are (row, column) read as (superscript, subscript), 1-based
APPENDIX_A = {
    1: {
        (1, 1): [(Fr(1), 4 * T, T, 4, 1), (Fr(-1, 72), 16 * T, 4 * T, 16, 1)],
        (1, 2): [(Fr(-1), T, 4 * T, 1, 1), (Fr(1, 24), 13 * T, 4 * T, 13, 1)],
        (1, 3): [(Fr(-1, 12), 10 * T, 4 * T, 10, 3)],
        (2, 1): [(Fr(1), 7 * T, T, 7, 1), (Fr(-1, 12), 10 * T, 4 * T, 7, 1), (Fr(-1, 72), 19 * T, 4 * T, 19, 1)],
        (2, 2): [(Fr(1, 36), 16 * T, 4 * T, 16, 1)],
        (2, 3): [(Fr(-1), T, 4 * T, 1, 1), (Fr(-1, 24), 13 * T, 4 * T, 13, 1)],
        (3, 1): [(Fr(-1, 72), 22 * T, 4 * T, 22, 1), (Fr(-1), T, T, -2, 1)],
        (3, 2): [(Fr(1), 7 * T, T, 7, 1), (Fr(-1, 12), 10 * T, 4 * T, 7, 1), (Fr(1, 72), 19 * T, 4 * T, 19, 1)],
        (3, 3): [(Fr(-1), 4 * T, T, 4, 1), (Fr(-1, 72), 16 * T, 4 * T, 16, 1)],
    },
    2: {
        (1, 1): [(Fr(-1, 6), 8 * T, 2 * T, 8, 1), (Fr(-1, 144), 20 * T, 5 * T, 20, 1)],
        (1, 2): [(Fr(1, 144), 17 * T, 5 * T, 17, 1), (Fr(1, 2), 5 * T, 2 * T, 5, 1)],
        (1, 3): [(Fr(-1), 2 * T, 2 * T, 2, 1)],
        (2, 1): [(Fr(-1, 144), 23 * T, 5 * T, 23, 1), (Fr(-1), 2 * T, 2 * T, -1, 1), (Fr(1, 6), 11 * T, 2 * T, 11, 1)],
        (2, 2): [(Fr(1, 3), 8 * T, 2 * T, 8, 1)],
        (2, 3): [(Fr(1, 144), 17 * T, 5 * T, 17, 1), (Fr(-1, 2), 5 * T, 2 * T, 5, 1)],
        (3, 1): [(Fr(-1, 6), 14 * T, 2 * T, 14, 1), (Fr(1, 144), 17 * T, 5 * T, 14, 1)],
        (3, 2): [(Fr(-1, 144), 23 * T, 5 * T, 23, 1), (Fr(-1), 2 * T, 2 * T, -1, 1), (Fr(-1, 6), 11 * T, 2 * T, 11, 1)],
        (3, 3): [(Fr(-1, 6), 8 * T, 2 * T, 8, 1), (Fr(1, 144), 20 * T, 5 * T, 20, 1)],
    },
}


def gamma_ratio(x, n):
    """Gamma(x + n) / Gamma(x) for rational x (not a pole) and integer n."""
    out = Fr(1)
    if n >= 0:
        for i in range(n):
            out *= x + i
    else:
        for i in range(1, -n + 1):
            out /= x - i
    return out


def family_coefficient(pref, alpha, beta, g, s=1):
    """Coefficient of the g-th term of one Gamma-ratio family."""
    x = Fr(g) + beta
    n = (Fr(8 * g) + alpha) - x
    if n.denominator != 1:
        raise ValueError("alpha - beta must be an integer")
    val = gamma_ratio(x, int(n))
    return pref * (-1) ** g * Fr(3) ** (6 * g) * val / (Fr(108) ** (s * g) * factorial(g))


def complete_above(a, gmax):
    """Exponent above which the families truncated at ``gmax`` are complete."""
    cmin = min(f[3] for fams in APPENDIX_A[a].values() for f in fams)
    return Fr(-(24 * (gmax + 1) + cmin), 3)


def appendix_entry(a, i, j, gmax):
    """{exponent: coefficient} for entry (i, j) of M_a, families with g <= gmax."""
    out = {}
    for pref, alpha, beta, c, s in APPENDIX_A[a][(i, j)]:
        for g in range(gmax + 1):
            e = Fr(-(24 * g + c), 3)
            out[e] = out.get(e, 0) + family_coefficient(pref, alpha, beta, g, s)
    return {e: v for e, v in out.items() if v}


def appendix_matrix_terms(a, gmax):
    """Appendix M_a as {exponent: {(i, j): coeff}} with 0-based indices."""
    terms = {}
    for (i, j) in APPENDIX_A[a]:
        for e, v in appendix_entry(a, i, j, gmax).items():
            terms.setdefault(e, {})[(i - 1, j - 1)] = v
    return terms


def describe(terms):
    lines = []
    for e in sorted(terms, reverse=True):
        ent = ", ".join(f"({i + 1},{j + 1}): {fmt_rational(v)}" for (i, j), v in sorted(terms[e].items()))
        lines.append(f"  lambda^({fmt_rational(e)}): {ent}")
    return "\n".join(lines)


# ---------------------------------------------------------------- corrected reading
#
# Comparison with the solver shows three systematic deviations in the printed
# table, none of which a constant frame change can absorb:
#   * the denominator 108^g should be 108^(3g) in every family (the single
#     family printed with 108^(3g) is the consistent one);
#   * the first family of (M_1)^1_2 and (M_1)^2_3 should carry Gamma(g + 1/3)
#     in place of Gamma(g + 4/3);
#   * the 1/6 families of (M_2)^2_1 and (M_2)^3_2 have their signs swapped.

def corrected_families(a, ij):
    out = []
    for pref, alpha, beta, c, s in APPENDIX_A[a][ij]:
        s = 3
        if a == 1 and ij in ((1, 2), (2, 3)) and (alpha, beta, c) == (T, 4 * T, 1):
            beta = T
        if a == 2 and ij in ((2, 1), (3, 2)) and alpha == 11 * T:
            pref = -pref
        out.append((pref, alpha, beta, c, s))
    return out


def corrected_matrix_terms(a, gmax):
    terms = {}
    for ij in APPENDIX_A[a]:
        i, j = ij
        for pref, alpha, beta, c, s in corrected_families(a, ij):
            for g in range(gmax + 1):
                e = Fr(-(24 * g + c), 3)
                v = family_coefficient(pref, alpha, beta, g, s)
                t = terms.setdefault(e, {})
                t[(i - 1, j - 1)] = t.get((i - 1, j - 1), 0) + v
    return {e: {k: v for k, v in m.items() if v} for e, m in terms.items() if any(m.values())}


# ---------------------------------------------------------------- frame fitting

def _rational_root(x, k):
    """Exact positive k-th root of a positive Fraction, or None."""
    if x <= 0 or k <= 0:
        return None

    def iroot(n):
        r = round(n ** (1.0 / k)) if n < 1 << 1000 else int(n ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** k == n:
                return cand
        return None

    p, q = iroot(x.numerator), iroot(x.denominator)
    if p is None or q is None:
        return None
    return Fr(p, q)


def _rational_power(s, e):
    """s**e for rational e when the result is rational (s a perfect power)."""
    e = Fr(e)
    base = _rational_root(s, e.denominator)
    if base is None:
        return None
    return base ** e.numerator


def _most_common(values):
    from collections import Counter

    if not values:
        return None
    return Counter(values).most_common(1)[0][0]


class Frame:
    """M_app(lambda) = c * D * X(s*lambda) * D^-1 with X = M or its transpose."""

    def __init__(self, transpose, c, s, d):
        self.transpose = transpose
        self.c = c
        self.s = s
        self.d = d

    def apply(self, i, j, e, value):
        if self.transpose:
            i, j = j, i
        se = _rational_power(self.s, e)
        if se is None:
            return None
        return self.c * self.d[i] / self.d[j] * se * value

    def describe(self):
        d = ", ".join(fmt_rational(x) for x in self.d)
        return (
            f"transpose={self.transpose}, scale c={fmt_rational(self.c)}, "
            f"lambda-rescaling s={fmt_rational(self.s)}, diagonal D=diag({d})"
        )


def _ratios(ours, app, transpose):
    out = {}
    for a in app:
        for e, mat in app[a].items():
            for (i, j), v in mat.items():
                oi, oj = (j, i) if transpose else (i, j)
                w = ours[a].terms.get(e, {}).get((oi, oj), 0)
                if w:
                    out[(a, i, j, e)] = v / w
    return out


def fit_frame(ours, app, size=3, gmax=2):
    """Fit a constant frame by majority vote over the coefficient ratios.

    ``ours`` maps a to a PuiseuxMatrix; ``app`` maps a to {exponent: {(i,j): v}}.
    Returns the frame with the most exactly reproduced coefficients together
    with the list of mismatches ``(a, i, j, exponent, appendix, predicted)``.
    """
    best = None
    for transpose in (False, True):
        R = _ratios(ours, app, transpose)
        if not R:
            continue
        diag = {k: v for k, v in R.items() if k[1] == k[2]}
        cands = [Fr(1)]
        keys = sorted(diag)
        for k1 in keys:
            for k2 in keys:
                if k1[:3] == k2[:3] and k1[3] > k2[3]:
                    q = diag[k1] / diag[k2]
                    de = k1[3] - k2[3]
                    if q > 0 and de.denominator == 1:
                        root = _rational_root(q, int(de))
                        if root is not None:
                            cands.append(root)
        s = _most_common(cands) if len(cands) > 1 else Fr(1)
        cvals = []
        for (a, i, j, e), v in diag.items():
            se = _rational_power(s, e)
            if se:
                cvals.append(v / se)
        c = _most_common(cvals) or Fr(1)
        d = [Fr(1)] + [None] * (size - 1)
        for target in range(1, size):
            vals = []
            for (a, i, j, e), v in R.items():
                se = _rational_power(s, e)
                if not se:
                    continue
                q = v / (c * se)  # = d_i / d_j (in appendix indices after transpose handling)
                ii, jj = (j, i) if transpose else (i, j)
                if ii == 0 and jj == target:
                    vals.append(1 / q)
                elif jj == 0 and ii == target:
                    vals.append(q)
            d[target] = _most_common(vals) or Fr(1)
        frame = Frame(transpose, c, s, d)
        mism = compare(ours, app, frame, gmax)
        score = sum(len(m) for m in app.values() for m in m.values()) - len(mism)
        if best is None or score > best[0]:
            best = (score, frame, mism)
    return best[1], best[2]


def compare(ours, app, frame, gmax=2):
    """Mismatches between the framed solver output and appendix-style terms.

    Only exponents where the truncated families are complete are compared.
    """
    mism = []
    for a in sorted(app):
        cut = complete_above(a, gmax)
        exps = {e for e in app[a] if e > cut} | {e for e in ours[a].terms if e > cut}
        for e in sorted(exps, reverse=True):
            keys = set(app[a].get(e, {}))
            for (i, j) in ours[a].terms.get(e, {}):
                keys.add((j, i) if frame.transpose else (i, j))
            for (i, j) in sorted(keys):
                oi, oj = (j, i) if frame.transpose else (i, j)
                pred = frame.apply(oi, oj, e, ours[a].terms.get(e, {}).get((oi, oj), 0))
                got = app[a].get(e, {}).get((i, j), 0)
                if pred != got:
                    mism.append((a, i + 1, j + 1, e, got, pred))
    return mism


def family_report(ours, frame, gmax=2):
    """Per printed family: does it reproduce the solver under ``frame``?

    Families sharing an (entry, exponent) slot are judged jointly on that slot.
    """
    lines = []
    ok_count = 0
    for a in sorted(APPENDIX_A):
        for ij in sorted(APPENDIX_A[a]):
            printed = appendix_entry(a, ij[0], ij[1], gmax)
            i, j = ij[0] - 1, ij[1] - 1
            bad = []
            cut = complete_above(a, gmax)
            for e, v in sorted(printed.items(), reverse=True):
                if e <= cut:
                    continue
                oi, oj = (j, i) if frame.transpose else (i, j)
                pred = frame.apply(oi, oj, e, ours[a].terms.get(e, {}).get((oi, oj), 0))
                if pred != v:
                    bad.append(fmt_rational(e))
            if not bad:
                ok_count += 1
            lines.append(f"(M_{a})^{ij[0]}_{ij[1]}: " + ("match" if not bad else "mismatch at lambda^(" + ", ".join(bad) + ")"))
    return ok_count, lines
