"""Differential polynomials in jet variables.

A monomial is a sorted tuple of jets ``(name, d)`` with repetition, so
``u1_0**2 * u2_1`` is ``(('u1', 0), ('u1', 0), ('u2', 1))``.  Coefficients
are Fractions.  The total x-derivative maps ``(name, d)`` to ``(name, d+1)``
and extends by Leibniz.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import lcm

from .exact import fmt_rational

_ONE = ()


class DiffPoly:
    __slots__ = ("t",)

    def __init__(self, terms=None):
        self.t = {k: v for k, v in (terms or {}).items() if v}

    # -- constructors
    @classmethod
    def jet(cls, name, d=0, coeff=1):
        return cls({((name, d),): Fraction(coeff)})

    @classmethod
    def const(cls, c):
        return cls({_ONE: Fraction(c)}) if c else cls()

    @staticmethod
    def lift(x):
        if isinstance(x, DiffPoly):
            return x
        return DiffPoly.const(x)

    # -- ring structure
    def __bool__(self):
        return bool(self.t)

    def __eq__(self, other):
        if isinstance(other, DiffPoly):
            return self.t == other.t
        if isinstance(other, (int, Fraction)):
            if not other:
                return not self.t
            return self.t == {_ONE: other}
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.t.items()))

    def __add__(self, other):
        if isinstance(other, DiffPoly):
            if not other.t:
                return self
            if not self.t:
                return other
            t = dict(self.t)
            for k, v in other.t.items():
                w = t.get(k)
                if w is None:
                    t[k] = v
                else:
                    w = w + v
                    if w:
                        t[k] = w
                    else:
                        del t[k]
            out = DiffPoly.__new__(DiffPoly)
            out.t = t
            return out
        if isinstance(other, (int, Fraction)):
            return self + DiffPoly.const(other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        out = DiffPoly.__new__(DiffPoly)
        out.t = {k: -v for k, v in self.t.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return DiffPoly()
            out = DiffPoly.__new__(DiffPoly)
            out.t = {k: v * other for k, v in self.t.items()}
            return out
        if isinstance(other, DiffPoly):
            # integer numerators over a common denominator keep the inner loop cheap
            d1, n1 = _common(self.t)
            d2, n2 = _common(other.t)
            t = {}
            for k1, v1 in n1:
                for k2, v2 in n2:
                    if not k1:
                        k = k2
                    elif not k2:
                        k = k1
                    else:
                        k = tuple(sorted(k1 + k2))
                    t[k] = t.get(k, 0) + v1 * v2
            den = d1 * d2
            out = DiffPoly.__new__(DiffPoly)
            out.t = {k: Fraction(v, den) for k, v in t.items() if v}
            return out
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n):
        out = DiffPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus
    def dx(self):
        t = {}
        for mono, c in self.t.items():
            for idx, (name, d) in enumerate(mono):
                if idx and mono[idx - 1] == (name, d):
                    continue  # handled with multiplicity below
                mult = mono.count((name, d))
                rest = list(mono)
                rest.remove((name, d))
                k = tuple(sorted(rest + [(name, d + 1)]))
                t[k] = t.get(k, 0) + c * mult
        return DiffPoly(t)

    def dx_n(self, n):
        p = self
        for _ in range(n):
            p = p.dx()
        return p

    def partial(self, jet):
        """Partial derivative with respect to one jet variable."""
        t = {}
        for mono, c in self.t.items():
            mult = mono.count(jet)
            if mult:
                rest = list(mono)
                rest.remove(jet)
                k = tuple(rest)
                t[k] = t.get(k, 0) + c * mult
        return DiffPoly(t)

    # -- inspection
    def jets(self):
        return sorted({j for mono in self.t for j in mono})

    def constant(self):
        return self.t.get(_ONE, Fraction(0))

    def is_constant(self):
        return all(not k for k in self.t)

    def degrees(self, weights):
        """Set of extended degrees of the monomials: sum(weights[name] + d)."""
        return {sum(weights[n] + d for n, d in mono) for mono in self.t}

    def is_homogeneous(self, weights, degree=None):
        ds = self.degrees(weights)
        if not ds:
            return True
        if len(ds) != 1:
            return False
        return degree is None or ds == {degree}

    def linear_part(self):
        return DiffPoly({k: v for k, v in self.t.items() if len(k) == 1})

    # -- substitution / evaluation
    def substitute(self, mapping):
        """Replace each base variable ``name`` by a DiffPoly; jets follow by dx.

        ``mapping`` maps names to DiffPolys (names absent are kept).
        """
        cache = {}

        def jet_value(name, d):
            key = (name, d)
            if key not in cache:
                if name not in mapping:
                    cache[key] = DiffPoly.jet(name, d)
                elif d == 0:
                    cache[key] = DiffPoly.lift(mapping[name])
                else:
                    cache[key] = jet_value(name, d - 1).dx()
            return cache[key]

        out = DiffPoly()
        for mono, c in self.t.items():
            term = DiffPoly.const(c)
            for name, d in mono:
                term = term * jet_value(name, d)
            out = out + term
        return out

    def evaluate(self, values, zero=0, one=1):
        """Evaluate with ``values[(name, d)]`` (missing jets count as zero)."""
        acc = zero
        for mono, c in self.t.items():
            term = one * c
            for jet in mono:
                v = values.get(jet)
                if v is None or not v:
                    term = None
                    break
                term = term * v
            if term is not None:
                acc = acc + term
        return acc

    # -- text
    def render(self):
        if not self.t:
            return "0"
        parts = []
        for mono in sorted(self.t, key=_mono_order):
            c = self.t[mono]
            if not mono:
                parts.append(f"({fmt_rational(c)})")
            else:
                body = "*".join(f"{n}_{d}" for n, d in mono)
                parts.append(f"({fmt_rational(c)})*{body}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffPoly<{self.render()}>"

    __str__ = render


def _common(terms):
    den = 1
    for v in terms.values():
        den = lcm(den, v.denominator)
    return den, [(k, v.numerator * (den // v.denominator)) for k, v in terms.items()]


def _mono_order(mono):
    return (len(mono), sum(d for _, d in mono), tuple((_natural(n), d) for n, d in mono))


def _natural(name):
    m = re.match(r"([A-Za-z]+)(\d*)(.*)", name)
    if not m:
        return (name, 0, "")
    return (m.group(1), int(m.group(2) or 0), m.group(3))


_TERM = re.compile(r"\(([^)]*)\)((?:\*[A-Za-z][A-Za-z0-9]*_\d+)*)")


def parse(text):
    """Inverse of ``render``."""
    text = text.strip()
    if text == "0":
        return DiffPoly()
    out = DiffPoly()
    for m in _TERM.finditer(text):
        c = Fraction(m.group(1))
        jets = []
        for tok in filter(None, m.group(2).split("*")):
            name, d = tok.rsplit("_", 1)
            jets.append((name, int(d)))
        out = out + DiffPoly({tuple(sorted(jets)): c})
    return out


def monomials_of_degree(names_weights, degree, max_order=None):
    """All monomials with extended degree ``degree`` (weights are positive)."""
    jets = []
    for name, w in names_weights.items():
        d = 0
        while w + d <= degree and (max_order is None or d <= max_order):
            jets.append((name, d, w + d))
            d += 1
    jets.sort()
    out = []

    def rec(start, remaining, acc):
        if remaining == 0:
            out.append(tuple(sorted(acc)))
            return
        for idx in range(start, len(jets)):
            name, d, w = jets[idx]
            if w <= remaining:
                rec(idx, remaining - w, acc + [(name, d)])

    rec(0, degree, [])
    return out


def integrate_x(p, weights):
    """Return P with dx(P) = p, or raise ValueError if p is not a total derivative.

    Works degree by degree: an ansatz over all monomials of one lower extended
    degree is solved exactly.
    """
    from .linalg import sparse_rref

    if not p:
        return DiffPoly()
    if p.constant():
        raise ValueError("constants are not total derivatives")
    out = DiffPoly()
    by_deg = {}
    for mono, c in p.t.items():
        deg = sum(weights[n] + d for n, d in mono)
        by_deg.setdefault(deg, {})[mono] = c
    for deg, terms in by_deg.items():
        basis = monomials_of_degree(weights, deg - 1)
        images = [DiffPoly({m: Fraction(1)}).dx() for m in basis]
        targets = set(terms)
        for im in images:
            targets |= set(im.t)
        eqs = []
        for mono in targets:
            row = {idx: im.t.get(mono, 0) for idx, im in enumerate(images)}
            row["rhs"] = terms.get(mono, 0)
            eqs.append(row)
        try:
            piv = sparse_rref(eqs)
        except ArithmeticError as exc:
            raise ValueError("not a total derivative") from exc
        for idx, row in piv.items():
            val = row.get("rhs", 0)
            if val:
                out = out + DiffPoly({basis[idx]: val})
    if out.dx() != p:
        raise ValueError("integration check failed")
    return out
