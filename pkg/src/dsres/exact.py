"""Exact scalars and truncated series containers.

Everything here is over the rationals (``fractions.Fraction``), optionally
extended by a single quadratic irrationality ``kappa``.  Series objects carry
an explicit truncation guarantee: a ``floor`` below which nothing is claimed.
``floor=None`` means the series is exact (a finite Laurent polynomial).
"""
from __future__ import annotations

from fractions import Fraction

__all__ = [
    "fmt_rational",
    "parse_rational",
    "KappaNumber",
    "kappa_square",
    "PuiseuxMatrix",
    "ScalarSeries",
    "MultiSeries",
    "SizeMismatch",
    "expand_inverse_difference",
]


class SizeMismatch(ValueError):
    pass


def fmt_rational(x) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    return Fraction(str(s).strip())


def kappa_square(h: int) -> Fraction:
    """kappa**2 = (-h)**(-h) for kappa = sqrt(-h)**(-h)."""
    return Fraction(-h) ** (-h)


class KappaNumber:
    """Element ``rat + kap*kappa`` of Q(kappa) with kappa**2 = k2 (rational).

    For even Coxeter number kappa itself is rational and this class is not
    needed; callers then just use Fraction.
    """

    __slots__ = ("rat", "kap", "k2")

    def __init__(self, rat=0, kap=0, k2=None):
        if k2 is None:
            raise ValueError("k2 (the value of kappa**2) is required")
        self.rat = Fraction(rat)
        self.kap = Fraction(kap)
        self.k2 = Fraction(k2)

    @classmethod
    def kappa(cls, k2):
        return cls(0, 1, k2)

    def _coerce(self, other):
        if isinstance(other, KappaNumber):
            if other.k2 != self.k2:
                raise ValueError("mixing different quadratic extensions")
            return other
        if isinstance(other, (int, Fraction)):
            return KappaNumber(other, 0, self.k2)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KappaNumber(self.rat + o.rat, self.kap + o.kap, self.k2)

    __radd__ = __add__

    def __neg__(self):
        return KappaNumber(-self.rat, -self.kap, self.k2)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KappaNumber(self.rat - o.rat, self.kap - o.kap, self.k2)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KappaNumber(
            self.rat * o.rat + self.kap * o.kap * self.k2,
            self.rat * o.kap + self.kap * o.rat,
            self.k2,
        )

    __rmul__ = __mul__

    def inverse(self):
        # (a + b k)(a - b k) = a^2 - b^2 k2
        norm = self.rat * self.rat - self.kap * self.kap * self.k2
        if norm == 0:
            raise ZeroDivisionError("KappaNumber division by zero")
        return KappaNumber(self.rat / norm, -self.kap / norm, self.k2)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = KappaNumber(1, 0, self.k2)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.kap == 0 and self.rat == other
        if isinstance(other, KappaNumber):
            return (self.rat, self.kap, self.k2) == (other.rat, other.kap, other.k2)
        return NotImplemented

    def __hash__(self):
        if self.kap == 0:
            return hash(self.rat)
        return hash((self.rat, self.kap, self.k2))

    def __bool__(self):
        return bool(self.rat) or bool(self.kap)

    def __repr__(self):
        return f"KappaNumber({fmt_rational(self.rat)}, {fmt_rational(self.kap)}; k^2={fmt_rational(self.k2)})"

    def to_json(self):
        return {"rat": fmt_rational(self.rat), "kappa": fmt_rational(self.kap)}

    @classmethod
    def from_json(cls, d, k2):
        return cls(parse_rational(d["rat"]), parse_rational(d["kappa"]), k2)


def _min_floor(*floors):
    vals = [f for f in floors if f is not None]
    return max(vals) if vals else None


class ScalarSeries:
    """Truncated scalar Puiseux series: ``{exponent: coefficient}``."""

    __slots__ = ("terms", "floor")

    def __init__(self, terms=None, floor=None):
        floor = None if floor is None else Fraction(floor)
        clean = {}
        for e, c in (terms or {}).items():
            e = Fraction(e)
            if c and (floor is None or e >= floor):
                clean[e] = c
        self.terms = clean
        self.floor = floor

    def __getitem__(self, e):
        return self.terms.get(Fraction(e), 0)

    def max_exponent(self):
        return max(self.terms) if self.terms else None

    def __add__(self, other):
        if not isinstance(other, ScalarSeries):
            other = ScalarSeries({0: other})
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return ScalarSeries(terms, _min_floor(self.floor, other.floor))

    __radd__ = __add__

    def __neg__(self):
        return ScalarSeries({e: -c for e, c in self.terms.items()}, self.floor)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return ScalarSeries({e: s * c for e, c in self.terms.items()}, self.floor)

    def derivative(self):
        terms = {e - 1: e * c for e, c in self.terms.items() if e != 0}
        return ScalarSeries(terms, None if self.floor is None else self.floor - 1)

    def antiderivative(self):
        if Fraction(-1) in self.terms:
            raise ArithmeticError("exponent -1 has no Puiseux antiderivative")
        terms = {e + 1: c / (e + 1) for e, c in self.terms.items()}
        return ScalarSeries(terms, None if self.floor is None else self.floor + 1)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, ScalarSeries):
            return self.terms == other.terms
        return NotImplemented

    def __repr__(self):
        body = " + ".join(f"({c})*l^({fmt_rational(e)})" for e, c in sorted(self.terms.items(), reverse=True))
        return f"ScalarSeries[{body or '0'}; floor={self.floor}]"


class PuiseuxMatrix:
    """Truncated matrix-valued series in lambda with rational exponents.

    ``terms`` maps an exponent to a sparse matrix ``{(i, j): coeff}`` (0-based
    indices).  Zero coefficients and zero matrices are pruned, and nothing is
    stored below ``floor``.  Coefficients may be Fraction, KappaNumber or any
    ring element supporting ``+``, ``*`` and truth testing.
    """

    __slots__ = ("size", "terms", "floor")

    def __init__(self, size: int, terms=None, floor=None):
        self.size = size
        floor = None if floor is None else Fraction(floor)
        self.floor = floor
        clean = {}
        for e, mat in (terms or {}).items():
            e = Fraction(e)
            if floor is not None and e < floor:
                continue
            m = {ij: c for ij, c in mat.items() if c}
            if m:
                clean[e] = m
        self.terms = clean

    @classmethod
    def from_dense(cls, size, dense_terms, floor=None):
        terms = {}
        for e, rows in dense_terms.items():
            terms[e] = {(i, j): rows[i][j] for i in range(size) for j in range(size) if rows[i][j]}
        return cls(size, terms, floor)

    def exponents(self):
        return sorted(self.terms, reverse=True)

    def max_exponent(self):
        return max(self.terms) if self.terms else None

    def coefficient(self, e):
        """Dense coefficient matrix at exponent ``e`` (zeros if absent)."""
        m = self.terms.get(Fraction(e), {})
        return [[m.get((i, j), 0) for j in range(self.size)] for i in range(self.size)]

    def entry(self, i, j) -> ScalarSeries:
        return ScalarSeries({e: m[(i, j)] for e, m in self.terms.items() if (i, j) in m}, self.floor)

    def truncate(self, floor):
        floor = Fraction(floor)
        if self.floor is not None and floor < self.floor:
            raise ValueError("cannot truncate below the guarantee floor")
        return PuiseuxMatrix(self.size, self.terms, floor)

    def _check(self, other):
        if self.size != other.size:
            raise SizeMismatch(f"matrix sizes {self.size} and {other.size}")

    def __add__(self, other):
        self._check(other)
        terms = {e: dict(m) for e, m in self.terms.items()}
        for e, m in other.terms.items():
            t = terms.setdefault(e, {})
            for ij, c in m.items():
                t[ij] = t.get(ij, 0) + c
        return PuiseuxMatrix(self.size, terms, _min_floor(self.floor, other.floor))

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return PuiseuxMatrix(
            self.size, {e: {ij: s * c for ij, c in m.items()} for e, m in self.terms.items()}, self.floor
        )

    def shift(self, de):
        """Multiply by lambda**de."""
        de = Fraction(de)
        return PuiseuxMatrix(
            self.size, {e + de: m for e, m in self.terms.items()}, None if self.floor is None else self.floor + de
        )

    def _product_floor(self, other):
        cands = []
        if self.floor is not None and other.terms:
            cands.append(self.floor + other.max_exponent())
        if other.floor is not None and self.terms:
            cands.append(other.floor + self.max_exponent())
        if not cands:
            if self.floor is None and other.floor is None:
                return None
            # one side is identically zero: the product is exactly zero
            return None
        return max(cands)

    def __matmul__(self, other):
        return series_mul(self, other)

    def derivative(self):
        terms = {}
        for e, m in self.terms.items():
            if e != 0:
                terms[e - 1] = {ij: e * c for ij, c in m.items()}
        return PuiseuxMatrix(self.size, terms, None if self.floor is None else self.floor - 1)

    def commutator(self, other):
        return series_mul(self, other) - series_mul(other, self)

    def trace(self) -> ScalarSeries:
        terms = {}
        for e, m in self.terms.items():
            t = 0
            for i in range(self.size):
                c = m.get((i, i))
                if c:
                    t = t + c
            terms[e] = t
        return ScalarSeries(terms, self.floor)

    def is_traceless(self):
        return self.trace().is_zero()

    def map_coefficients(self, fn):
        return PuiseuxMatrix(
            self.size, {e: {ij: fn(c) for ij, c in m.items()} for e, m in self.terms.items()}, self.floor
        )

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, PuiseuxMatrix):
            return self.size == other.size and self.terms == other.terms
        return NotImplemented

    def __repr__(self):
        return f"PuiseuxMatrix(size={self.size}, {len(self.terms)} exponents, floor={self.floor})"


def series_mul(A: PuiseuxMatrix, B: PuiseuxMatrix) -> PuiseuxMatrix:
    """Matrix product of two truncated series with an honest floor."""
    A._check(B)
    floor = A._product_floor(B)
    terms = {}
    # index B by row for the sparse product
    for eb, mb in B.terms.items():
        rows = {}
        for (k, j), c in mb.items():
            rows.setdefault(k, []).append((j, c))
        for ea, ma in A.terms.items():
            e = ea + eb
            if floor is not None and e < floor:
                continue
            t = terms.setdefault(e, {})
            for (i, k), a in ma.items():
                for j, b in rows.get(k, ()):
                    t[(i, j)] = t.get((i, j), 0) + a * b
    return PuiseuxMatrix(A.size, terms, floor)


def pairing(A: PuiseuxMatrix, B: PuiseuxMatrix) -> ScalarSeries:
    """tr(A B): the normalized invariant form in the defining representation."""
    A._check(B)
    floor = A._product_floor(B)
    terms = {}
    for ea, ma in A.terms.items():
        for eb, mb in B.terms.items():
            e = ea + eb
            if floor is not None and e < floor:
                continue
            s = 0
            for (i, k), a in ma.items():
                b = mb.get((k, i))
                if b:
                    s = s + a * b
            if s:
                terms[e] = terms.get(e, 0) + s
    return ScalarSeries(terms, floor)


__all__ += ["series_mul", "pairing"]


class MultiSeries:
    """Truncated multivariate Puiseux series in lambda_1..lambda_N.

    ``terms`` maps exponent tuples to coefficients.  ``window`` holds one
    ``(floor, ceiling)`` pair per variable (``None`` = unbounded); every stored
    term lies inside the window and every coefficient inside it is exact.
    ``offsets`` records the exponent class mod 1 of each variable.
    """

    __slots__ = ("nvars", "terms", "window", "offsets")

    def __init__(self, nvars, terms=None, window=None, offsets=None):
        self.nvars = nvars
        if window is None:
            window = tuple((None, None) for _ in range(nvars))
        self.window = tuple(
            (None if lo is None else Fraction(lo), None if hi is None else Fraction(hi)) for lo, hi in window
        )
        self.offsets = tuple(Fraction(o) for o in offsets) if offsets is not None else None
        clean = {}
        for key, c in (terms or {}).items():
            if not c:
                continue
            key = tuple(Fraction(e) for e in key)
            if self._inside(key):
                clean[key] = clean.get(key, 0) + c
        self.terms = {k: c for k, c in clean.items() if c}
        if self.offsets is not None:
            for key in self.terms:
                for e, o in zip(key, self.offsets):
                    if (e - o).denominator != 1:
                        raise ValueError(f"exponent {e} outside class {o} mod 1")

    def _inside(self, key):
        for e, (lo, hi) in zip(key, self.window):
            if lo is not None and e < lo:
                return False
            if hi is not None and e > hi:
                return False
        return True

    def __getitem__(self, key):
        return self.terms.get(tuple(Fraction(e) for e in key), 0)

    def scale(self, s):
        return MultiSeries(self.nvars, {k: s * c for k, c in self.terms.items()}, self.window, self.offsets)

    def __add__(self, other):
        if other.nvars != self.nvars:
            raise SizeMismatch("variable counts differ")
        window = tuple(
            (_min_floor(a[0], b[0]), _max_ceiling(a[1], b[1])) for a, b in zip(self.window, other.window)
        )
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        offsets = self.offsets if self.offsets == other.offsets else None
        return MultiSeries(self.nvars, terms, window, offsets)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def restrict(self, window):
        return MultiSeries(self.nvars, self.terms, window, self.offsets)

    def max_exponents(self):
        if not self.terms:
            return tuple(None for _ in range(self.nvars))
        return tuple(max(k[v] for k in self.terms) for v in range(self.nvars))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, MultiSeries):
            return self.nvars == other.nvars and self.terms == other.terms
        return NotImplemented

    def __repr__(self):
        return f"MultiSeries(N={self.nvars}, {len(self.terms)} terms, window={self.window})"


def _max_ceiling(a, b):
    if a is None or b is None:
        return None
    return min(a, b)


def multiply_pruned(factors, window, nvars):
    """Product of MultiSeries factors, keeping only terms inside ``window``.

    Intermediate terms are dropped only when no combination of the remaining
    factors could bring them back into the window, so the result is exact
    inside the window provided each factor is exact where it is used.
    """
    window = tuple((None if lo is None else Fraction(lo), hi) for lo, hi in window)
    # remaining[t][v]: largest exponent in variable v obtainable from factors t..end
    n = len(factors)
    remaining = [[Fraction(0)] * nvars for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        mx = factors[t].max_exponents()
        for v in range(nvars):
            m = mx[v] if mx[v] is not None else Fraction(0)
            remaining[t][v] = remaining[t + 1][v] + m
    acc = {tuple(Fraction(0) for _ in range(nvars)): Fraction(1)}
    for t, f in enumerate(factors):
        if not f.terms:
            return MultiSeries(nvars, {}, window)
        rest = remaining[t + 1]
        new = {}
        for ka, ca in acc.items():
            for kb, cb in f.terms.items():
                key = tuple(a + b for a, b in zip(ka, kb))
                ok = True
                for v in range(nvars):
                    lo = window[v][0]
                    if lo is not None and key[v] + rest[v] < lo:
                        ok = False
                        break
                if ok:
                    new[key] = new.get(key, 0) + ca * cb
        acc = {k: c for k, c in new.items() if c}
    return MultiSeries(nvars, acc, window)


__all__ += ["multiply_pruned"]


def expand_inverse_difference(i: int, j: int, order: int, nvars: int, power: int = 1) -> MultiSeries:
    """Expansion of ``1/(lambda_i - lambda_j)**power`` in the chart |l_0| > |l_1| > ...

    Variables are 0-based.  For ``power=1`` the geometric series is kept up to
    ``lambda_small**order``; the result is exact for every monomial whose
    exponent in the smaller variable is at most ``order``, which the window
    records as a ceiling on that variable.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if i == j:
        raise ValueError("i and j must differ")
    big, small = (i, j) if i < j else (j, i)
    sign = 1 if i < j else -1
    sign = sign ** power
    terms = {}
    for m in range(order + 1):
        # 1/(b - s)^p = sum_m binom(m+p-1, p-1) s^m b^(-m-p)
        coeff = _binom(m + power - 1, power - 1)
        key = [0] * nvars
        key[big] = -m - power
        key[small] = m
        terms[tuple(key)] = Fraction(sign * coeff)
    window = [(None, None)] * nvars
    window[small] = (None, order)
    return MultiSeries(nvars, terms, tuple(window))


def _binom(n, k):
    from math import comb

    return comb(n, k)


def univariate(series: ScalarSeries, var: int, nvars: int) -> MultiSeries:
    """Embed a one-variable series as a MultiSeries in variable ``var``."""
    terms = {}
    for e, c in series.terms.items():
        key = [0] * nvars
        key[var] = e
        terms[tuple(key)] = c
    window = [(None, None)] * nvars
    window[var] = (series.floor, None)
    return MultiSeries(nvars, terms, tuple(window))


__all__ += ["univariate"]


class XPoly:
    """Polynomial in one variable x with exact coefficients (Fraction or KappaNumber)."""

    __slots__ = ("c",)

    def __init__(self, coeffs=None):
        self.c = {p: v for p, v in (coeffs or {}).items() if v}

    @classmethod
    def x(cls):
        return cls({1: Fraction(1)})

    @staticmethod
    def lift(v):
        return v if isinstance(v, XPoly) else XPoly({0: v})

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        other = XPoly.lift(other)
        return self.c == other.c

    def __add__(self, other):
        other = XPoly.lift(other)
        c = dict(self.c)
        for p, v in other.c.items():
            c[p] = c[p] + v if p in c else v
        return XPoly(c)

    __radd__ = __add__

    def __neg__(self):
        return XPoly({p: -v for p, v in self.c.items()})

    def __sub__(self, other):
        return self + (-XPoly.lift(other))

    def __rsub__(self, other):
        return XPoly.lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, XPoly):
            return XPoly({p: v * other for p, v in self.c.items()})
        c = {}
        for p, v in self.c.items():
            for q, w in other.c.items():
                c[p + q] = c[p + q] + v * w if p + q in c else v * w
        return XPoly(c)

    __rmul__ = __mul__

    def derivative(self):
        return XPoly({p - 1: v * p for p, v in self.c.items() if p})

    def at(self, x):
        acc = 0
        for p, v in self.c.items():
            acc = acc + v * x ** p
        return acc

    def __repr__(self):
        return f"XPoly({self.c})"


__all__ += ["XPoly"]
