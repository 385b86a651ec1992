"""Dressing of the gauge-fixed Lax operator and its basic resolvents.

The pair (U, H) is fixed by

    exp(-ad_U) (d/dx + Lambda + q) = d/dx + Lambda + H,

with U of negative principal degree and zero kernel part, and H in the kernel
of ad_Lambda.  Both are built one principal degree at a time.  The basic
resolvents are then R_a = exp(ad_U) Lambda_{m_a}.

Loop elements carry DiffPoly coefficients; a component of principal degree e
is stored under key e of a plain dict (a "graded" element).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .diffpoly import DiffPoly
from .exact import KappaNumber, PuiseuxMatrix, XPoly, kappa_square
from .lie import (
    AlgebraSpec,
    InvariantError,
    graded_solver,
    lambda_j,
    lambda_loop,
    le_add,
    le_bracket,
    le_from_matrix,
    le_map,
    le_scale,
    le_split_degrees,
    lowest_weight_gauge,
    zeros,
)


class SliceError(ValueError):
    pass


class DepthError(ValueError):
    pass


# ---------------------------------------------------------------- gauge slices

@dataclass
class Slice:
    """A family of Lax operators d/dx + Lambda + q with q given by DiffPoly entries."""

    name: str
    spec: AlgebraSpec
    q: dict  # loop element {(i, j, 0): DiffPoly}
    weights: dict  # jet name -> extended degree of its 0-th jet
    coordinates: dict = field(default_factory=dict)  # name -> matrix basis element

    def q_graded(self):
        return le_split_degrees(self.q, self.spec.h)


def lowest_weight_slice(spec: AlgebraSpec) -> Slice:
    """q = sum_a u_a gamma^a with coordinates u1..un."""
    gd = lowest_weight_gauge(spec)
    r = spec.r
    q = {}
    weights = {}
    coords = {}
    for a in spec.exponents:
        name = f"u{a}"
        weights[name] = spec.m(a) + 1
        g = gd.gamma[a - 1]
        coords[name] = g
        u = DiffPoly.jet(name)
        for i in range(r):
            for j in range(r):
                if g[i][j]:
                    q[(i, j, 0)] = q.get((i, j, 0), DiffPoly()) + u * g[i][j]
    return Slice("lowest-weight", spec, q, weights, coords)


def full_borel_slice(spec: AlgebraSpec) -> Slice:
    """q with all lower-triangular entries b{p}{q} and Cartan coordinates h{i} free."""
    r = spec.r
    q = {}
    weights = {}
    coords = {}
    for p in range(r):
        for s in range(p):
            name = f"b{p + 1}{s + 1}"
            weights[name] = (p - s) + 1
            m = zeros(r)
            m[p][s] = Fraction(1)
            coords[name] = m
            q[(p, s, 0)] = DiffPoly.jet(name)
    for i in range(r - 1):
        name = f"h{i + 1}"
        weights[name] = 1
        m = zeros(r)
        m[i][i] = Fraction(1)
        m[i + 1][i + 1] = Fraction(-1)
        coords[name] = m
        hv = DiffPoly.jet(name)
        q[(i, i, 0)] = q.get((i, i, 0), DiffPoly()) + hv
        q[(i + 1, i + 1, 0)] = q.get((i + 1, i + 1, 0), DiffPoly()) - hv
    q = {k: v for k, v in q.items() if v}
    return Slice("full-b", spec, q, weights, coords)


def make_slice(spec, name):
    if name in ("lowest-weight", "lw"):
        return lowest_weight_slice(spec)
    if name in ("full-b", "full-borel"):
        return full_borel_slice(spec)
    raise SliceError(f"unknown slice descriptor {name!r}")


def slice_from_q(spec, q, weights, name="custom"):
    return Slice(name, spec, {k: DiffPoly.lift(v) for k, v in q.items() if v}, weights)


# ---------------------------------------------------------------- dressing pair

def _gsum(parts):
    return le_add(*parts) if parts else {}


def _dx(x):
    return le_map(x, lambda c: c.dx())


@dataclass
class DressingPair:
    spec: AlgebraSpec
    slice: Slice
    U: dict  # degree -i -> loop element, i = 1..depth
    H: dict  # degree -k -> loop element, k = 0..depth-1
    depth: int


def dressing_pair(sl: Slice, depth: int, schedule="incremental") -> DressingPair:
    """Find U up to degree -depth and H down to degree -(depth-1)."""
    if depth < 1:
        raise DepthError("depth must be at least 1")
    if schedule == "direct":
        return _dressing_direct(sl, depth)
    if schedule != "incremental":
        raise ValueError(f"unknown schedule {schedule!r}")
    spec = sl.spec
    sv = graded_solver(spec)
    lam = lambda_loop(spec)
    qg = sl.q_graded()
    if any(e > 0 for e in qg):
        raise SliceError("q must have nonpositive principal degree")
    A = [dict(qg)]  # A[j][e]: degree-e part of (-ad_U)^j (Lambda + q) / j!
    A[0][1] = lam
    C = [{}]  # C[j][e]: degree-e part of (-ad_U)^j (U_x) / j!
    U, H = {}, {}
    for k in range(depth):
        e = -k
        # extend the BCH tables at degree e, omitting the still unknown U_(k+1)
        for j in range(1, k + 2):
            if len(A) <= j:
                A.append({})
                C.append({})
            parts = []
            for i in range(1, k + 1):
                y = A[j - 1].get(e + i)
                if y:
                    parts.append(le_bracket(U[-i], y))
            A[j][e] = le_scale(_gsum(parts), Fraction(-1, j)) if parts else {}
            parts = []
            for i in range(1, k + 1):
                y = C[j - 1].get(e + i)
                if y:
                    parts.append(le_bracket(U[-i], y))
            C[j][e] = le_scale(_gsum(parts), Fraction(-1, j)) if parts else {}
        if k >= 1:
            C[0][e] = _dx(U[-k])
        G = [A[0].get(e, {})]
        for j in range(1, len(A)):
            G.append(A[j].get(e, {}))
        for j in range(len(C)):
            y = C[j].get(e)
            if y:
                G.append(le_scale(y, Fraction(1, j + 1)))
        G = _gsum(G)
        X, c = sv.solve(G, e)
        U[-(k + 1)] = X
        H[e] = le_scale(lambda_j(spec, e), c) if c else {}
        if k == 0 and H[e]:
            raise InvariantError("H has a degree-0 component")
        A[1][e] = le_add(A[1].get(e, {}), le_scale(le_bracket(X, lam), -1))
    return DressingPair(spec, sl, U, H, depth)


def _truncate(x, h, lo):
    return {key: c for key, c in x.items() if (key[1] - key[0]) + h * key[2] >= lo}


def _conj(U, X, lo, h, sign):
    """exp(sign * ad_U) X keeping principal degrees >= lo (U is graded: deg -> elem)."""
    Ufull = _gsum([u for u in U.values()])
    total = dict(X)
    term = X
    j = 0
    while term:
        j += 1
        term = _truncate(le_scale(le_bracket(Ufull, term), Fraction(sign, j)), h, lo)
        total = le_add(total, term)
    return total


def _dressing_direct(sl: Slice, depth: int) -> DressingPair:
    """Reference schedule: recompute the whole conjugation at every degree."""
    spec = sl.spec
    h = spec.h
    sv = graded_solver(spec)
    lam = lambda_loop(spec)
    U, H = {}, {}
    for k in range(depth):
        e = -k
        lo = e
        base = le_add(lam, sl.q)
        conj = _conj(U, base, lo, h, -1)
        Ux = _gsum([_dx(u) for u in U.values()])
        # exp(-ad_U) applied to d/dx contributes sum_j (-ad_U)^j U_x / (j+1)!
        Ufull = _gsum(list(U.values()))
        term = Ux
        acc = _truncate(Ux, h, lo)
        j = 0
        fact = Fraction(1)
        while term:
            j += 1
            term = _truncate(le_scale(le_bracket(Ufull, term), Fraction(-1, 1)), h, lo)
            fact = fact * (j + 1)
            acc = le_add(acc, le_scale(term, 1 / fact))
        G = {key: c for key, c in le_add(conj, acc).items() if (key[1] - key[0]) + h * key[2] == e}
        X, c = sv.solve(G, e)
        U[-(k + 1)] = X
        H[e] = le_scale(lambda_j(spec, e), c) if c else {}
    return DressingPair(spec, sl, U, H, depth)


# ---------------------------------------------------------------- resolvents

@dataclass
class Resolvent:
    """R_a as graded components, exact for principal degrees >= lowest."""

    spec: AlgebraSpec
    index: int
    parts: dict  # degree -> loop element
    lowest: int

    def loop(self):
        return _gsum(list(self.parts.values()))

    def lambda_coefficient(self, k):
        """Matrix (dict (i,j)->coeff) of lambda**k; raises if not fully computed."""
        r, h = self.spec.r, self.spec.h
        if h * k - (r - 1) < self.lowest:
            raise DepthError(f"lambda^{k} needs degree {h * k - (r - 1)} < {self.lowest}")
        out = {}
        for d in range(h * k - (r - 1), h * k + r):
            for (i, j, kk), c in self.parts.get(d, {}).items():
                if kk == k:
                    out[(i, j)] = c
        return out

    def min_complete_power(self):
        r, h = self.spec.r, self.spec.h
        return ceil(Fraction(self.lowest + r - 1, h))


def basic_resolvent(pair: DressingPair, a: int, depth: int) -> Resolvent:
    """R_a = exp(ad_U) Lambda_{m_a} down to principal degree m_a - depth."""
    spec = pair.spec
    if depth > pair.depth:
        raise DepthError(f"dressing depth {pair.depth} < requested {depth}")
    m = spec.m(a)
    lo = m - depth
    S = [{m: lambda_j(spec, m)}]
    R = {m: S[0][m]}
    j = 0
    while True:
        j += 1
        nxt = {}
        for e in range(m - 1, lo - 1, -1):
            parts = []
            for e2, y in S[j - 1].items():
                i = e2 - e
                if 1 <= i <= depth and y:
                    parts.append(le_bracket(pair.U[-i], y))
            if parts:
                v = le_scale(_gsum(parts), Fraction(1, j))
                if v:
                    nxt[e] = v
        if not nxt:
            break
        S.append(nxt)
        for e, v in nxt.items():
            R[e] = le_add(R.get(e, {}), v)
    R = {e: le_map(v, DiffPoly.lift) for e, v in R.items() if v}
    return Resolvent(spec, a, R, lo)


def lax_commutator(pair: DressingPair, R: Resolvent):
    """[d/dx + Lambda + q, R], truncated to degrees where it is exact."""
    spec = pair.spec
    h = spec.h
    full = R.loop()
    lam = lambda_loop(spec)
    res = le_add(_dx(full), le_bracket(le_add(lam, pair.slice.q), full))
    # the bracket with Lambda raises degree by 1: exact for degrees >= lowest + 1
    return {k: c for k, c in res.items() if (k[1] - k[0]) + h * k[2] >= R.lowest + 1}


def q_coefficient(R: Resolvent):
    """lambda**1 coefficient of R_b as a dense matrix."""
    r = R.spec.r
    co = R.lambda_coefficient(1)
    return [[co.get((i, j), DiffPoly()) for j in range(r)] for i in range(r)]


# ---------------------------------------------------------------- gauge transforms

def gauge_transform(sl: Slice, N) -> dict:
    """q~ = exp(ad_N)(B + q) - B for a constant strictly lower-triangular N."""
    spec = sl.spec
    r = spec.r
    for i in range(r):
        for j in range(r):
            if N[i][j] and i <= j:
                raise ValueError("N must be strictly lower triangular")
    Nl = le_from_matrix(N)
    lam = lambda_loop(spec)
    base = le_add(lam, sl.q)
    total = dict(base)
    term = base
    j = 0
    while term:
        j += 1
        term = le_scale(le_bracket(Nl, term), Fraction(1, j))
        total = le_add(total, term)
    out = le_add(total, le_scale(lam, -1))
    for (i, j, k), c in out.items():
        if k != 0 or j > i:
            raise InvariantError("gauge transform left the Borel subalgebra")
    return out


def conjugate_constant(N, X):
    """exp(ad_N) X for a constant nilpotent matrix N and a loop element X."""
    Nl = le_from_matrix(N)
    total = dict(X)
    term = X
    j = 0
    while term:
        j += 1
        term = le_scale(le_bracket(Nl, term), Fraction(1, j))
        total = le_add(total, term)
    return total


def coordinates_of(sl: Slice, q):
    """Express a Borel-valued loop element in the coordinates of ``sl`` (full-b only)."""
    if sl.name != "full-b":
        raise SliceError("coordinate extraction implemented for the full-b slice")
    r = sl.spec.r
    out = {}
    for p in range(r):
        for s in range(p):
            out[f"b{p + 1}{s + 1}"] = DiffPoly.lift(q.get((p, s, 0), 0))
    acc = DiffPoly()
    for i in range(r - 1):
        acc = acc + DiffPoly.lift(q.get((i, i, 0), 0))
        out[f"h{i + 1}"] = acc
    return out


# ---------------------------------------------------------------- topological point

def kappa_value(h):
    """kappa = sqrt(-h)**(-h): a Fraction for even h, a KappaNumber otherwise."""
    if h % 2 == 0:
        return Fraction(-h) ** (-(h // 2))
    return KappaNumber.kappa(kappa_square(h))


def topological_values(spec, with_x=True):
    """Jet values at the topological point u_n = x/kappa."""
    kap = kappa_value(spec.h)
    inv = 1 / kap if isinstance(kap, Fraction) else kap.inverse()
    vals = {(f"u{spec.n}", 1): XPoly({0: inv})}
    if with_x:
        vals[(f"u{spec.n}", 0)] = XPoly({1: inv})
    return vals, kap


def evaluate_topological(R: Resolvent, sl: Slice, with_x=True):
    """Substitute the topological point into R; coefficients become XPolys."""
    if sl.name != "lowest-weight":
        raise SliceError("topological evaluation needs the lowest-weight slice")
    vals, kap = topological_values(sl.spec, with_x)
    parts = {}
    for d, x in R.parts.items():
        ev = {}
        for key, c in x.items():
            v = c.evaluate(vals, zero=XPoly(), one=XPoly({0: Fraction(1)}))
            if v:
                ev[key] = v
        if ev:
            parts[d] = ev
    return Resolvent(R.spec, R.index, parts, R.lowest), kap


def resolvent_to_series(R: Resolvent, at_x=0):
    """lambda**(-m/h) R(lambda) at x = at_x as a PuiseuxMatrix with an honest floor."""
    spec = R.spec
    mh = Fraction(spec.m(R.index), spec.h)
    pmin = R.min_complete_power()
    terms = {}
    for d, x in R.parts.items():
        for (i, j, k), c in x.items():
            if k < pmin:
                continue
            v = c.at(at_x) if isinstance(c, XPoly) else c
            if v:
                e = Fraction(k) - mh
                t = terms.setdefault(e, {})
                t[(i, j)] = t[(i, j)] + v if (i, j) in t else v
    return PuiseuxMatrix(spec.r, terms, Fraction(pmin) - mh)


def key_lemma_defect(Rx: Resolvent, kap):
    """d/dx R^ - kappa^-1 d/dlambda R^ for R^ = lambda^(-m/h) R, as a loop element.

    Only lambda powers where both sides are fully computed are returned.
    """
    spec = Rx.spec
    mh = Fraction(spec.m(Rx.index), spec.h)
    inv = 1 / kap if isinstance(kap, Fraction) else kap.inverse()
    full = Rx.loop()
    pmin = Rx.min_complete_power()
    out = {}
    for (i, j, k), c in full.items():
        t = c.derivative()
        if t and k >= pmin:
            out[(i, j, k)] = out.get((i, j, k), XPoly()) + t
        # lambda-derivative of lambda^(k - m/h): lands at power k-1 (relative to lambda^(-m/h))
        f = Fraction(k) - mh
        if k - 1 >= pmin:
            out[(i, j, k - 1)] = out.get((i, j, k - 1), XPoly()) - c * (inv * f)
    return {key: v for key, v in out.items() if v}


# ---------------------------------------------------------------- extended degree

def degree_audit(parts, weights, total, h):
    """Check that every coefficient of E_ij lambda**k has extended degree total - e.

    ``parts`` maps principal degree e to a loop element (or is a flat loop
    element).  Returns a list of offending keys; empty means the audit passed.
    """
    if parts and all(isinstance(k, int) for k in parts):
        items = [(key, c) for x in parts.values() for key, c in x.items()]
    else:
        items = list(parts.items())
    bad = []
    for (i, j, k), c in items:
        e = (j - i) + h * k
        if not DiffPoly.lift(c).is_homogeneous(weights, total - e):
            bad.append((i, j, k))
    return bad


def audit_pair(pair: DressingPair):
    """Extended-degree audit of U (degree 0) and H (degree 1)."""
    h, w = pair.spec.h, pair.slice.weights
    return {"U": degree_audit(pair.U, w, 0, h), "H": degree_audit(pair.H, w, 1, h)}
