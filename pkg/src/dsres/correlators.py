"""Two-point functions, normal coordinates, DS flows and r-spin correlators.

The symbolic half (two-point functions, normal coordinates, flows) works on
basic resolvents from the dressing engine.  The numeric half evaluates the
cyclic trace formula on regular solutions of the topological ODE and reads
off exact intersection numbers using the rational normalization

    value = c / ((-r)**(g-1+N) * prod_l (-1)**k_l * (a_l/r)_(k_l+1)),

where c is the coefficient of prod_l lambda_l**(-a_l/r - k_l - 1).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .diffpoly import DiffPoly
from .dressing import Slice, basic_resolvent, dressing_pair
from .exact import (
    MultiSeries,
    ScalarSeries,
    expand_inverse_difference,
    fmt_rational,
    multiply_pruned,
)
from .lie import AlgebraSpec, InvariantError, adjoint_tensor
from .topo import airy, cached_solve


class CancellationError(InvariantError):
    pass


class WindowError(ValueError):
    pass


# ---------------------------------------------------------------- resolvent bundle

class ResolventSet:
    """All basic resolvents of one slice, complete down to lambda**pmin."""

    def __init__(self, sl: Slice, pmin: int):
        spec = sl.spec
        self.spec = spec
        self.slice = sl
        self.pmin = pmin
        depths = {a: spec.m(a) - spec.h * pmin + spec.r - 1 for a in spec.exponents}
        self.depth = max(depths.values())
        self.pair = dressing_pair(sl, self.depth)
        self.R = {a: basic_resolvent(self.pair, a, depths[a]) for a in spec.exponents}
        self._coef = {}

    def coeff(self, a, p):
        """lambda**p coefficient of R_a as a sparse matrix {(i, j): DiffPoly}."""
        if p > 1:
            return {}
        key = (a, p)
        if key not in self._coef:
            if p < self.pmin:
                raise WindowError(f"R_{a} only complete down to lambda^{self.pmin}")
            self._coef[key] = self.R[a].lambda_coefficient(p)
        return self._coef[key]


def _tr(X, Y):
    s = DiffPoly()
    for (i, j), c in X.items():
        d = Y.get((j, i))
        if d:
            s = s + c * d
    return s


# ---------------------------------------------------------------- two-point functions

@dataclass
class TwoPointTable:
    a: int
    b: int
    kmax: int
    omega: dict = field(default_factory=dict)  # (k, l) -> DiffPoly

    def __getitem__(self, kl):
        return self.omega[kl]


def _omega_entry(rs, a, b, k, J):
    """Coefficient of lambda**(-k-1) mu**J in (R_a(lambda)|R_b(mu)) / (lambda-mu)**2."""
    s = DiffPoly()
    for i in range(1 - k, 2):
        j = J - (i + k - 1)
        if j > 1:
            continue
        s = s + _tr(rs.coeff(a, i), rs.coeff(b, j)) * (i + k)
    return s


def two_point_gen(rs: ResolventSet, a, b, kmax):
    """Omega_{a,k;b,l} for k + l <= kmax, with the well-posedness check."""
    spec = rs.spec
    eta = spec.eta(a, b)
    ma, mb = spec.m(a), spec.m(b)
    table = TwoPointTable(a, b, kmax)
    for k in range(kmax + 1):
        for J in range(0, k + 2):
            got = _omega_entry(rs, a, b, k, J)
            want = eta * (ma * (k + 1) + mb * k) if J == k else 0
            if got != want:
                raise CancellationError(
                    f"two-point generating function keeps lambda^{-k - 1} mu^{J}: {got - want}"
                )
        for l in range(kmax - k + 1):
            table.omega[(k, l)] = _omega_entry(rs, a, b, k, -l - 1)
    return table


def two_point_residue(rs: ResolventSet, a, b, kmax):
    """Omega_{a,k;b,0} for k <= kmax from (R_a(lambda)|Q_b) - eta_ab m_b."""
    spec = rs.spec
    Q = rs.coeff(b, 1)
    top = _tr(rs.coeff(a, 1), Q)
    const = _tr(rs.coeff(a, 0), Q) - spec.eta(a, b) * spec.m(b)
    if top or const:
        raise CancellationError("(R_a|Q_b) - eta m_b has a nonnegative power of lambda")
    return [_tr(rs.coeff(a, -k - 1), Q) for k in range(kmax + 1)]


def omega_degree(spec, a, b, k, l):
    """Extended degree of Omega_{a,k;b,l}."""
    return spec.m(a) + spec.m(b) + spec.h * (k + l)


# ---------------------------------------------------------------- normal coordinates

def normal_coordinates(rs: ResolventSet):
    """r_a = Omega_{a,0;1,0}, with the triangular shape checked."""
    spec = rs.spec
    if rs.slice.name != "lowest-weight":
        raise ValueError("normal coordinates need the lowest-weight slice")
    out = {}
    for a in spec.exponents:
        ra = two_point_residue(rs, a, 1, 0)[0]
        lead = ra.t.get(((f"u{a}", 0),), 0)
        if lead != Fraction(-spec.m(a), spec.h):
            raise InvariantError(f"leading Miura coefficient of r{a} is {lead}")
        rest = ra - DiffPoly.jet(f"u{a}", 0, lead)
        for name, _ in rest.jets():
            if int(name[1:]) >= a:
                raise InvariantError(f"r{a} is not triangular: contains {name}")
        out[a] = ra
    return out


def miura_inverse(spec, rcoords):
    """Express u_a through the jets of r_1..r_a by triangular back-substitution."""
    umap = {}
    for a in spec.exponents:
        c = Fraction(spec.h, spec.m(a))
        P = rcoords[a] + DiffPoly.jet(f"u{a}") * Fraction(spec.m(a), spec.h)
        umap[f"u{a}"] = (DiffPoly.jet(f"r{a}") - P.substitute(umap)) * (-c)
    for a in spec.exponents:
        if rcoords[a].substitute(umap) != DiffPoly.jet(f"r{a}"):
            raise InvariantError("Miura round trip failed")
    return umap


def r_weights(spec):
    return {f"r{a}": spec.m(a) + 1 for a in spec.exponents}


def ds_flow(rs: ResolventSet, a, b, k, umap):
    """dr_a/dT^{b,k} = -d/dx Omega_{b,k;a,0}, written in r-jets."""
    omega = two_point_residue(rs, b, a, k)[k]
    return -(omega.dx().substitute(umap))


def prolong(flow, target):
    """Action of the evolutionary vector field ``flow`` (name -> DiffPoly) on ``target``."""
    out = DiffPoly()
    for name, d in target.jets():
        if name in flow:
            out = out + target.partial((name, d)) * flow[name].dx_n(d)
    return out


def flow_commutator(X, Y):
    """[X, Y] on each coordinate; zero for commuting flows."""
    return {name: prolong(X, Y[name]) - prolong(Y, X[name]) for name in X}


# ---------------------------------------------------------------- genus and normalization

def genus(r, insertions):
    """Genus fixed by the dimension constraint (a Fraction; integral when allowed)."""
    N = len(insertions)
    sa = sum(a - 1 for a, _ in insertions)
    sk = sum(k for _, k in insertions)
    return Fraction(sa + r * sk + 2 * r + 2 - r * N, 2 * r + 2)


def pochhammer(x, n):
    p = Fraction(1)
    for i in range(n):
        p *= x + i
    return p


def normalization_factor(r, insertions, g):
    N = len(insertions)
    f = Fraction(-r) ** (int(g) - 1 + N)
    for a, k in insertions:
        f *= (-1) ** k * pochhammer(Fraction(a, r), k + 1)
    return f


def target_exponent(r, a, k):
    return Fraction(-a, r) - k - 1


@dataclass(frozen=True)
class CorrelatorRecord:
    r: int
    insertions: tuple  # sorted ((a, k), ...)
    genus: Fraction
    value: Fraction

    @property
    def N(self):
        return len(self.insertions)

    def key(self):
        return ";".join(f"{a}:{k}" for a, k in self.insertions)

    def csv_row(self):
        return [str(self.r), str(self.N), self.key(), fmt_rational(self.genus), fmt_rational(self.value)]

    def to_json(self):
        return {
            "r": self.r,
            "insertions": [[a, k] for a, k in self.insertions],
            "genus": fmt_rational(self.genus),
            "value": fmt_rational(self.value),
        }


CSV_HEADER = ["r", "N", "insertions", "genus", "value"]


def _decode_exponent(r, e):
    """(a, k) with e = -a/r - k - 1, or None."""
    x = -e - 1  # = a/r + k
    k = x.numerator // x.denominator
    a = (x - k) * r
    if a.denominator != 1 or not 1 <= a <= r - 1 or k < 0:
        return None
    return int(a), int(k)


def extract_correlators(series, r, indices=None):
    """Records for every monomial prod lambda_l**(-a_l/r - k_l - 1) of ``series``.

    ``series`` is a ScalarSeries (one point) or a MultiSeries.  A nonzero
    coefficient at a non-integral genus is a pipeline error.
    """
    if isinstance(series, ScalarSeries):
        items = [((e,), c) for e, c in series.terms.items()]
    else:
        items = list(series.terms.items())
    out = []
    for key, c in items:
        ins = []
        for e in key:
            d = _decode_exponent(r, e)
            if d is None:
                break
            ins.append(d)
        else:
            if indices is not None and [a for a, _ in ins] != list(indices):
                raise InvariantError("monomial exponent class does not match its insertion index")
            g = genus(r, ins)
            if g.denominator != 1 or g < 0:
                if c:
                    raise InvariantError(f"nonzero coefficient {c} at genus {g} for {ins}")
                continue
            value = Fraction(c) / normalization_factor(r, ins, g)
            out.append(CorrelatorRecord(r, tuple(sorted(ins)), g, value))
    return sorted(out, key=lambda rec: rec.insertions)


# ---------------------------------------------------------------- one-point functions

def one_point_series(spec: AlgebraSpec, a, floor, cache_dir=None):
    """F_a = integral of -(M_a)_{1,r} + delta_{a,n} lambda**(-(r-1)/r), constant 0."""
    sol = cached_solve(spec, a, floor, cache_dir) if cache_dir else airy(spec, a, floor)
    ent = sol.series.entry(0, spec.r - 1)
    integrand = ScalarSeries({e: -c for e, c in ent.terms.items()}, ent.floor)
    if a == spec.n:
        integrand = integrand + ScalarSeries({Fraction(-(spec.r - 1), spec.r): Fraction(1)})
    if Fraction(-1) in integrand.terms:
        raise InvariantError("exponent -1 in the one-point integrand")
    return integrand.antiderivative()


# ---------------------------------------------------------------- N-point functions

@dataclass
class NPointSeries:
    indices: tuple
    series: MultiSeries


def _matrix_terms(sol, var, nvars, floor):
    out = {}
    for e, mat in sol.series.terms.items():
        if e < floor:
            continue
        key = [Fraction(0)] * nvars
        key[var] = e
        out[tuple(key)] = mat
    return out


def _trace_chain(chain, window, nvars):
    """Trace of a product of matrix series (each in one variable), pruned to ``window``."""
    n = len(chain)
    tops = []
    for terms in chain:
        mx = [Fraction(0)] * nvars
        for key in terms:
            for v in range(nvars):
                if key[v] > mx[v]:
                    mx[v] = key[v]
        tops.append(mx)
    remaining = [[Fraction(0)] * nvars for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        remaining[t] = [remaining[t + 1][v] + tops[t][v] for v in range(nvars)]
    acc = {tuple([Fraction(0)] * nvars): None}  # None stands for the identity
    for t, terms in enumerate(chain):
        rest = remaining[t + 1]
        new = {}
        for ka, A in acc.items():
            for kb, Bm in terms.items():
                key = tuple(x + y for x, y in zip(ka, kb))
                if any(key[v] + rest[v] < window[v] for v in range(nvars)):
                    continue
                if A is None:
                    P = dict(Bm)
                else:
                    P = {}
                    for (i, j), x in A.items():
                        for (j2, l), y in Bm.items():
                            if j2 == j:
                                P[(i, l)] = P.get((i, l), 0) + x * y
                tgt = new.setdefault(key, {})
                for ij, x in P.items():
                    tgt[ij] = tgt.get(ij, 0) + x
        acc = {k: {ij: x for ij, x in m.items() if x} for k, m in new.items()}
    terms = {}
    for key, m in acc.items():
        s = sum((x for (i, j), x in m.items() if i == j), Fraction(0))
        if s:
            terms[key] = s
    return MultiSeries(nvars, terms, tuple((w, None) for w in window))


def _adjoint_chain(chain, window, nvars, r):
    """B(M_1, ..., M_N) with B the adjoint trace form, pruned to ``window``."""
    tensor = adjoint_tensor(r, len(chain))
    scal = []
    for terms in chain:
        by_entry = {}
        for key, mat in terms.items():
            for ij, x in mat.items():
                by_entry.setdefault(ij, {})[key] = x
        scal.append(by_entry)
    win = tuple((w, None) for w in window)
    total = MultiSeries(nvars, {}, win)
    for idx, t in tensor.items():
        factors = []
        for pos, ij in enumerate(idx):
            f = scal[pos].get(ij)
            if not f:
                break
            factors.append(MultiSeries(nvars, f))
        else:
            total = total + multiply_pruned(factors, window_pairs(window), nvars).scale(t)
    return total


def window_pairs(window):
    return tuple((w, None) for w in window)


def _cyclic_orders(N):
    for rest in itertools.permutations(range(1, N)):
        yield (0,) + rest


def _m_floors(spec, indices, window):
    """Per-variable floors on M_a making every coefficient in ``window`` exact."""
    N = len(indices)
    tops = [1 - Fraction(spec.m(a), spec.h) for a in indices]
    total = sum(window) + N
    return [total - (sum(tops) - tops[l]) for l in range(N)]


def _correction(spec, indices, window, order):
    a1, a2 = indices
    eta = spec.eta(a1, a2)
    if not eta:
        return None
    h = spec.h
    e1, e2 = Fraction(-spec.m(a1), h), Fraction(-spec.m(a2), h)
    num = MultiSeries(2, {(e1 + 1, e2): eta * spec.m(a1), (e1, e2 + 1): eta * spec.m(a2)})
    den = expand_inverse_difference(0, 1, order, 2, power=2)
    return multiply_pruned([num, den], window_pairs(window), 2)


def n_point_trace(spec, indices, window, order=None, form="trace", cache_dir=None, extra_depth=0):
    """Cyclic trace generating function F_{a_1..a_N} for exponents >= ``window``.

    ``window[l]`` is the lowest lambda_l exponent wanted.  The result is exact
    on the whole window, and every exponent above -a_l/r - 1 must cancel.
    """
    N = len(indices)
    if N < 2:
        raise ValueError("n_point_trace needs at least two insertions")
    window = [Fraction(w) for w in window]
    r, h = spec.r, spec.h
    tops = [1 - Fraction(spec.m(a), h) for a in indices]
    need = sum(int(-(w - t)) + 1 for w, t in zip(window, tops))
    if order is None:
        order = need
    elif order < need:
        raise WindowError(f"expansion order {order} too small for the window (need {need})")
    floors = _m_floors(spec, indices, window)
    sols = []
    for a, f in zip(indices, floors):
        fl = min(f, Fraction(-spec.m(a), h) - 1) - extra_depth
        sols.append(cached_solve(spec, a, fl, cache_dir) if cache_dir else airy(spec, a, fl))
    win = window_pairs(window)
    total = MultiSeries(N, {}, win)
    for cyc in _cyclic_orders(N):
        chain = [_matrix_terms(sols[v], v, N, floors[v] - extra_depth) for v in cyc]
        dens = [expand_inverse_difference(cyc[j], cyc[(j + 1) % N], order, N) for j in range(N)]
        # the denominators can still raise exponents, so prune the numerator less eagerly
        lift = [sum(d.max_exponents()[v] for d in dens) for v in range(N)]
        chain_window = [w - x for w, x in zip(window, lift)]
        if form == "trace":
            num = _trace_chain(chain, chain_window, N)
            scale = Fraction(-1)
        elif form == "adjoint":
            num = _adjoint_chain(chain, chain_window, N, r)
            scale = Fraction(-1, 2 * spec.dual_h)
        else:
            raise ValueError(f"unknown form {form!r}")
        total = total + multiply_pruned([num] + dens, win, N).scale(scale)
    if N == 2:
        corr = _correction(spec, indices, window, order)
        if corr is not None:
            total = total - corr
    for key, c in total.terms.items():
        for l, e in enumerate(key):
            if e > Fraction(-spec.m(indices[l]), h) - 1:
                raise CancellationError(f"uncancelled term at exponents {key}: {c}")
    return NPointSeries(tuple(indices), total)


def n_point_adjoint(spec, indices, window, order=None):
    if len(indices) not in (2, 3) or spec.r > 3:
        raise ValueError("adjoint form is limited to N in {2, 3} and r <= 3")
    return n_point_trace(spec, indices, window, order, form="adjoint")


# ---------------------------------------------------------------- dispatch

_RESULTS = {}


def correlator(spec: AlgebraSpec, insertions, cache_dir=None, recheck=True):
    """Exact value of one r-spin correlator; ``insertions`` is a list of (a, k)."""
    r = spec.r
    ins = [(int(a), int(k)) for a, k in insertions]
    for a, k in ins:
        if not 1 <= a <= r - 1 or k < 0:
            raise ValueError(f"bad insertion {a}:{k} for r={r}")
    if not ins:
        raise ValueError("at least one insertion is required")
    ins.sort()
    key = (r, tuple(ins))
    if key in _RESULTS:
        return _RESULTS[key]
    g = genus(r, ins)
    if g.denominator != 1 or g < 0:
        rec = CorrelatorRecord(r, tuple(ins), g, Fraction(0))
        _RESULTS[key] = rec
        return rec
    c = raw_coefficient(spec, ins, cache_dir, recheck)
    value = Fraction(c) / normalization_factor(r, ins, g)
    rec = CorrelatorRecord(r, tuple(ins), g, value)
    _RESULTS[key] = rec
    return rec


def raw_coefficient(spec: AlgebraSpec, insertions, cache_dir=None, recheck=True):
    """Series coefficient behind a correlator, before normalization.

    This does not look at the genus, so it can be used to confirm that
    insertion lists outside the dimension constraint really give zero.
    """
    r = spec.r
    ins = sorted((int(a), int(k)) for a, k in insertions)
    exps = [target_exponent(r, a, k) for a, k in ins]
    if len(ins) == 1:
        a, e = ins[0][0], exps[0]
        F = one_point_series(spec, a, e - 1, cache_dir)
        c = F[e]
        if recheck:
            F2 = one_point_series(spec, a, e - 1 - spec.h, cache_dir)
            if F2[e] != c:
                raise InvariantError("one-point coefficient changed under deepening")
        return c
    indices = [a for a, _ in ins]
    F = n_point_trace(spec, indices, exps, cache_dir=cache_dir)
    c = F.series[tuple(exps)]
    if recheck:
        need = sum(int(-(w - (1 - Fraction(a, r)))) + 1 for w, a in zip(exps, indices))
        F2 = n_point_trace(spec, indices, exps, order=need + spec.h, cache_dir=cache_dir, extra_depth=spec.h)
        if F2.series[tuple(exps)] != c:
            raise InvariantError("N-point coefficient changed under deepening")
    return c


def insertion_grid(r, max_k, max_N):
    """All sorted insertion lists with N <= max_N and every k <= max_k."""
    slots = [(a, k) for a in range(1, r) for k in range(max_k + 1)]
    for N in range(1, max_N + 1):
        for combo in itertools.combinations_with_replacement(slots, N):
            yield list(combo)


def correlator_table(spec, max_k, max_N, cache_dir=None, nonzero_only=False):
    out = []
    for ins in insertion_grid(spec.r, max_k, max_N):
        rec = correlator(spec, ins, cache_dir)
        if rec.value or not nonzero_only:
            out.append(rec)
    return out


def parse_insertions(text):
    """'1:4;2:0' or '1:4,2:0' -> [(1, 4), (2, 0)]."""
    out = []
    for tok in text.replace(",", ";").split(";"):
        tok = tok.strip()
        if not tok:
            continue
        a, k = tok.split(":")
        out.append((int(a), int(k)))
    if not out:
        raise ValueError("empty insertion list")
    return out
