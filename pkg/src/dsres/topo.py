"""Regular solutions of the topological ODE  M' = [M, Lambda].

``solve_regular`` runs the graded recursion on W = lambda**(m/h) M, one
principal degree at a time.  ``oracle_solve`` sets up the whole coefficient
recurrence as one sparse linear system and solves it by brute force; the two
must agree exactly.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from math import floor as _ifloor

from .exact import PuiseuxMatrix, ScalarSeries, fmt_rational, pairing, parse_rational, series_mul
from .lie import (
    AlgebraSpec,
    InvariantError,
    build_lambda,
    graded_solver,
    lambda_j,
    lambda_power,
    le_add,
    le_scale,
)
from .linalg import SingularMatrix, sparse_rref

KAPPA_ONE = "kappa1"
KAPPA = "kappa"


class ZeroPivotError(InvariantError):
    pass


@dataclass
class AirySolution:
    spec: AlgebraSpec
    index: int
    series: PuiseuxMatrix
    normalization: str = KAPPA_ONE
    kappa: object = None  # value of kappa when normalization == KAPPA

    @property
    def floor(self):
        return self.series.floor

    def truncate(self, floor):
        return AirySolution(self.spec, self.index, self.series.truncate(floor), self.normalization, self.kappa)


def lambda_series(spec: AlgebraSpec) -> PuiseuxMatrix:
    B, E = build_lambda(spec)
    return PuiseuxMatrix.from_dense(spec.r, {0: B, 1: E})


def _d_lambda(W, mh):
    """(d/dlambda - mh/lambda) applied to a loop element."""
    out = {}
    for (i, j, k), c in W.items():
        f = k - mh
        if f:
            out[(i, j, k - 1)] = c * f
    return out


def _check_floor(spec, a, floor):
    floor = Fraction(floor)
    if not floor < Fraction(-spec.m(a), spec.h):
        raise ValueError(f"floor must be below -m_a/h = {fmt_rational(Fraction(-a, spec.h))}")
    return floor


def solve_regular(spec: AlgebraSpec, a: int, floor) -> AirySolution:
    floor = _check_floor(spec, a, floor)
    h, m = spec.h, spec.m(a)
    mh = Fraction(m, h)
    sv = graded_solver(spec)
    # depth d contributes exponents (-d - (q-p))/h >= (-d - h + 1)/h
    D = h - 1 - _ifloor(h * floor)
    guard = h + 1
    L, K = lambda_power(spec, a)
    W = {0: le_add(lambda_j(spec, m))}
    X = {0: W[0]}  # image parts (without pending kernel terms)
    total = D + guard
    for d in range(1, total + 1):
        src = d - h - 1
        deg = m - d
        if src >= 0:
            G = _d_lambda(W[src] if src in W else {}, mh)
            Y, c = sv.solve(G, deg + 1)
            if spec.in_E(m - src) and src > 0:
                # W_src carries a pending multiple p of Lambda_(m-src); it is
                # fixed by requiring the kernel part at this depth to vanish
                lj = lambda_j(spec, m - src)
                Yl, cl = sv.solve(_d_lambda(lj, mh), deg + 1)
                if not cl:
                    raise ZeroPivotError(f"zero pivot at depth {src}")
                p = -c / cl
                W[src] = le_add(W[src], le_scale(lj, p))
                Y = le_add(Y, le_scale(Yl, p))
            elif c:
                raise InvariantError(f"unsolvable at depth {d} with no pending unknown")
            X[d] = Y
        else:
            X[d] = {}
        W[d] = X[d]
        # the pending at depth d is fixed once depth d + h + 1 is processed
    # pendings still open (d > total - h - 1) are not trusted: drop them
    terms = {}
    for d in range(0, total + 1):
        trusted = d + h + 1 <= total or d == 0 or not spec.in_E(m - d)
        for (i, j, k), c in W[d].items():
            e = Fraction(k) - mh
            if e < floor:
                continue
            if not trusted:
                raise InvariantError("pending kernel term left open above the floor")
            terms.setdefault(e, {})[(i, j)] = terms.get(e, {}).get((i, j), 0) + c
    series = PuiseuxMatrix(spec.r, terms, floor)
    sol = AirySolution(spec, a, series)
    _check_boundary(sol, L, K)
    return sol


def _check_boundary(sol, L, K):
    """Top-degree part must be exactly lambda**(-m/h) Lambda**m.

    Only the principal-degree-m entries are pinned.  Lower-degree entries may
    share the exponents -m/h and (h-m)/h (for A_3, a=3 the coefficient at
    lambda**(-3/4) carries +-1/8 on the entries of degree -1).
    """
    spec, a = sol.spec, sol.index
    h, m = spec.h, spec.m(a)
    s = sol.series
    mh = Fraction(m, h)
    want = {}
    for i, row in enumerate(L):
        for j, c in enumerate(row):
            if c:
                want[(i, j, Fraction(0))] = c
    for i, row in enumerate(K):
        for j, c in enumerate(row):
            if c:
                want[(i, j, Fraction(1))] = c
    got = {}
    for e, mat in s.terms.items():
        k = e + mh
        for (i, j), c in mat.items():
            dg = (j - i) + h * k
            if dg > m:
                raise InvariantError("entry of principal degree above m_a")
            if dg == m:
                got[(i, j, k)] = c
    if got != want:
        raise InvariantError("boundary terms do not match Lambda**m_a")
    top = s.max_exponent()
    if top is not None and top > Fraction(h - m, h):
        raise InvariantError("exponent above (h - m_a)/h")
    if not s.is_traceless():
        raise InvariantError("non-traceless coefficient")


def oracle_solve(spec: AlgebraSpec, a: int, floor) -> AirySolution:
    """Brute-force solve of the full coefficient recurrence."""
    floor = _check_floor(spec, a, floor)
    h, m, r = spec.h, spec.m(a), spec.r
    mh = Fraction(m, h)
    B, E = build_lambda(spec)
    L, K = lambda_power(spec, a)
    kmax = _ifloor(-floor - mh) + h + 1
    # unknown ('A', k, i, j) is the (i, j) entry of A_k, k = -1..kmax
    fixed = {}
    for k in (-1, 0):
        for i in range(r):
            for j in range(r):
                dg = (j - i) - h * k
                if dg > m:
                    fixed[(k, i, j)] = Fraction(0)
                elif dg == m:
                    fixed[(k, i, j)] = (K if k == -1 else L)[i][j]
    for k in range(1, kmax + 1):
        for i in range(r):
            for j in range(r):
                if (j - i) - h * k >= m:
                    fixed[(k, i, j)] = Fraction(0)

    def var(k, i, j):
        return (k, i, j)

    eqs = []
    for key, val in fixed.items():
        eqs.append({key: 1, "rhs": val})
    # (-mh - k) A_k - [A_{k+1}, B] - [A_{k+2}, E] = 0 for k = -3 .. kmax-2
    for k in range(-3, kmax - 1):
        for i in range(r):
            for j in range(r):
                row = {}

                def add(key, c):
                    if key[0] < -1 or key[0] > kmax:
                        return
                    row[key] = row.get(key, 0) + c

                if k >= -1:
                    add(var(k, i, j), -mh - k)
                # [A, B]_{ij} = sum_l A_il B_lj - B_il A_lj
                for l in range(r):
                    if B[l][j]:
                        add(var(k + 1, i, l), -B[l][j])
                    if B[i][l]:
                        add(var(k + 1, l, j), B[i][l])
                    if E[l][j]:
                        add(var(k + 2, i, l), -E[l][j])
                    if E[i][l]:
                        add(var(k + 2, l, j), E[i][l])
                row = {kk: v for kk, v in row.items() if v}
                if row:
                    row["rhs"] = 0
                    eqs.append(row)
    try:
        piv = sparse_rref(eqs)
    except SingularMatrix as exc:
        raise InvariantError(f"oracle system inconsistent: {exc}") from exc
    terms = {}
    for k in range(-1, kmax + 1):
        e = -mh - k
        if e < floor:
            continue
        for i in range(r):
            for j in range(r):
                key = (k, i, j)
                row = piv.get(key)
                if row is None:
                    raise InvariantError(f"oracle leaves entry {key} free")
                if any(v for kk, v in row.items() if kk not in ("rhs", key)):
                    raise InvariantError(f"oracle entry {key} depends on free unknowns")
                val = row.get("rhs", 0)
                if val:
                    terms.setdefault(e, {})[(i, j)] = val
    sol = AirySolution(spec, a, PuiseuxMatrix(r, terms, floor))
    _check_boundary(sol, L, K)
    return sol


def ode_residual(sol: AirySolution) -> PuiseuxMatrix:
    """M' - c [M, Lambda], exact down to its floor."""
    M = sol.series
    lam = lambda_series(sol.spec)
    if sol.normalization == KAPPA:
        c = sol.kappa
    else:
        c = 1
    comm = series_mul(M, lam) - series_mul(lam, M)
    if c != 1:
        comm = comm.scale(c)
    res = M.derivative() - comm
    return res


def pairing_check(Ma: AirySolution, Mb: AirySolution) -> ScalarSeries:
    if Ma.spec != Mb.spec or Ma.normalization != Mb.normalization:
        raise ValueError("solutions from different algebras or normalizations")
    spec = Ma.spec
    p = pairing(Ma.series, Mb.series)
    e = Fraction(spec.h - spec.m(Ma.index) - spec.m(Mb.index), spec.h)
    target = ScalarSeries({e: spec.h * spec.eta(Ma.index, Mb.index)})
    return p - target


# ---------------------------------------------------------------- cache

def _cache_name(spec, a, normalization):
    return f"airy_A{spec.n}_a{a}_{normalization}.json"


def to_json(sol: AirySolution) -> dict:
    coeffs = []
    for e in sol.series.exponents():
        mat = sol.series.coefficient(e)
        coeffs.append({"exponent": fmt_rational(e), "matrix": [[fmt_rational(x) for x in row] for row in mat]})
    return {
        "version": 1,
        "type": "A",
        "rank": sol.spec.n,
        "index": sol.index,
        "normalization": sol.normalization,
        "floor": fmt_rational(sol.floor),
        "coefficients": coeffs,
    }


def from_json(data: dict) -> AirySolution:
    if data.get("version") != 1 or data.get("type") != "A":
        raise ValueError("unsupported cache format")
    spec = AlgebraSpec(int(data["rank"]))
    terms = {}
    for entry in data["coefficients"]:
        e = parse_rational(entry["exponent"])
        terms[e] = [[parse_rational(x) for x in row] for row in entry["matrix"]]
    series = PuiseuxMatrix.from_dense(spec.r, terms, parse_rational(data["floor"]))
    return AirySolution(spec, int(data["index"]), series, data["normalization"])


def atomic_write_json(path, data):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=1, sort_keys=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def verify_solution(sol: AirySolution):
    """Raise unless the ODE residual vanishes and the boundary terms are right."""
    res = ode_residual(sol)
    if not res.is_zero():
        raise InvariantError(f"ODE residual nonzero at exponents {res.exponents()[:3]}")
    L, K = lambda_power(sol.spec, sol.index)
    _check_boundary(sol, L, K)


def cached_solve(spec: AlgebraSpec, a: int, floor, cache_dir=None, stats=None):
    """solve_regular with an optional on-disk cache.

    A cached entry at or below the requested floor is re-verified and then
    truncated; otherwise the solution is recomputed and the cache updated.
    """
    floor = _check_floor(spec, a, floor)
    if cache_dir:
        path = os.path.join(cache_dir, _cache_name(spec, a, KAPPA_ONE))
        if os.path.exists(path):
            with open(path) as fh:
                sol = from_json(json.load(fh))
            if sol.floor <= floor:
                verify_solution(sol)
                if stats is not None:
                    stats["hit"] = stats.get("hit", 0) + 1
                return sol.truncate(floor)
    sol = _memo_solve(spec, a, floor)
    if stats is not None:
        stats["miss"] = stats.get("miss", 0) + 1
    if cache_dir:
        atomic_write_json(path, to_json(sol))
    return sol


_MEMO = {}


def _memo_solve(spec, a, floor):
    key = (spec.n, a)
    hit = _MEMO.get(key)
    if hit is not None and hit.floor <= floor:
        return hit.truncate(floor)
    sol = solve_regular(spec, a, floor)
    _MEMO[key] = sol
    return sol


def airy(spec, a, floor):
    """In-process memoized regular solution truncated at ``floor``."""
    return _memo_solve(spec, a, _check_floor(spec, a, floor))
