"""The A_n loop algebra in its defining matrix realization.

Loop elements are sparse dictionaries ``{(i, j, k): coeff}`` standing for
``sum coeff * E_ij * lambda**k`` with 0-based matrix indices.  Coefficients
can be Fractions or any commutative ring element (DiffPoly, KappaNumber...).

The principal degree of ``E_ij lambda**k`` is ``(j - i) + h*k``.  Each graded
piece ``L^d`` is finite dimensional (dimension r, or r-1 when h divides d),
which lets the equation ``[X, Lambda] = G`` be solved by a small exact linear
system per degree.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exact import fmt_rational
from .linalg import dense_inverse, mat_vec


class UnsolvableError(ArithmeticError):
    """Raised when the right side of [X, Lambda] = G has a kernel component."""

    def __init__(self, residual, degree):
        super().__init__(f"kernel component {residual} at degree {degree}")
        self.residual = residual
        self.degree = degree


class InvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class AlgebraSpec:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("rank must be at least 1 (r >= 2)")

    @classmethod
    def from_r(cls, r):
        if r < 2:
            raise ValueError("r must be at least 2")
        return cls(r - 1)

    @property
    def r(self):
        return self.n + 1

    @property
    def h(self):
        return self.n + 1

    @property
    def dual_h(self):
        return self.n + 1

    @property
    def exponents(self):
        return tuple(range(1, self.n + 1))

    def m(self, a):
        return a

    def eta(self, a, b):
        return 1 if a + b == self.n + 1 else 0

    def in_E(self, j):
        return j % self.h != 0


# ---------------------------------------------------------------- loop elements

def le_add(*elems):
    out = {}
    for x in elems:
        for key, c in x.items():
            v = out.get(key)
            v = c if v is None else v + c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def le_scale(x, s):
    out = {}
    for key, c in x.items():
        v = c * s
        if v:
            out[key] = v
    return out


def le_sub(x, y):
    return le_add(x, le_scale(y, -1))


def le_mul(x, y):
    """Matrix product of two loop elements."""
    rows = {}
    for (k, j, ky), c in y.items():
        rows.setdefault(k, []).append((j, ky, c))
    out = {}
    for (i, k, kx), a in x.items():
        for j, ky, b in rows.get(k, ()):
            key = (i, j, kx + ky)
            v = out.get(key)
            t = a * b
            v = t if v is None else v + t
            out[key] = v
    return {k: v for k, v in out.items() if v}


def le_bracket(x, y):
    return le_sub(le_mul(x, y), le_mul(y, x))


def le_degree_part(x, d, h):
    return {key: c for key, c in x.items() if (key[1] - key[0]) + h * key[2] == d}


def le_split_degrees(x, h):
    parts = {}
    for key, c in x.items():
        d = (key[1] - key[0]) + h * key[2]
        parts.setdefault(d, {})[key] = c
    return parts


def le_shift(x, k):
    """Multiply by lambda**k."""
    return {(i, j, kk + k): c for (i, j, kk), c in x.items()}


def le_map(x, fn):
    out = {}
    for key, c in x.items():
        v = fn(c)
        if v:
            out[key] = v
    return out


def le_trace_coeff(x, power):
    """Coefficient of lambda**power in tr(x)."""
    s = 0
    for (i, j, k), c in x.items():
        if i == j and k == power:
            s = s + c
    return s


def le_pairing0(x, y):
    """lambda**0 coefficient of tr(x y)."""
    s = 0
    idx = {}
    for (i, j, k), c in y.items():
        idx[(i, j, k)] = c
    for (i, j, k), c in x.items():
        d = idx.get((j, i, -k))
        if d:
            s = s + c * d
    return s


def le_from_matrix(mat, k=0):
    out = {}
    for i, row in enumerate(mat):
        for j, c in enumerate(row):
            if c:
                out[(i, j, k)] = Fraction(c) if isinstance(c, int) else c
    return out


def le_lambda_coeff(x, k, r):
    """Dense matrix of the lambda**k coefficient."""
    m = [[0] * r for _ in range(r)]
    for (i, j, kk), c in x.items():
        if kk == k:
            m[i][j] = c
    return m


# ---------------------------------------------------------------- matrices

def zeros(r):
    return [[Fraction(0)] * r for _ in range(r)]


def eye(r):
    return [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]


def unit(r, i, j):
    m = zeros(r)
    m[i][j] = Fraction(1)
    return m


def mm(a, b):
    n = len(a)
    return [[sum((a[i][k] * b[k][j] for k in range(n) if a[i][k] and b[k][j]), Fraction(0)) for j in range(n)] for i in range(n)]


def madd(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mscale(a, s):
    return [[x * s for x in row] for row in a]


def mbracket(a, b):
    return madd(mm(a, b), mscale(mm(b, a), -1))


def mtrace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def build_lambda(spec: AlgebraSpec):
    """(B, E) with Lambda(lambda) = B + lambda*E."""
    r = spec.r
    if r < 2:
        raise ValueError("r must be at least 2")
    B = zeros(r)
    for i in range(r - 1):
        B[i][i + 1] = Fraction(1)
    E = unit(r, r - 1, 0)
    return B, E


def lambda_loop(spec: AlgebraSpec):
    B, E = build_lambda(spec)
    return le_add(le_from_matrix(B, 0), le_from_matrix(E, 1))


def lambda_power(spec: AlgebraSpec, a: int, check=True):
    """Split Lambda**a into its lambda**0 part L and lambda**1 part K."""
    if not 1 <= a <= spec.n:
        raise ValueError(f"index {a} outside 1..{spec.n}")
    lam = lambda_loop(spec)
    p = lam
    for _ in range(a - 1):
        p = le_mul(p, lam)
    r = spec.r
    L = le_lambda_coeff(p, 0, r)
    K = le_lambda_coeff(p, 1, r)
    if check:
        for b in spec.exponents:
            q = lam
            for _ in range(b - 1):
                q = le_mul(q, lam)
            pr = le_mul(p, q)
            tr = {k: le_trace_coeff(pr, k) for k in (0, 1, 2)}
            want = {0: 0, 1: spec.h * spec.eta(a, b), 2: 0}
            if tr != want:
                raise InvariantError(f"normalization check failed for a={a}, b={b}: {tr}")
    return L, K


def lambda_j(spec: AlgebraSpec, j: int):
    """Kernel generator Lambda_j = Lambda**a * lambda**k for j = a + h*k in E."""
    if not spec.in_E(j):
        raise ValueError(f"{j} is not in the exponent set")
    a, k = j % spec.h, j // spec.h
    lam = lambda_loop(spec)
    p = lam
    for _ in range(a - 1):
        p = le_mul(p, lam)
    return le_shift(p, k)


@lru_cache(maxsize=None)
def _lambda_power_loop(n, a):
    spec = AlgebraSpec(n)
    lam = lambda_loop(spec)
    p = {(i, i, 0): Fraction(1) for i in range(spec.r)}
    for _ in range(a):
        p = le_mul(p, lam)
    return p


# ---------------------------------------------------------------- graded pieces

@dataclass
class GradedElement:
    degree: int
    parts: list  # list of (matrix, k)

    def to_loop(self):
        return le_add(*[le_from_matrix(m, k) for m, k in self.parts])


def _basis_keys(spec, d):
    """Coordinate labels of L^d: ('e', i, j, k) off-diagonal, ('c', i, k) Cartan."""
    r, h = spec.r, spec.h
    keys = []
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            off = j - i
            if (d - off) % h == 0:
                keys.append(("e", i, j, (d - off) // h))
    if d % h == 0:
        for i in range(r - 1):
            keys.append(("c", i, d // h))
    return keys


def graded_basis(spec: AlgebraSpec, degree: int, window=None):
    """Basis of L^degree as GradedElements, optionally restricted to a lambda-power window."""
    out = []
    r = spec.r
    for key in _basis_keys(spec, degree):
        if key[0] == "e":
            _, i, j, k = key
            m = unit(r, i, j)
        else:
            _, i, k = key
            m = zeros(r)
            m[i][i] = Fraction(1)
            m[i + 1][i + 1] = Fraction(-1)
        if window is not None and not (window[0] <= k <= window[1]):
            continue
        out.append(GradedElement(degree, [(m, k)]))
    return out


def to_coords(spec, x, d):
    """Coordinates of a homogeneous loop element of degree d."""
    keys = _basis_keys(spec, d)
    vec = []
    r = spec.r
    for key in keys:
        if key[0] == "e":
            vec.append(x.get((key[1], key[2], key[3]), 0))
        else:
            _, i, k = key
            s = 0
            for p in range(i + 1):
                c = x.get((p, p, k))
                if c:
                    s = s + c
            vec.append(s)
    if d % spec.h == 0:
        k = d // spec.h
        tot = 0
        for p in range(r):
            c = x.get((p, p, k))
            if c:
                tot = tot + c
        if tot:
            raise InvariantError(f"diagonal part at degree {d} is not traceless")
    return vec


def from_coords(spec, vec, d):
    keys = _basis_keys(spec, d)
    out = {}
    for key, c in zip(keys, vec):
        if not c:
            continue
        if key[0] == "e":
            out[(key[1], key[2], key[3])] = c
        else:
            _, i, k = key
            for p, s in ((i, 1), (i + 1, -1)):
                v = out.get((p, p, k))
                t = c if s == 1 else -c
                v = t if v is None else v + t
                if v:
                    out[(p, p, k)] = v
                else:
                    out.pop((p, p, k), None)
    return out


class GradedSolver:
    """Solves [X, Lambda] + c*Lambda_d = G for X in L^(d-1) with zero kernel part.

    The inverse of the square system is cached per residue of d mod h; other
    degrees are handled by a lambda shift.
    """

    def __init__(self, spec: AlgebraSpec):
        self.spec = spec
        self._inv = {}

    def _system(self, s):
        spec = self.spec
        d = s  # representative degree in 0..h-1 of the right-hand side
        xkeys = _basis_keys(spec, d - 1)
        lam = lambda_loop(spec)
        cols = []
        for idx in range(len(xkeys)):
            vec = [Fraction(0)] * len(xkeys)
            vec[idx] = Fraction(1)
            X = from_coords(spec, vec, d - 1)
            col = to_coords(spec, le_bracket(X, lam), d)
            if spec.in_E(d - 1):
                col.append(le_pairing0(X, lambda_j(spec, -(d - 1))))
            cols.append(col)
        if spec.in_E(d):
            col = to_coords(spec, lambda_j(spec, d), d)
            if spec.in_E(d - 1):
                col.append(Fraction(0))
            cols.append(col)
        n = len(cols)
        if any(len(c) != n for c in cols):
            raise InvariantError("graded system is not square")
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        return dense_inverse(mat), len(xkeys)

    def solve(self, G, d):
        """Return (X, c) with [X, Lambda] + c*Lambda_d = G, X in L^(d-1).

        ``G`` is a homogeneous loop element of degree d.  ``c`` is 0 when d is
        not in E.
        """
        spec = self.spec
        h = spec.h
        s = d % h
        shift = (d - s) // h
        if s not in self._inv:
            self._inv[s] = self._system(s)
        inv, nx = self._inv[s]
        g = to_coords(spec, le_shift(G, -shift), s)
        if spec.in_E(s - 1):
            g.append(0)
        sol = mat_vec(inv, g)
        X = le_shift(from_coords(spec, sol[:nx], s - 1), shift)
        c = sol[nx] if spec.in_E(s) else 0
        return X, c


_SOLVERS = {}


def graded_solver(spec):
    sv = _SOLVERS.get(spec.n)
    if sv is None:
        sv = _SOLVERS[spec.n] = GradedSolver(spec)
    return sv


def ad_lambda_solve(spec: AlgebraSpec, G, degree: int):
    """Solve [X, Lambda] = G for homogeneous G of the given degree.

    Returns ``(X, kernel_slot)`` where X has zero kernel component and
    ``kernel_slot`` is the free direction Lambda_(degree-1) (or None).  Raises
    UnsolvableError carrying the kernel component of G when it is nonzero.
    """
    X, c = graded_solver(spec).solve(G, degree)
    if c:
        raise UnsolvableError(le_scale(lambda_j(spec, degree), c), degree)
    slot = lambda_j(spec, degree - 1) if spec.in_E(degree - 1) else None
    return X, slot


def kernel_dimension(spec, d):
    """Dimension of ker ad_Lambda on L^d, computed by brute force."""
    keys = _basis_keys(spec, d)
    lam = lambda_loop(spec)
    rows = []
    for idx in range(len(keys)):
        vec = [Fraction(0)] * len(keys)
        vec[idx] = Fraction(1)
        rows.append(to_coords(spec, le_bracket(from_coords(spec, vec, d), lam), d + 1))
    return len(keys) - _rank(rows)


def _rank(rows):
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncol = len(rows[0]) if rows else 0
    for col in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                f = rows[i][col] / rows[rank][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------- lowest weight gauge

@dataclass
class GaugeData:
    rho: list
    I_plus: list
    I_minus: list
    E_theta: list
    E_minus_theta: list
    gamma: list
    L: list
    K: list

    def to_json(self):
        def enc(m):
            return [[fmt_rational(x) for x in row] for row in m]

        return json.dumps(
            {
                "rho_vee": enc(self.rho),
                "I_plus": enc(self.I_plus),
                "I_minus": enc(self.I_minus),
                "E_theta": enc(self.E_theta),
                "E_minus_theta": enc(self.E_minus_theta),
                "gamma": [enc(g) for g in self.gamma],
                "L": [enc(m) for m in self.L],
                "K": [enc(m) for m in self.K],
            },
            indent=1,
        )


def lowest_weight_gauge(spec: AlgebraSpec) -> GaugeData:
    r = spec.r
    rho = zeros(r)
    for i in range(r):
        rho[i][i] = Fraction(r - 1 - 2 * i, 2)
    B, E = build_lambda(spec)
    Im = zeros(r)
    for i in range(1, r):
        Im[i][i - 1] = Fraction(i * (r - i))
    Ls, Ks = [], []
    for a in spec.exponents:
        L, K = lambda_power(spec, a)
        Ls.append(L)
        Ks.append(K)
    gammas = []
    p = eye(r)
    for a in spec.exponents:
        p = mm(p, Im)
        norm = mtrace(mm(p, Ls[a - 1]))
        gammas.append(mscale(p, 1 / norm))
    gd = GaugeData(rho, B, Im, unit(r, 0, r - 1), unit(r, r - 1, 0), gammas, Ls, Ks)
    check_gauge_data(spec, gd)
    return gd


def check_gauge_data(spec, gd: GaugeData):
    def same(a, b, what):
        if a != b:
            raise InvariantError(what)

    same(mbracket(gd.rho, gd.I_plus), gd.I_plus, "[rho, I+] != I+")
    same(mbracket(gd.rho, gd.I_minus), mscale(gd.I_minus, -1), "[rho, I-] != -I-")
    same(mbracket(gd.I_plus, gd.I_minus), mscale(gd.rho, 2), "[I+, I-] != 2 rho")
    for a in spec.exponents:
        g = gd.gamma[a - 1]
        if not is_zero_matrix(mbracket(gd.I_minus, g)):
            raise InvariantError(f"[I-, gamma^{a}] != 0")
        same(mbracket(gd.rho, g), mscale(g, -a), f"gamma^{a} has wrong degree")
        if not is_zero_matrix(mbracket(gd.I_plus, gd.L[a - 1])):
            raise InvariantError(f"[I+, L_{a}] != 0")
        for b in spec.exponents:
            if mtrace(mm(g, gd.L[b - 1])) != int(a == b):
                raise InvariantError("gamma/L orthonormality fails")
            if mtrace(mm(gd.L[a - 1], gd.K[b - 1])) != spec.eta(a, b) * b:
                raise InvariantError("(L_a | K_b) != eta_ab m_b")
    same(gd.gamma[-1], gd.E_minus_theta, "gamma^n != E_{-theta}")


# ---------------------------------------------------------------- adjoint form

def ad_matrix(x):
    """Matrix of ad_x on gl_r in the basis E_ij (row-major index i*r + j).

    The identity spans the centre, so traces of ad products over gl_r and
    over sl_r coincide.
    """
    r = len(x)
    n = r * r
    A = [[Fraction(0)] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            col = i * r + j
            # x E_ij = sum_p x[p][i] E_pj ; E_ij x = sum_q x[j][q] E_iq
            for p in range(r):
                if x[p][i]:
                    A[p * r + j][col] += x[p][i]
            for q in range(r):
                if x[j][q]:
                    A[i * r + q][col] -= x[j][q]
    return A


def adjoint_form(*xs):
    """tr(ad_x1 ... ad_xN) for traceless r x r matrices."""
    if len(xs) < 2:
        raise ValueError("need at least two arguments")
    for x in xs:
        if mtrace(x):
            raise ValueError("adjoint_form expects traceless matrices")
    P = ad_matrix(xs[0])
    for x in xs[1:]:
        P = mm(P, ad_matrix(x))
    return mtrace(P)


@lru_cache(maxsize=None)
def adjoint_tensor(r, N):
    """Nonzero values B(E_{i1 j1}, ..., E_{iN jN}) as a dict keyed by index pairs.

    Traceless projection is not needed: the identity is central, so ad of a
    diagonal shift is unchanged and the form is well defined on gl_r.
    """
    ads = {(i, j): ad_matrix(unit(r, i, j)) for i in range(r) for j in range(r)}
    out = {}

    def rec(prefix, mat):
        if len(prefix) == N:
            t = mtrace(mat)
            if t:
                out[tuple(prefix)] = t
            return
        for key, A in ads.items():
            rec(prefix + [key], mm(mat, A) if mat is not None else A)

    rec([], None)
    return out
