"""Geometry of cones cut out by quadrics: automorphisms, tangents, secants, lines,
and the prolongation subspaces killed by a projection centre."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from prolab import algebras
from prolab.linalg import (
    ONE,
    ZERO,
    DEFAULT_PRIME,
    ExactMatrix,
    Subspace,
    Vector,
    annihilator_rows,
    dot,
    kernel,
    kernel_vectors,
    rank_mod_p,
    solve,
    span,
    subspace_sum,
    vec,
)
from prolab.prolong import ProlongationResult, prolong
from prolab.symtensor import SymMultiMap, multiindices, rank_of, sym_dim
from prolab.zoo import NO_LINES, QuadraticIdeal, VarietyPresentation, build, sample_points


MACAULAY_PRIMES = (DEFAULT_PRIME, 4611686018427388039)


class ProbeError(ValueError):
    pass


# --------------------------------------------------------------------------
# automorphisms of the cone


def cone_aut(I2: QuadraticIdeal) -> Subspace:
    """{X in End(V) : X.q in span(I2) for all q in I2}, with (X.q)(v) = 2 B_q(Xv, v).

    In matrix terms X.q has Gram matrix QX + X^T Q.
    """
    n = I2.n
    if I2.dim == 0:
        return algebras.gl(n)
    ann = [r for r in annihilator_rows(I2.space) if r]
    pairs = multiindices(n, 2)
    rows = []
    for f in I2.forms:
        Q = f.matrix
        Qnz = [[(o, x) for o, x in enumerate(row) if x] for row in Q]
        for r in ann:
            acc: dict[int, Fraction] = {}
            for c, coef in r.items():
                a, b = pairs[c]
                for o, x in Qnz[a]:
                    acc[o * n + b] = acc.get(o * n + b, ZERO) + coef * x
                for o, x in Qnz[b]:
                    acc[o * n + a] = acc.get(o * n + a, ZERO) + coef * x
            acc = {k: v for k, v in acc.items() if v}
            if acc:
                rows.append(acc)
    if not rows:
        return algebras.gl(n)
    return kernel(ExactMatrix(len(rows), n * n, rows))


@lru_cache(maxsize=None)
def aut_of(V: VarietyPresentation) -> Subspace:
    return cone_aut(V.quadrics)


@lru_cache(maxsize=None)
def prolongation_of(V: VarietyPresentation, k: int = 1) -> ProlongationResult:
    return prolong(aut_of(V), k)


# --------------------------------------------------------------------------
# tangent spaces and secants


def tangent_space(I2: QuadraticIdeal, alpha: Sequence) -> Subspace:
    """{v : B_q(alpha, v) = 0 for all q in I2}."""
    alpha = vec(alpha)
    if len(alpha) != I2.n:
        raise ProbeError(f"point of length {len(alpha)} in ambient dimension {I2.n}")
    forms = I2.forms
    if any(f.value(alpha) for f in forms):
        raise ProbeError("point is not on the cone")
    rows = [{j: x for j, x in enumerate(f.gradient(alpha)) if x} for f in forms]
    rows = [r for r in rows if r]
    if not rows:
        return Subspace.full(I2.n)
    return kernel(ExactMatrix(len(rows), I2.n, rows))


@dataclass(frozen=True)
class SecantResult:
    dim: int
    trials: tuple[int, ...]

    @property
    def agreeing(self) -> int:
        return self.trials.count(self.dim)


def terracini(V: VarietyPresentation, trials: int = 2, seed: int = 0) -> SecantResult:
    """dim(T_a + T_b) - 1 for independent sampled pairs; the max over trials."""
    if trials < 1:
        raise ProbeError("need at least one trial")
    out = []
    for t in range(trials):
        a = V.sample(f"terracini|{seed}", 2 * t)
        b = V.sample(f"terracini|{seed}", 2 * t + 1)
        T = subspace_sum(tangent_space(V.quadrics, a), tangent_space(V.quadrics, b))
        out.append(T.dim - 1)
    return SecantResult(max(out), tuple(out))


def terracini_secant_dim(V: VarietyPresentation, trials: int = 2, seed: int = 0) -> int:
    return terracini(V, trials, seed).dim


# --------------------------------------------------------------------------
# lines through a point


def _macaulay_matrix(forms: list[dict[tuple[int, int], Fraction]], r: int, D: int) -> ExactMatrix:
    """Spanning rows of the degree-D part of the ideal generated by quadrics in r variables."""
    rows = []
    for m in multiindices(r, D - 2):
        for f in forms:
            row: dict[int, Fraction] = {}
            for (i, j), c in f.items():
                col = rank_of(m + (i, j), r)
                row[col] = row.get(col, ZERO) + c
            row = {k: v for k, v in row.items() if v}
            if row:
                rows.append(row)
    return ExactMatrix(len(rows), sym_dim(r, D), rows)


def _zero_locus_empty(forms: list[dict[tuple[int, int], Fraction]], r: int) -> bool:
    """True iff the quadrics have no common nonzero root (over an algebraic closure).

    If they have none, the ideal is primary to the irrelevant ideal and holds a
    regular sequence of r quadrics, so degree r + 1 is already full; if they
    have one, every degree stays short by at least one.
    """
    if not forms:
        return False
    M = _macaulay_matrix(forms, r, r + 1)
    # full rank mod any prime proves full rank over Q; two deficient primes
    # are taken as deficiency (a wrong call needs both primes to divide a
    # fixed nonzero minor)
    return any(rank_mod_p(M, p) == M.ncols for p in MACAULAY_PRIMES)


def vmrt_dimension(V: VarietyPresentation, alpha: Sequence | None = None, trials: int = 2,
                   seed: int = 0):
    """Dimension of the lines through alpha in P(V), as a subvariety of P(T_alpha / alpha).

    Lines through alpha are the directions v in T_alpha with q(v) = 0 for all
    q. Their dimension e is read off from linear sections: a random
    r-dimensional U in T_alpha meets the cone of directions outside 0 iff
    r >= dim(T_alpha / alpha) - e. Returns ``NO_LINES`` when no line exists.
    """
    if alpha is None:
        alpha = V.sample(f"vmrt|{seed}", 0)
    T = tangent_space(V.quadrics, alpha)
    d = T.dim - 1
    forms = V.quadrics.forms
    best = None
    for trial in range(trials):
        rng = random.Random(f"vmrt-sections|{seed}|{trial}")
        e = NO_LINES
        for r in range(1, d + 1):
            U = [T.combination([Fraction(rng.randint(-5, 5)) for _ in range(T.dim)]) for _ in range(r)]
            restricted = []
            for f in forms:
                g = f.restrict(U).matrix
                poly = {(i, j): (g[i][j] if i == j else 2 * g[i][j]) for i, j in multiindices(r, 2)}
                poly = {k: v for k, v in poly.items() if v}
                if poly:
                    restricted.append(poly)
            if not restricted or not _zero_locus_empty(restricted, r):
                e = d - r
                break
        # an unlucky section can only overestimate
        best = e if best is None else min(best, e)
    return best


# --------------------------------------------------------------------------
# subspaces killed in the prolongation


def _coeff_vectors(g1: ProlongationResult) -> list[Vector]:
    return [A.coeffs for A in g1.basis]


def kill_prolongation(g1: ProlongationResult, L: Subspace) -> Subspace:
    """{A in g1 : A(l, -) = 0 for all l in L}, in coefficient coordinates."""
    if not g1.exact:
        raise ProbeError("kill_prolongation needs an exact prolongation basis")
    if g1.k != 1:
        raise ProbeError("kill_prolongation acts on the first prolongation")
    size = g1.subspace.ambient_dim if g1.subspace is not None else None
    if not g1.basis:
        return Subspace.zero(size or 0)
    n = g1.basis[0].n
    size = sym_dim(n, 2) * n
    if L.ambient_dim != n:
        raise ProbeError(f"L lives in dimension {L.ambient_dim}, the variety in {n}")
    if L.dim == 0:
        return span(_coeff_vectors(g1), size)
    d = len(g1.basis)
    rows: list[dict[int, Fraction]] = []
    for l in L.rows:
        contracted = [A.contract(l) for A in g1.basis]  # degree-1 maps
        for j in range(n):
            for o in range(n):
                r = {a: c.coeffs[j * n + o] for a, c in enumerate(contracted) if c.coeffs[j * n + o]}
                if r:
                    rows.append(r)
    if not rows:
        return span(_coeff_vectors(g1), size)
    K = kernel_vectors(ExactMatrix(len(rows), d, rows))
    vecs = []
    for v in K:
        out = [ZERO] * size
        for a, c in v.items():
            for idx, x in enumerate(g1.basis[a].coeffs):
                if x:
                    out[idx] += c * x
        vecs.append(out)
    return span(vecs, size) if vecs else Subspace.zero(size)


def _coeff_kernel(g: Subspace, n: int, rows_of) -> Subspace:
    els = algebras.elements(g)
    rows: list[dict[int, Fraction]] = []
    cols = [rows_of(X) for X in els]
    m = len(cols[0]) if cols else 0
    for i in range(m):
        r = {a: col[i] for a, col in enumerate(cols) if col[i]}
        if r:
            rows.append(r)
    if not els:
        return Subspace.zero(n * n)
    K = kernel_vectors(ExactMatrix(len(rows), len(els), rows)) if rows else [{a: ONE} for a in range(len(els))]
    vecs = [g.combination([v.get(a, ZERO) for a in range(len(els))]) for v in K]
    return span(vecs, n * n) if vecs else Subspace.zero(n * n)


def stabilizer(g: Subspace, L: Subspace) -> Subspace:
    """{X in g : X(L) in L}."""
    n = algebras.endo_dim(g)
    if L.dim == 0 or L.dim == n:
        return g
    ann = [r for r in annihilator_rows(L) if r]

    def rows_of(X):
        out = []
        for l in L.rows:
            Xl = X.apply(l)
            out.extend(sum((c * Xl[j] for j, c in r.items()), ZERO) for r in ann)
        return out

    return _coeff_kernel(g, n, rows_of)


def killer(g: Subspace, L: Subspace) -> Subspace:
    """{X in g : X(L) = 0}."""
    n = algebras.endo_dim(g)
    if L.dim == 0:
        return g

    def rows_of(X):
        return [x for l in L.rows for x in X.apply(l)]

    return _coeff_kernel(g, n, rows_of)


# --------------------------------------------------------------------------
# the covector attached to a prolongation element


@dataclass(frozen=True)
class LambdaReport:
    covector: Vector
    parallel: bool
    pairs: int
    residual_nonzero: int

    @property
    def ok(self) -> bool:
        return self.parallel and self.residual_nonzero == 0


def _ratio(u: Sequence[Fraction], v: Sequence[Fraction]):
    """c with u = c v, or None."""
    piv = next((i for i, x in enumerate(v) if x), None)
    if piv is None:
        return ZERO if not any(u) else None
    c = u[piv] / v[piv]
    return c if all(a == c * b for a, b in zip(u, v)) else None


def lambda_of(A: SymMultiMap, V: VarietyPresentation, samples: int | None = None, pairs: int = 20,
              seed: int = 0) -> LambdaReport:
    """Solve A(a, a) = lam(a) a over sampled points a, then test
    lam(a) a' + lam(a') a = 2 A(a, a') for a' in the tangent space at a."""
    n = V.ambient_dim
    count = samples if samples is not None else n + 10
    pts = sample_points(V, count, f"lambda|{seed}")
    ratios = []
    for a in pts:
        c = _ratio(A.evaluate(a, a), a)
        if c is None:
            return LambdaReport((), False, 0, 0)
        ratios.append(c)
    lam = solve(ExactMatrix.from_dense(pts), ratios)
    if lam is None or any(dot(lam, a) != c for a, c in zip(pts, ratios)):
        return LambdaReport((), False, 0, 0)
    rng = random.Random(f"lambda-pairs|{seed}")
    bad = 0
    for i in range(pairs):
        a = pts[i % len(pts)]
        T = tangent_space(V.quadrics, a)
        a2 = T.combination([Fraction(rng.randint(-5, 5)) for _ in range(T.dim)])
        lhs = [dot(lam, a) * x + dot(lam, a2) * y for x, y in zip(a2, a)]
        rhs = A.evaluate(a, a2)
        bad += sum(1 for x, y in zip(lhs, rhs) if x != 2 * y)
    return LambdaReport(tuple(lam), True, pairs, bad)


def trace_radical(g: Subspace) -> Subspace:
    """{X in g : tr(XY) = 0 for all Y in g}."""
    n = algebras.endo_dim(g)
    els = algebras.elements(g)

    def trace(X, Y):
        return sum((x * Y[j, o] for o, row in enumerate(X.rows()) for j, x in row.items()), ZERO)

    return _coeff_kernel(g, n, lambda X: [trace(X, Y) for Y in els])


def image_of(g: Subspace) -> Subspace:
    """Span of X v over X in g and v in V."""
    n = algebras.endo_dim(g)
    cols = []
    for X in algebras.elements(g):
        T = X.transpose()
        cols.extend(tuple(T[j, i] for i in range(n)) for j in range(n))
    return span(cols, n)


# --------------------------------------------------------------------------
# projection formulas


def _matrix_of(coords: Sequence[Fraction], a: int, b: int) -> list[list[Fraction]]:
    return [[coords[i * b + j] for j in range(b)] for i in range(a)]


def _skew_of(coords, m):
    import itertools

    S = [[ZERO] * m for _ in range(m)]
    for c, (i, j) in zip(coords, itertools.combinations(range(m), 2)):
        S[i][j], S[j][i] = c, -c
    return S


def _sym_of(coords, w):
    S = [[ZERO] * w for _ in range(w)]
    for c, (i, j) in zip(coords, multiindices(w, 2)):
        S[i][j] = S[j][i] = c
    return S


def _symp_blocks(coords, k, m):
    X = [[coords[i * m + j] for j in range(m)] for i in range(k)]
    Y = _sym_of(coords[k * m:], k)
    return X, Y


def _colspan(mats: Sequence[Sequence[Sequence[Fraction]]], dim: int) -> Subspace:
    cols = [tuple(M[i][j] for i in range(dim)) for M in mats for j in range(len(M[0]))]
    return span(cols, dim) if cols else Subspace.zero(dim)


def _kerspan(mats, dim) -> Subspace:
    rows = [{j: x for j, x in enumerate(r) if x} for M in mats for r in M]
    rows = [r for r in rows if r]
    if not rows:
        return Subspace.full(dim)
    return kernel(ExactMatrix(len(rows), dim, rows))


def _matmul(A, B):
    return [[sum((A[i][t] * B[t][j] for t in range(len(B))), ZERO) for j in range(len(B[0]))] for i in range(len(A))]


def _is_zero(M) -> bool:
    return not any(x for r in M for x in r)


@dataclass(frozen=True)
class ProjectionReport:
    kind: str
    params: tuple[int, ...]
    dim_L: int
    engine_dim: int
    formula_dim: int
    image_dim: int
    kernel_dim: int | None
    containment: bool

    @property
    def match(self) -> bool:
        return self.engine_dim == self.formula_dim and self.containment


PROJECTION_VARIETY = {
    "I": lambda a, b: f"segre({a},{b})",
    "II": lambda m: f"plucker_gr2({m})",
    "III": lambda w: f"veronese({w - 1})",
    "Symp": lambda k, m: f"symp_vmrt({k},{m})",
}


def projection_variety(kind: str, params: Sequence[int]) -> VarietyPresentation:
    try:
        return build(PROJECTION_VARIETY[kind](*params))
    except KeyError:
        raise ProbeError(f"unknown projection type {kind!r}") from None


def _rand(rng, lo=-3, hi=3):
    return Fraction(rng.randint(lo, hi))


def _formula(kind: str, params, L: Subspace, rng: random.Random):
    """(formula dim, dim Im, dim Ker or None, containment check)."""
    els = L.rows
    if kind == "I":
        a, b = params
        mats = [_matrix_of(x, a, b) for x in els]
        im = _colspan(mats, a)
        ker = _kerspan(mats, b)
        f = (a - im.dim) * ker.dim
        # psi : Q^a -> Q^b with Im(L) in ker psi and Im psi in Ker(L)
        cov = [r for r in annihilator_rows(im) if r] if im.dim < a else []
        psi = [[ZERO] * a for _ in range(b)]
        for _ in range(2):
            if not cov or ker.dim == 0:
                break
            u = ker.combination([_rand(rng) for _ in range(ker.dim)])
            c = cov[rng.randrange(len(cov))]
            for i in range(b):
                for j, x in c.items():
                    psi[i][j] += u[i] * x
        ok = all(_is_zero(_matmul(M, psi)) and _is_zero(_matmul(psi, M)) for M in mats)
        return f, im.dim, ker.dim, ok
    if kind in ("II", "III"):
        (w,) = params
        mats = [(_skew_of if kind == "II" else _sym_of)(x, w) for x in els]
        im = _colspan(mats, w)
        f = comb(w - im.dim, 2) if kind == "II" else comb(w - im.dim + 1, 2)
        psi = _random_form(annihilator_rows(im) if im.dim < w else [], w, rng, skew=(kind == "II"))
        ok = all(_is_zero(_matmul(psi, M)) for M in mats)
        return f, im.dim, None, ok
    if kind == "Symp":
        k, m = params
        blocks = [_symp_blocks(x, k, m) for x in els]
        tops = [[Y[i] + X[i] for i in range(k)] for X, Y in blocks]  # [Y | X], k x (k+m)
        im = _colspan(tops, k)
        f = comb(k - im.dim + 1, 2)
        psi = _random_form(annihilator_rows(im) if im.dim < k else [], k, rng, skew=False)
        ok = all(_is_zero(_matmul(psi, T)) for T in tops)
        return f, im.dim, None, ok
    raise ProbeError(f"unknown projection type {kind!r}")


def _random_form(covectors, w, rng, skew: bool):
    covs = [[r.get(j, ZERO) for j in range(w)] for r in covectors if r]
    psi = [[ZERO] * w for _ in range(w)]
    if not covs:
        return psi
    for _ in range(3):
        f = covs[rng.randrange(len(covs))]
        g = covs[rng.randrange(len(covs))]
        c = _rand(rng)
        for i in range(w):
            for j in range(w):
                psi[i][j] += c * (f[i] * g[j] - g[i] * f[j] if skew else f[i] * g[j] + g[i] * f[j])
    return psi


def verify_projection_formula(kind: str, params: Sequence[int], L: Subspace, seed: int = 0) -> ProjectionReport:
    """Compare the killed prolongation with the closed form for the projection type."""
    params = tuple(params)
    V = projection_variety(kind, params)
    if L.ambient_dim != V.ambient_dim:
        raise ProbeError(f"L lives in dimension {L.ambient_dim}, {V.name} in {V.ambient_dim}")
    g1 = prolongation_of(V)
    engine = kill_prolongation(g1, L).dim
    f, im, ker, ok = _formula(kind, params, L, random.Random(f"containment|{seed}"))
    return ProjectionReport(kind, params, L.dim, engine, f, im, ker, ok)


def random_centre(kind: str, params: Sequence[int], seed: int) -> Subspace:
    """A seeded L with 2 <= dim L <= 4: generic, or supported on a random small subspace."""
    rng = random.Random(f"centre|{kind}|{tuple(params)}|{seed}")
    V = projection_variety(kind, params)
    n = V.ambient_dim
    dim = rng.randint(2, 4)
    style = seed % 3
    vecs = []
    for _ in range(dim):
        if style == 0:
            vecs.append([_rand(rng) for _ in range(n)])
            continue
        vecs.append(_structured(kind, tuple(params), rng, style))
    L = span(vecs, n)
    if L.dim == 0:
        return random_centre(kind, params, seed + 10_000)
    return L


def _structured(kind, params, rng, style):
    if kind == "I":
        a, b = params
        r1, r2 = rng.randint(1, a - 1), rng.randint(1, b - 1)
        P = [[_rand(rng) for _ in range(r1)] for _ in range(a)]
        R = [[_rand(rng) for _ in range(r2)] for _ in range(r1)]
        Qm = [[_rand(rng) for _ in range(b)] for _ in range(r2)]
        M = _matmul(_matmul(P, R), Qm)
        return [M[i][j] for i in range(a) for j in range(b)]
    w = params[0]
    r = rng.randint(1, w - 1) if style == 1 else rng.randint(2, max(2, w - 1))
    P = [[_rand(rng) for _ in range(r)] for _ in range(w)]
    if kind == "II":
        import itertools

        R = [[ZERO] * r for _ in range(r)]
        for i, j in itertools.combinations(range(r), 2):
            x = _rand(rng)
            R[i][j], R[j][i] = x, -x
        M = _matmul(_matmul(P, R), [list(c) for c in zip(*P)])
        return [M[i][j] for i, j in itertools.combinations(range(w), 2)]
    if kind == "III":
        R = [[ZERO] * r for _ in range(r)]
        for i, j in multiindices(r, 2):
            R[i][j] = R[j][i] = _rand(rng)
        M = _matmul(_matmul(P, R), [list(c) for c in zip(*P)])
        return [M[i][j] for i, j in multiindices(w, 2)]
    if kind == "Symp":
        k, m = params
        P = P[:k] if len(P) >= k else P
        r = len(P[0])
        R = [[ZERO] * r for _ in range(r)]
        for i, j in multiindices(r, 2):
            R[i][j] = R[j][i] = _rand(rng)
        Y = _matmul(_matmul(P, R), [list(c) for c in zip(*P)])
        X = _matmul(P, [[_rand(rng) for _ in range(m)] for _ in range(r)])
        return [X[i][j] for i in range(k) for j in range(m)] + [Y[i][j] for i, j in multiindices(k, 2)]
    raise ProbeError(f"unknown projection type {kind!r}")


def lift_to_veronese(k: int, m: int, L2: Subspace) -> Subspace:
    """The preimage L3 in Sym^2(W + Q) of L2 in U = (W x Q) + Sym^2 W, W first."""
    w = k + m
    pairs = multiindices(w, 2)
    idx = {p: r for r, p in enumerate(pairs)}
    N = len(pairs)
    vecs = []
    for x in L2.rows:
        v = [ZERO] * N
        for i in range(k):
            for j in range(m):
                v[idx[(i, k + j)]] = x[i * m + j]
        for c, (i, j) in zip(x[k * m:], multiindices(k, 2)):
            v[idx[(i, j)]] = c
        vecs.append(v)
    for i, j in multiindices(m, 2):
        v = [ZERO] * N
        v[idx[(k + i, k + j)]] = ONE
        vecs.append(v)
    return span(vecs, N)
