"""Matrix Lie algebras as subspaces of End(V).

An endomorphism X of Q^n is vectorized row-major: coordinate ``o * n + j``
holds ``X[o][j]``, the o-th output component of ``X e_j``.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from prolab.linalg import (
    ONE,
    ZERO,
    ExactMatrix,
    LinalgError,
    Subspace,
    Vector,
    as_matrix,
    kernel,
    span,
    span_sparse,
)


def vectorize(X) -> Vector:
    X = as_matrix(X)
    if X.nrows != X.ncols:
        raise LinalgError("endomorphisms must be square")
    n = X.nrows
    out = [ZERO] * (n * n)
    for o, row in enumerate(X.rows()):
        for j, v in row.items():
            out[o * n + j] = v
    return tuple(out)


def unvectorize(v: Sequence[Fraction], n: int) -> ExactMatrix:
    if len(v) != n * n:
        raise LinalgError(f"vector of length {len(v)} is not an endomorphism of Q^{n}")
    return ExactMatrix(n, n, ({j: v[o * n + j] for j in range(n) if v[o * n + j]} for o in range(n)))


def endo_dim(g: Subspace) -> int:
    n = round(g.ambient_dim ** 0.5)
    if n * n != g.ambient_dim:
        raise LinalgError(f"ambient dimension {g.ambient_dim} is not a square")
    return n


def algebra(mats, n: int) -> Subspace:
    """Span of the given n x n matrices as a subspace of End(Q^n)."""
    return span([vectorize(m) for m in mats], n * n)


def elements(g: Subspace) -> list[ExactMatrix]:
    n = endo_dim(g)
    return [unvectorize(r, n) for r in g.rows]


def gl(n: int) -> Subspace:
    return Subspace.full(n * n)


def scalars(n: int) -> Subspace:
    return span([vectorize(ExactMatrix.identity(n))], n * n)


def orthogonal(J, conformal: bool = False) -> Subspace:
    """{X : X^T J + J X = 0} (plus scalars when ``conformal``) for a symmetric or skew J."""
    J = as_matrix(J)
    n = J.nrows
    # (X^T J + J X)[a][b] = sum_o X[o][a] J[o][b] + J[a][o] X[o][b]
    rows = []
    for a in range(n):
        for b in range(n):
            r: dict[int, Fraction] = {}
            for o in range(n):
                x = J[o, b]
                if x:
                    r[o * n + a] = r.get(o * n + a, ZERO) + x
                y = J[a, o]
                if y:
                    r[o * n + b] = r.get(o * n + b, ZERO) + y
            rows.append({k: v for k, v in r.items() if v})
    g = kernel(ExactMatrix(n * n, n * n, rows))
    if conformal:
        g = span(g.rows + (vectorize(ExactMatrix.identity(n)),), n * n)
    return g


def so(n: int) -> Subspace:
    """so(n) for the identity form."""
    return orthogonal(ExactMatrix.identity(n))


def co(n: int) -> Subspace:
    return orthogonal(ExactMatrix.identity(n), conformal=True)


def sp(n: int) -> Subspace:
    """sp(n) for the standard skew form on Q^n, n even."""
    if n % 2:
        raise ValueError(f"sp needs an even dimension (got {n})")
    h = n // 2
    J = [[ZERO] * n for _ in range(n)]
    for i in range(h):
        J[i][h + i] = ONE
        J[h + i][i] = -ONE
    return orthogonal(J)


def sl(n: int) -> Subspace:
    """Traceless endomorphisms."""
    trace = {i * n + i: ONE for i in range(n)}
    return kernel(ExactMatrix(1, n * n, [trace]))


def bracket(X: ExactMatrix, Y: ExactMatrix) -> ExactMatrix:
    XY = X @ Y
    YX = Y @ X
    n = X.nrows
    return ExactMatrix(n, n, ({j: a.get(j, ZERO) - b.get(j, ZERO) for j in a.keys() | b.keys()}
                              for a, b in zip(XY.rows(), YX.rows())))


def is_subalgebra(g: Subspace) -> bool:
    """Closure of the span under commutators."""
    els = elements(g)
    for i, X in enumerate(els):
        for Y in els[i + 1:]:
            if not g.contains(vectorize(bracket(X, Y))):
                return False
    return True


def derived(g: Subspace) -> Subspace:
    """[g, g]."""
    els = elements(g)
    n = endo_dim(g)
    vs = [vectorize(bracket(X, Y)) for i, X in enumerate(els) for Y in els[i + 1:]]
    return span(vs, n * n) if vs else Subspace.zero(n * n)


def common_kernel(g: Subspace) -> Subspace:
    """{v : X v = 0 for all X in g}."""
    n = endo_dim(g)
    rows = [r for X in elements(g) for r in X.rows() if r]
    if not rows:
        return Subspace.full(n)
    return kernel(ExactMatrix(len(rows), n, rows))


def conjugate(g: Subspace, P, P_inv=None) -> Subspace:
    """P g P^{-1}."""
    from prolab.linalg import inverse

    P = as_matrix(P)
    Pi = inverse(P) if P_inv is None else as_matrix(P_inv)
    return span_sparse(({i: v for i, v in enumerate(vectorize(P @ X @ Pi)) if v} for X in elements(g)),
                       g.ambient_dim)


def identity_vector(n: int) -> Vector:
    return tuple(ONE if o == j else ZERO for o in range(n) for j in range(n))
