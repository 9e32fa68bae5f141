"""Prolongations of linear Lie algebras.

For g in End(V), the k-th prolongation g^(k) is the space of symmetric
(k+1)-linear maps A : V^{k+1} -> V such that v -> A(v_1, ..., v_k, v) lies in
g for every choice of v_1, ..., v_k.

Membership only needs checking on basis tuples: the map
(v_1, ..., v_k) -> A(v_1, ..., v_k, -) is multilinear into End(V), and g is a
linear subspace, so it lands in g everywhere iff it does on e_mu for every
nondecreasing multi-index mu of length k.

Two routes compute the same subspace of Hom(Sym^{k+1} V, V):

* ``direct``: the unknowns are the coefficients of A and each basis
  multi-index contributes the equations "slice lies in g".
* ``recursive``: A is written as sum_i e_i^* (x) A_i with A_i in g^(k-1);
  the unknowns are the coordinates of the A_i and the equations say that
  the assembled map is symmetric. Much smaller once g^(k-1) is small.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from prolab import algebras
from prolab.linalg import (
    ONE,
    ZERO,
    ExactMatrix,
    LinalgError,
    Subspace,
    annihilator,
    inverse,
    kernel,
    rank_mod_p,
    random_prime,
    span,
)
from prolab.symtensor import SymMultiMap, multiindices, rank_of, sym_dim


DEFAULT_CAP = 200_000


class ProlongationTooLarge(LinalgError):
    pass


@dataclass(frozen=True)
class ProlongationResult:
    k: int
    dim: int
    basis: tuple[SymMultiMap, ...]
    field_used: str
    constraint_shape: tuple[int, int]
    seed: int = 0
    method: str = "direct"
    subspace: Subspace | None = field(default=None, compare=False, repr=False)

    @property
    def exact(self) -> bool:
        return self.field_used == "exact"


class AtLeast(int):
    """Sentinel for "no vanishing found up to k"; prints as ``>= k``."""

    def __str__(self) -> str:
        return f"≥ {int(self)}"

    def __repr__(self) -> str:
        return f"AtLeast({int(self)})"


def quotient_projector(g: Subspace) -> ExactMatrix:
    """A matrix whose kernel is exactly g (rows span the annihilator of g)."""
    n2 = g.ambient_dim
    algebras.endo_dim(g)
    ann = annihilator(g)
    return ExactMatrix(ann.dim, n2, ({j: x for j, x in enumerate(r) if x} for r in ann.rows))


def _projector_rows(g: Subspace) -> list[dict[int, Fraction]]:
    # sparse annihilator rows straight from the echelon form of g
    from prolab.linalg import annihilator_rows

    if g.dim == g.ambient_dim:
        return []
    return annihilator_rows(g)


def direct_constraints(g: Subspace, k: int) -> ExactMatrix:
    """Constraint matrix of the direct route; its kernel is g^(k) in coefficient coordinates."""
    n = algebras.endo_dim(g)
    proj = _projector_rows(g)
    ncols = sym_dim(n, k + 1) * n
    rows = []
    for mu in multiindices(n, k):
        col_of = [rank_of(mu + (j,), n) * n for j in range(n)]
        for q in proj:
            r: dict[int, Fraction] = {}
            for idx, x in q.items():
                o, j = divmod(idx, n)
                c = col_of[j] + o
                r[c] = r.get(c, ZERO) + x
            r = {c: v for c, v in r.items() if v}
            if r:
                rows.append(r)
    return ExactMatrix(len(rows), ncols, rows)


def _as_maps(g: Subspace) -> list[SymMultiMap]:
    """Elements of g as degree-1 maps (coefficient j * n + o holds X[o][j])."""
    n = algebras.endo_dim(g)
    out = []
    for r in g.rows:
        c = [ZERO] * (n * n)
        for idx, x in enumerate(r):
            if x:
                o, j = divmod(idx, n)
                c[j * n + o] = x
        out.append(SymMultiMap(n, 1, c))
    return out


def recursive_constraints(prev: Sequence[SymMultiMap], n: int, k: int) -> ExactMatrix:
    """Symmetry equations for B = sum_i e_i^* (x) B_i, B_i = sum_a c[i, a] prev[a].

    Unknown ``i * len(prev) + a`` is c[i, a]. For each multi-index mu of length
    k+1 the value B_i(e_{mu - i}) must not depend on which occurrence i is
    stripped; comparing every distinct entry against the first one suffices.
    """
    d = len(prev)
    ncols = n * d
    rows = []
    for mu in multiindices(n, k + 1):
        i0 = mu[0]
        rest0 = mu[1:]
        vals0 = [p.value(rest0) for p in prev]
        for j in sorted(set(mu[1:]) - {i0}):
            rest = list(mu)
            rest.remove(j)
            valsj = [p.value(rest) for p in prev]
            for o in range(n):
                r = {}
                for a in range(d):
                    x = vals0[a][o]
                    if x:
                        r[i0 * d + a] = x
                    y = valsj[a][o]
                    if y:
                        r[j * d + a] = -y
                if r:
                    rows.append(r)
    return ExactMatrix(len(rows), ncols, rows)


def _assemble(prev: Sequence[SymMultiMap], n: int, k: int, coeffs: dict[int, Fraction]) -> tuple:
    """Coefficient vector of B (degree k+1) from the c[i, a] unknowns."""
    d = len(prev)
    Bi = {}
    for idx, c in coeffs.items():
        i, a = divmod(idx, d)
        Bi.setdefault(i, []).append((c, prev[a]))
    out = [ZERO] * (sym_dim(n, k + 1) * n)
    for r, mu in enumerate(multiindices(n, k + 1)):
        terms = Bi.get(mu[0])
        if not terms:
            continue
        rest = mu[1:]
        for c, p in terms:
            v = p.value(rest)
            for o in range(n):
                if v[o]:
                    out[r * n + o] += c * v[o]
    return tuple(out)


def _maps_of(sub: Subspace, n: int, degree: int) -> tuple[SymMultiMap, ...]:
    return tuple(SymMultiMap(n, degree, r) for r in sub.rows)


def _check_args(g: Subspace, k: int) -> int:
    if k < 1:
        raise ValueError(f"prolongation degree must be >= 1 (got {k})")
    n = algebras.endo_dim(g)
    if n < 1:
        raise ValueError("empty vector space")
    return n


def prolong(
    g: Subspace,
    k: int,
    field: str = "exact",
    method: str = "auto",
    prime: int | None = None,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
) -> ProlongationResult:
    """The k-th prolongation of g.

    ``field="exact"`` returns a canonical basis; ``field="modp"`` returns only
    the dimension, computed from the direct constraint matrix modulo one
    prime (``prime`` or a random 62-bit prime drawn from ``seed``).
    ``method`` is ``direct``, ``recursive`` or ``auto`` (direct up to ``cap``
    unknowns, recursive beyond).
    """
    n = _check_args(g, k)
    unknowns = sym_dim(n, k + 1) * n
    if field == "modp":
        p = prime if prime is not None else random_prime(random.Random(seed))
        if method == "auto":
            method = "direct" if unknowns <= cap else "recursive"
        if method == "recursive":
            prev = prolong(g, k - 1, method="recursive") if k > 1 else None
            maps = prev.basis if prev else tuple(_as_maps(g))
            M = recursive_constraints(maps, n, k)
            dim = M.ncols - rank_mod_p(M, p)
        elif method == "direct":
            if unknowns > cap:
                raise ProlongationTooLarge(f"{unknowns} unknowns exceed the cap {cap}")
            M = direct_constraints(g, k)
            dim = M.ncols - rank_mod_p(M, p)
        else:
            raise ValueError(f"unknown method {method!r}")
        return ProlongationResult(k, dim, (), f"mod-p({p})", M.shape, seed, method)
    if field != "exact":
        raise ValueError(f"unknown field {field!r}")
    if method == "auto":
        method = "direct" if unknowns <= cap else "recursive"
    if method == "direct":
        if unknowns > cap:
            raise ProlongationTooLarge(f"{unknowns} unknowns exceed the cap {cap}")
        M = direct_constraints(g, k)
        sub = kernel(M)
        return ProlongationResult(k, sub.dim, _maps_of(sub, n, k + 1), "exact", M.shape, seed, "direct", sub)
    if method != "recursive":
        raise ValueError(f"unknown method {method!r}")
    return _prolong_recursive(g, k, n, seed)


def _prolong_recursive(g: Subspace, k: int, n: int, seed: int) -> ProlongationResult:
    prev = tuple(_as_maps(g))
    shape = (0, 0)
    sub = None
    for j in range(1, k + 1):
        if not prev:
            sub = Subspace.zero(sym_dim(n, j + 1) * n)
            shape = (0, 0)
            break
        M = recursive_constraints(prev, n, j)
        shape = M.shape
        if M.nrows:
            from prolab.linalg import kernel_vectors

            vecs = kernel_vectors(M)
        else:
            vecs = [{c: ONE} for c in range(M.ncols)]
        size = sym_dim(n, j + 1) * n
        assembled = [_assemble(prev, n, j, v) for v in vecs]
        sub = span(assembled, size) if assembled else Subspace.zero(size)
        prev = _maps_of(sub, n, j + 1)
    return ProlongationResult(k, sub.dim, prev if sub.dim else (), "exact", shape, seed, "recursive", sub)


def vanishing_order(g: Subspace, k_max: int):
    """Smallest k <= k_max with g^(k) = 0, else ``AtLeast(k_max)``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    n = algebras.endo_dim(g)
    prev = tuple(_as_maps(g))
    for k in range(1, k_max + 1):
        if not prev:
            return k
        M = recursive_constraints(prev, n, k)
        if M.nrows == 0:
            vecs = [{c: ONE} for c in range(M.ncols)]
        else:
            from prolab.linalg import kernel_vectors

            vecs = kernel_vectors(M)
        if not vecs:
            return k
        size = sym_dim(n, k + 1) * n
        prev = _maps_of(span([_assemble(prev, n, k, v) for v in vecs], size), n, k + 1)
    return AtLeast(k_max)


def slices_in(g: Subspace, A: SymMultiMap) -> bool:
    """Exhaustive check that every basis slice of A lies in g."""
    for mu in multiindices(A.n, A.degree - 1):
        if not g.contains(algebras.vectorize(A.slice(mu))):
            return False
    return True


def transform_map(A: SymMultiMap, P, P_inv=None) -> SymMultiMap:
    """(P.A)(v_1, ...) = P A(P^{-1} v_1, ..., P^{-1} v_d)."""
    from prolab.linalg import as_matrix

    P = as_matrix(P)
    Pi = inverse(P) if P_inv is None else as_matrix(P_inv)
    n = A.n
    cols = [tuple(Pi[i, j] for i in range(n)) for j in range(n)]
    c = []
    for mu in multiindices(n, A.degree):
        c.extend(P.apply(A.evaluate(*(cols[i] for i in mu))))
    return SymMultiMap(n, A.degree, c)


def transform(obj, P):
    """Act by an invertible P on a map, a list of maps, or a subspace of End(V)."""
    from prolab.linalg import as_matrix

    P = as_matrix(P)
    Pi = inverse(P)
    if isinstance(obj, SymMultiMap):
        return transform_map(obj, P, Pi)
    if isinstance(obj, Subspace):
        return algebras.conjugate(obj, P, Pi)
    if isinstance(obj, ProlongationResult):
        if not obj.exact:
            raise LinalgError("only exact prolongation results carry a basis")
        maps = [transform_map(A, P, Pi) for A in obj.basis]
        if not maps:
            return Subspace.zero(obj.subspace.ambient_dim) if obj.subspace else Subspace.zero(0)
        return span([A.coeffs for A in maps], len(maps[0].coeffs))
    return [transform_map(A, P, Pi) for A in obj]


def result_subspace(res: ProlongationResult, n: int) -> Subspace:
    if res.subspace is not None:
        return res.subspace
    size = sym_dim(n, res.k + 1) * n
    return span([A.coeffs for A in res.basis], size) if res.basis else Subspace.zero(size)
