"""Symmetric multilinear maps Sym^d V -> V and quadratic forms.

Multi-indices are nondecreasing tuples. They are ranked colexicographically
through the bijection ``mu -> {mu_i + i}`` onto strictly increasing tuples,
so the rank of a multi-index does not depend on the ambient dimension.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from prolab.linalg import ONE, ZERO, ExactMatrix, LinalgError, Vector, frac, vec

MultiIndex = tuple[int, ...]


def sym_dim(n: int, k: int) -> int:
    """Number of degree-k monomials in n variables."""
    if n < 1 or k < 0:
        raise ValueError(f"sym_dim needs n >= 1, k >= 0 (got n={n}, k={k})")
    return comb(n + k - 1, k)


def multiindex_rank(mu: Sequence[int]) -> int:
    return sum(comb(m + i, i + 1) for i, m in enumerate(mu))


def multiindex_unrank(r: int, n: int, k: int) -> MultiIndex:
    if not 0 <= r < sym_dim(n, k):
        raise IndexError(f"rank {r} out of range for Sym^{k} of dim {n}")
    out = [0] * k
    for i in range(k - 1, -1, -1):
        c = i
        while comb(c + 1, i + 1) <= r:
            c += 1
        r -= comb(c, i + 1)
        out[i] = c - i
    return tuple(out)


@lru_cache(maxsize=64)
def multiindices(n: int, k: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length k over range(n), in rank order."""
    return tuple(sorted(itertools.combinations_with_replacement(range(n), k), key=lambda t: t[::-1]))


@lru_cache(maxsize=None)
def _rank_table(n: int, k: int) -> dict[MultiIndex, int]:
    return {mu: i for i, mu in enumerate(multiindices(n, k))}


def rank_of(mu: Sequence[int], n: int) -> int:
    """Rank of the multiset ``mu`` (any order), using a cached table."""
    key = tuple(sorted(mu))
    return _rank_table(n, len(key))[key]


class SymMultiMap:
    """A symmetric multilinear map V^degree -> V stored by basis values.

    ``coeffs[rank(mu) * n + i]`` is the i-th coordinate of ``A(e_mu1, ..., e_mud)``.
    No multinomial factors are involved.
    """

    __slots__ = ("n", "degree", "coeffs")

    def __init__(self, n: int, degree: int, coeffs: Sequence):
        size = sym_dim(n, degree) * n
        coeffs = vec(coeffs)
        if len(coeffs) != size:
            raise LinalgError(f"expected {size} coefficients, got {len(coeffs)}")
        self.n = n
        self.degree = degree
        self.coeffs = coeffs

    @classmethod
    def zero(cls, n: int, degree: int) -> "SymMultiMap":
        return cls(n, degree, (ZERO,) * (sym_dim(n, degree) * n))

    @classmethod
    def from_values(cls, n: int, degree: int, values: dict) -> "SymMultiMap":
        """Build from ``{(mu, i): value}`` with mu any ordering of the arguments."""
        c = [ZERO] * (sym_dim(n, degree) * n)
        for (mu, i), v in values.items():
            if len(mu) != degree:
                raise LinalgError(f"multi-index {mu} has wrong length")
            c[rank_of(mu, n) * n + i] = frac(v)
        return cls(n, degree, c)

    def value(self, mu: Sequence[int]) -> Vector:
        base = rank_of(mu, self.n) * self.n
        return self.coeffs[base:base + self.n]

    def evaluate(self, *vectors: Sequence) -> Vector:
        if len(vectors) != self.degree:
            raise LinalgError(f"{self.degree}-linear map given {len(vectors)} arguments")
        vs = [vec(v) for v in vectors]
        if any(len(v) != self.n for v in vs):
            raise LinalgError("argument dimension mismatch")
        supports = [[j for j, x in enumerate(v) if x] for v in vs]
        out = [ZERO] * self.n
        for js in itertools.product(*supports):
            w = ONE
            for v, j in zip(vs, js):
                w *= v[j]
            base = rank_of(js, self.n) * self.n
            for i in range(self.n):
                c = self.coeffs[base + i]
                if c:
                    out[i] += w * c
        return tuple(out)

    def slice(self, mu: Sequence[int]) -> ExactMatrix:
        """The endomorphism v -> A(e_mu1, ..., e_muk, v) for len(mu) = degree - 1."""
        if len(mu) != self.degree - 1:
            raise LinalgError(f"slice needs {self.degree - 1} indices, got {len(mu)}")
        n = self.n
        rows: list[dict[int, Fraction]] = [{} for _ in range(n)]
        for j in range(n):
            base = rank_of(tuple(mu) + (j,), n) * n
            for i in range(n):
                c = self.coeffs[base + i]
                if c:
                    rows[i][j] = c
        return ExactMatrix(n, n, rows)

    def contract(self, v: Sequence) -> "SymMultiMap":
        """A(v, -, ..., -) as a map of one lower degree."""
        if self.degree < 2:
            raise LinalgError("cannot contract a linear map further")
        v = vec(v)
        n, d = self.n, self.degree
        c = [ZERO] * (sym_dim(n, d - 1) * n)
        for r, mu in enumerate(multiindices(n, d - 1)):
            for j, x in enumerate(v):
                if x:
                    base = rank_of(mu + (j,), n) * n
                    for i in range(n):
                        a = self.coeffs[base + i]
                        if a:
                            c[r * n + i] += x * a
        return SymMultiMap(n, d - 1, c)

    def __add__(self, other: "SymMultiMap") -> "SymMultiMap":
        self._check(other)
        return SymMultiMap(self.n, self.degree, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "SymMultiMap") -> "SymMultiMap":
        self._check(other)
        return SymMultiMap(self.n, self.degree, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rmul__(self, scalar) -> "SymMultiMap":
        s = frac(scalar)
        return SymMultiMap(self.n, self.degree, [s * a for a in self.coeffs])

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymMultiMap):
            return NotImplemented
        return (self.n, self.degree, self.coeffs) == (other.n, other.degree, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.degree, self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "SymMultiMap") -> None:
        if (self.n, self.degree) != (other.n, other.degree):
            raise LinalgError("shape mismatch between multilinear maps")

    def __repr__(self) -> str:
        nz = sum(1 for c in self.coeffs if c)
        return f"SymMultiMap(n={self.n}, degree={self.degree}, nonzero={nz})"


@dataclass(frozen=True)
class QuadraticForm:
    """q(v) = v^T Q v for a symmetric rational matrix Q."""

    matrix: tuple[Vector, ...]

    def __post_init__(self):
        m = tuple(vec(r) for r in self.matrix)
        n = len(m)
        if any(len(r) != n for r in m):
            raise LinalgError("quadratic form matrix must be square")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
            raise LinalgError("quadratic form matrix must be symmetric")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def from_sym2(cls, n: int, v: Sequence) -> "QuadraticForm":
        """Inverse of :meth:`sym2_vector`."""
        m = [[ZERO] * n for _ in range(n)]
        for (i, j), x in zip(multiindices(n, 2), v):
            m[i][j] = m[j][i] = frac(x)
        return cls(tuple(tuple(r) for r in m))

    @classmethod
    def from_function(cls, n: int, f) -> "QuadraticForm":
        """Recover the form of a homogeneous quadratic function by polarization."""
        def e(*idx):
            v = [ZERO] * n
            for i in idx:
                v[i] += 1
            return v
        diag = [frac(f(e(i))) for i in range(n)]
        m = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = diag[i]
            for j in range(i):
                m[i][j] = m[j][i] = (frac(f(e(i, j))) - diag[i] - diag[j]) / 2
        return cls(tuple(tuple(r) for r in m))

    def sym2_vector(self) -> Vector:
        """Upper-triangle entries Q_ij (i <= j) in multi-index rank order."""
        return tuple(self.matrix[i][j] for i, j in multiindices(self.n, 2))

    def value(self, v: Sequence) -> Fraction:
        return self.polar(v, v)

    def polar(self, u: Sequence, v: Sequence) -> Fraction:
        u, v = vec(u), vec(v)
        total = ZERO
        for i, ui in enumerate(u):
            if ui:
                row = self.matrix[i]
                total += ui * sum((row[j] * vj for j, vj in enumerate(v) if vj and row[j]), ZERO)
        return total

    def gradient(self, v: Sequence) -> Vector:
        """Q v, so that polar(v, w) = <Q v, w>."""
        v = vec(v)
        return tuple(sum((r[j] * x for j, x in enumerate(v) if x and r[j]), ZERO) for r in self.matrix)

    def restrict(self, basis: Sequence[Sequence]) -> "QuadraticForm":
        """The form pulled back along the linear map whose columns are ``basis``."""
        grads = [self.gradient(b) for b in basis]
        m = tuple(tuple(sum((x * y for x, y in zip(g, c) if x and y), ZERO) for c in basis) for g in grads)
        return QuadraticForm(m)
