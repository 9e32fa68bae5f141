"""Exact linear algebra over Q, with modular elimination as the workhorse.

Matrices are stored as sparse rows of :class:`fractions.Fraction`. Reduced row
echelon forms are computed either by a dense Fraction Gauss-Jordan (small
inputs, and the reference path) or by elimination modulo 62-bit primes with
rational reconstruction. The modular path is *certified*: a reconstructed
echelon form is accepted only after checking exactly that its kernel is
annihilated by every input row, which together with ``rank_p <= rank`` pins
the row space down exactly.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, lcm
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from prolab import _backend

ZERO = Fraction(0)
ONE = Fraction(1)

DEFAULT_PRIME = 2**61 - 1
DENSE_LIMIT = 4096  # rows * cols at or below this use Fraction Gauss-Jordan
MAX_PRIMES = 40

Vector = tuple[Fraction, ...]


class LinalgError(ValueError):
    pass


def frac(x) -> Fraction:
    """Coerce an int, Fraction or ``"a/b"`` string to a Fraction. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ZeroDivisionError:
            raise LinalgError(f"zero denominator in {x!r}") from None
        except ValueError:
            raise LinalgError(f"not an exact rational: {x!r}") from None
    raise TypeError(f"not an exact scalar: {x!r} ({type(x).__name__})")


def vec(xs: Iterable) -> Vector:
    return tuple(frac(x) for x in xs)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), ZERO)


# --------------------------------------------------------------------------
# primes


@lru_cache(maxsize=None)
def _prime_at(index: int) -> int:
    if index == 0:
        return DEFAULT_PRIME
    rng = random.Random(f"prolab-prime:{index}")
    return random_prime(rng)


def random_prime(rng: random.Random, bits: int = 62) -> int:
    """A random prime with exactly ``bits`` bits."""
    while True:
        p = sympy.nextprime(rng.getrandbits(bits - 1) | (1 << (bits - 1)))
        if p.bit_length() == bits:
            return int(p)


def prime_stream(start: int = 0):
    i = start
    while True:
        yield _prime_at(i)
        i += 1


# --------------------------------------------------------------------------
# matrices


class ExactMatrix:
    """An immutable rational matrix held as sparse rows ``{col: Fraction}``."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[Mapping[int, object]] = ()):
        built = []
        for row in rows:
            clean = {}
            for j, v in row.items():
                if not 0 <= j < ncols:
                    raise LinalgError(f"column {j} out of range for {ncols} columns")
                v = frac(v)
                if v:
                    clean[int(j)] = v
            built.append(clean)
        if len(built) > nrows:
            raise LinalgError(f"{len(built)} rows given for a {nrows}-row matrix")
        built.extend({} for _ in range(nrows - len(built)))
        self.nrows = nrows
        self.ncols = ncols
        self._rows = tuple(built)

    @classmethod
    def _trusted(cls, nrows: int, ncols: int, rows: list[dict[int, Fraction]]) -> "ExactMatrix":
        m = object.__new__(cls)
        m.nrows, m.ncols, m._rows = nrows, ncols, tuple(rows)
        return m

    @classmethod
    def from_dense(cls, grid: Sequence[Sequence], ncols: int | None = None) -> "ExactMatrix":
        grid = [list(r) for r in grid]
        if ncols is None:
            ncols = len(grid[0]) if grid else 0
        if any(len(r) != ncols for r in grid):
            raise LinalgError("ragged dense matrix")
        return cls(len(grid), ncols, ({j: v for j, v in enumerate(r) if v} for r in grid))

    @classmethod
    def from_coo(cls, nrows: int, ncols: int, entries: Iterable[tuple[int, int, object]]) -> "ExactMatrix":
        rows: list[dict[int, Fraction]] = [{} for _ in range(nrows)]
        for i, j, v in entries:
            if not 0 <= i < nrows:
                raise LinalgError(f"row {i} out of range")
            rows[i][j] = rows[i].get(j, ZERO) + frac(v)
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls._trusted(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls._trusted(nrows, ncols, [{} for _ in range(nrows)])

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    @property
    def density(self) -> float:
        size = self.nrows * self.ncols
        return self.nnz / size if size else 0.0

    def row(self, i: int) -> dict[int, Fraction]:
        return dict(self._rows[i])

    def rows(self):
        """Iterate over the sparse rows. Do not mutate them."""
        return iter(self._rows)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i].get(j, ZERO)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[ZERO] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def to_coo(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, v) for i, r in enumerate(self._rows) for j, v in sorted(r.items())]

    def transpose(self) -> "ExactMatrix":
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                rows[j][i] = v
        return ExactMatrix._trusted(self.ncols, self.nrows, rows)

    def apply(self, v: Sequence[Fraction]) -> Vector:
        if len(v) != self.ncols:
            raise LinalgError(f"vector of length {len(v)} for {self.ncols} columns")
        return tuple(sum((a * v[j] for j, a in r.items() if v[j]), ZERO) for r in self._rows)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
            rows = []
            for r in self._rows:
                acc: dict[int, Fraction] = {}
                for k, a in r.items():
                    for j, b in other._rows[k].items():
                        acc[j] = acc.get(j, ZERO) + a * b
                rows.append({j: v for j, v in acc.items() if v})
            return ExactMatrix._trusted(self.nrows, other.ncols, rows)
        return self.apply(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    @staticmethod
    def vstack(mats: Sequence["ExactMatrix"]) -> "ExactMatrix":
        if not mats:
            raise LinalgError("nothing to stack")
        ncols = mats[0].ncols
        if any(m.ncols != ncols for m in mats):
            raise LinalgError("column mismatch in vstack")
        rows = [r for m in mats for r in m._rows]
        return ExactMatrix._trusted(len(rows), ncols, rows)


def as_matrix(M) -> ExactMatrix:
    return M if isinstance(M, ExactMatrix) else ExactMatrix.from_dense(M)


# --------------------------------------------------------------------------
# reduced row echelon form

Echelon = tuple[list[dict[int, Fraction]], list[int]]


def rref(M: ExactMatrix, method: str = "auto") -> Echelon:
    """Reduced row echelon form of ``M`` as ``(rows, pivots)``.

    Rows are sparse dicts with a 1 at their pivot. ``method`` is ``"dense"``
    (Fraction Gauss-Jordan), ``"modular"`` (certified multi-modular) or
    ``"auto"``.
    """
    M = as_matrix(M)
    if method == "auto":
        method = "dense" if M.nrows * M.ncols <= DENSE_LIMIT else "modular"
    if method == "dense":
        return _rref_dense(M)
    if method == "modular":
        return _rref_modular(M)
    raise ValueError(f"unknown rref method {method!r}")


def _rref_dense(M: ExactMatrix) -> Echelon:
    # pivot: leftmost nonzero column, then smallest row index
    grid = M.to_dense()
    nrows, ncols = M.nrows, M.ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if grid[i][c]), None)
        if piv is None:
            continue
        grid[r], grid[piv] = grid[piv], grid[r]
        inv = 1 / grid[r][c]
        row = [x * inv if x else ZERO for x in grid[r]]
        grid[r] = row
        for i in range(nrows):
            if i != r and grid[i][c]:
                f = grid[i][c]
                gi = grid[i]
                grid[i] = [x - f * y if y else x for x, y in zip(gi, row)]
        pivots.append(c)
        r += 1
    rows = [{j: v for j, v in enumerate(grid[i]) if v} for i in range(r)]
    return rows, pivots


def _integer_rows(M: ExactMatrix) -> list[dict[int, int]]:
    """Scale each row to coprime integers; the row space is unchanged."""
    out = []
    for r in M.rows():
        if not r:
            continue
        den = lcm(*(v.denominator for v in r.values()))
        ints = {j: v.numerator * (den // v.denominator) for j, v in r.items()}
        g = 0
        for x in ints.values():
            g = gcd(g, x)
        out.append({j: x // g for j, x in ints.items()})
    return out


def _echelon_mod(int_rows: list[dict[int, int]], ncols: int, p: int, full: bool):
    order = sorted(range(len(int_rows)), key=lambda i: (min(int_rows[i]), len(int_rows[i])))
    indptr = np.zeros(len(order) + 1, dtype=np.int64)
    cols: list[int] = []
    vals: list[int] = []
    for k, i in enumerate(order):
        row = int_rows[i]
        for j in sorted(row):
            v = row[j] % p
            if v:
                cols.append(j)
                vals.append(v)
        indptr[k + 1] = len(cols)
    pivots, rptr, rcols, rvals = _backend.echelon(
        indptr, np.asarray(cols, dtype=np.int64), np.asarray(vals, dtype=np.uint64), ncols, p, full
    )
    return pivots, rptr, rcols, rvals


def _mod_rows(pivots, rptr, rcols, rvals) -> list[dict[int, int]]:
    out = []
    for i in range(len(pivots)):
        a, b = int(rptr[i]), int(rptr[i + 1])
        piv = int(pivots[i])
        out.append({int(c): int(v) for c, v in zip(rcols[a:b], rvals[a:b]) if int(c) != piv})
    return out


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """Find n/d = a (mod m) with |n|, d <= sqrt(m/2), or None."""
    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _certify(int_rows: list[dict[int, int]], pivots: list[int], red: list[dict[int, Fraction]]) -> bool:
    """True iff every input row kills the kernel of the candidate echelon form."""
    piv_index = {c: i for i, c in enumerate(pivots)}
    den = 1
    for r in red:
        for v in r.values():
            den = lcm(den, v.denominator)
    scaled = [{f: v.numerator * (den // v.denominator) for f, v in r.items()} for r in red]
    for m in int_rows:
        acc: dict[int, int] = {}
        for c, v in m.items():
            i = piv_index.get(c)
            if i is None:
                acc[c] = acc.get(c, 0) + v * den
            else:
                for f, nv in scaled[i].items():
                    acc[f] = acc.get(f, 0) - v * nv
        if any(acc.values()):
            return False
    return True


def _rref_modular(M: ExactMatrix) -> Echelon:
    ncols = M.ncols
    int_rows = _integer_rows(M)
    if not int_rows:
        return [], []
    best_key = None
    modulus = 1
    residues: list[dict[int, int]] = []
    pivots: list[int] = []
    for attempt, p in enumerate(prime_stream()):
        if attempt >= MAX_PRIMES:
            break
        piv, rptr, rcols, rvals = _echelon_mod(int_rows, ncols, p, full=True)
        piv_list = [int(c) for c in piv]
        if len(piv_list) == ncols:
            # rank_p <= rank <= ncols, so the echelon form is the identity
            return [{c: ONE} for c in range(ncols)], piv_list
        key = (len(piv_list), [-c for c in piv_list])
        if best_key is not None and key < best_key:
            continue  # unlucky prime
        rows_p = _mod_rows(piv, rptr, rcols, rvals)
        if best_key is None or key > best_key:
            best_key, pivots, residues, modulus = key, piv_list, rows_p, p
        else:
            residues = [_crt_row(a, modulus, b, p) for a, b in zip(residues, rows_p)]
            modulus *= p
        red = _reconstruct_rows(residues, modulus)
        if red is not None and _certify(int_rows, pivots, red):
            return [{c: ONE, **r} for c, r in zip(pivots, red)], pivots
    return _rref_dense(M)


def _crt_row(a: dict[int, int], m: int, b: dict[int, int], p: int) -> dict[int, int]:
    out = {}
    inv = pow(m, -1, p)
    for j in a.keys() | b.keys():
        x, y = a.get(j, 0), b.get(j, 0)
        out[j] = x + m * ((y - x) * inv % p)
    return out


def _reconstruct_rows(residues: list[dict[int, int]], modulus: int) -> list[dict[int, Fraction]] | None:
    out = []
    for r in residues:
        row = {}
        for j, a in r.items():
            if a % modulus == 0:
                continue
            q = rational_reconstruct(a, modulus)
            if q is None:
                return None
            row[j] = q
        out.append(row)
    return out


# --------------------------------------------------------------------------
# ranks


def rank(M: ExactMatrix, method: str = "auto") -> int:
    return len(rref(M, method)[1])


def reduce_mod(v: Fraction, p: int) -> int:
    v = frac(v)
    if v.denominator % p == 0:
        raise LinalgError(f"denominator {v.denominator} divisible by p={p}")
    return v.numerator * pow(v.denominator, -1, p) % p


def rank_mod_p(M: ExactMatrix, p: int = DEFAULT_PRIME) -> int:
    """Rank of ``M`` reduced modulo the prime ``p``."""
    M = as_matrix(M)
    rows = []
    for r in M.rows():
        red = {j: reduce_mod(v, p) for j, v in r.items()}
        red = {j: x for j, x in red.items() if x}
        if red:
            rows.append(red)
    if not rows:
        return 0
    piv, *_ = _echelon_mod(rows, M.ncols, p, full=False)
    return len(piv)


# --------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n held as its canonical reduced row echelon basis."""

    ambient_dim: int
    rows: tuple[Vector, ...]
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> ExactMatrix:
        return ExactMatrix.from_dense(self.rows, self.ambient_dim) if self.rows else ExactMatrix.zeros(0, self.ambient_dim)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, (), ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(ONE if j == i else ZERO for j in range(n)) for i in range(n)), tuple(range(n)))

    @classmethod
    def _from_echelon(cls, n: int, ech: Echelon) -> "Subspace":
        rows, pivots = ech
        dense = []
        for r in rows:
            d = [ZERO] * n
            for j, v in r.items():
                d[j] = v
            dense.append(tuple(d))
        return cls(n, tuple(dense), tuple(pivots))

    def contains(self, v: Sequence) -> bool:
        return contains(self, v)

    def coordinates(self, v: Sequence) -> Vector:
        """Coefficients of ``v`` in the echelon basis; raises if ``v`` is outside."""
        v = vec(v)
        if not contains(self, v):
            raise LinalgError("vector not in subspace")
        return tuple(v[c] for c in self.pivots)

    def combination(self, coeffs: Sequence) -> Vector:
        out = [ZERO] * self.ambient_dim
        for c, row in zip(coeffs, self.rows):
            if c:
                for j, x in enumerate(row):
                    if x:
                        out[j] += c * x
        return tuple(out)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


def span(vectors: Iterable[Sequence], ambient_dim: int, method: str = "auto") -> Subspace:
    rows = []
    for v in vectors:
        if len(v) != ambient_dim:
            raise LinalgError(f"vector of length {len(v)} in ambient {ambient_dim}")
        rows.append({j: x for j, x in enumerate(v) if x})
    if not rows:
        return Subspace.zero(ambient_dim)
    return Subspace._from_echelon(ambient_dim, rref(ExactMatrix(len(rows), ambient_dim, rows), method))


def span_sparse(rows: Iterable[Mapping[int, Fraction]], ambient_dim: int, method: str = "auto") -> Subspace:
    rows = [dict(r) for r in rows]
    if not rows:
        return Subspace.zero(ambient_dim)
    return Subspace._from_echelon(ambient_dim, rref(ExactMatrix(len(rows), ambient_dim, rows), method))


def kernel_vectors(M: ExactMatrix, method: str = "auto") -> list[dict[int, Fraction]]:
    """A sparse basis of ker M: one vector per free column."""
    M = as_matrix(M)
    rows, pivots = rref(M, method)
    pset = set(pivots)
    out = []
    for f in range(M.ncols):
        if f in pset:
            continue
        v = {f: ONE}
        for c, r in zip(pivots, rows):
            x = r.get(f)
            if x:
                v[c] = -x
        out.append(v)
    return out


def kernel(M: ExactMatrix, method: str = "auto") -> Subspace:
    """{v : M v = 0} as a canonical subspace."""
    M = as_matrix(M)
    return span_sparse(kernel_vectors(M, method), M.ncols)


def _check_ambient(A: Subspace, B: Subspace) -> None:
    if A.ambient_dim != B.ambient_dim:
        raise LinalgError(f"ambient mismatch: {A.ambient_dim} vs {B.ambient_dim}")


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    return span(A.rows + B.rows, A.ambient_dim)


def annihilator(A: Subspace) -> Subspace:
    """{y : <a, y> = 0 for all a in A} under the standard pairing."""
    if A.dim == 0:
        return Subspace.full(A.ambient_dim)
    return span_sparse(_free_vectors(A), A.ambient_dim)


def _free_vectors(A: Subspace) -> list[dict[int, Fraction]]:
    # A is already in RREF, so its kernel can be read off directly
    pset = set(A.pivots)
    out = []
    for f in range(A.ambient_dim):
        if f in pset:
            continue
        v = {f: ONE}
        for c, r in zip(A.pivots, A.rows):
            if r[f]:
                v[c] = -r[f]
        out.append(v)
    return out


def annihilator_rows(A: Subspace) -> list[dict[int, Fraction]]:
    """Sparse spanning rows of the annihilator (not re-reduced)."""
    if A.dim == 0:
        return [{i: ONE} for i in range(A.ambient_dim)]
    return _free_vectors(A)


def subspace_intersect(A: Subspace, B: Subspace) -> Subspace:
    _check_ambient(A, B)
    eqs = annihilator_rows(A) + annihilator_rows(B)
    eqs = [e for e in eqs if e]
    if not eqs:
        return Subspace.full(A.ambient_dim)
    return kernel(ExactMatrix(len(eqs), A.ambient_dim, eqs))


def contains(A: Subspace, v: Sequence) -> bool:
    if len(v) != A.ambient_dim:
        raise LinalgError(f"vector of length {len(v)} in ambient {A.ambient_dim}")
    w = list(vec(v))
    for c, row in zip(A.pivots, A.rows):
        a = w[c]
        if a:
            for j, x in enumerate(row):
                if x:
                    w[j] -= a * x
    return not any(w)


# --------------------------------------------------------------------------
# solving


def solve(M: ExactMatrix, b: Sequence) -> Vector | None:
    """One solution x of M x = b (free variables set to 0), or None."""
    M = as_matrix(M)
    b = vec(b)
    if len(b) != M.nrows:
        raise LinalgError("right-hand side length mismatch")
    aug = [dict(r) for r in M.rows()]
    for r, bi in zip(aug, b):
        if bi:
            r[M.ncols] = bi
    rows, pivots = rref(ExactMatrix(M.nrows, M.ncols + 1, aug))
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [ZERO] * M.ncols
    for c, r in zip(pivots, rows):
        x[c] = r.get(M.ncols, ZERO)
    return tuple(x)


def inverse(M: ExactMatrix) -> ExactMatrix:
    M = as_matrix(M)
    n = M.nrows
    if M.ncols != n:
        raise LinalgError("inverse of a non-square matrix")
    aug = [dict(r) for r in M.rows()]
    for i, r in enumerate(aug):
        r[n + i] = ONE
    rows, pivots = rref(ExactMatrix(n, 2 * n, aug))
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise LinalgError("singular matrix")
    return ExactMatrix._trusted(n, n, [{j - n: v for j, v in r.items() if j >= n} for r in rows])
