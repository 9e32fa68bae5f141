import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolab import _backend
from prolab.linalg import (
    DEFAULT_PRIME,
    ExactMatrix,
    LinalgError,
    Subspace,
    annihilator,
    contains,
    inverse,
    kernel,
    random_prime,
    rank,
    rank_mod_p,
    rational_reconstruct,
    rref,
    solve,
    span,
    subspace_intersect,
    subspace_sum,
)

from oracles import det_minor, rank_by_minors, sympy_rank


def rand_matrix(rng, m, n, lo=-4, hi=4, density=1.0):
    return [[Fraction(rng.randint(lo, hi)) if rng.random() < density else Fraction(0) for _ in range(n)]
            for _ in range(m)]


def low_rank(rng, m, n, r):
    A = rand_matrix(rng, m, r)
    B = rand_matrix(rng, r, n)
    return [[sum(A[i][t] * B[t][j] for t in range(r)) for j in range(n)] for i in range(m)]


scalars = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def matrices(max_rows=5, max_cols=6):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(scalars, min_size=n, max_size=n), min_size=m, max_size=m)))


# --------------------------------------------------------------------------
# kernel and rank


def test_kernel_of_identity_is_zero():
    assert kernel(ExactMatrix.identity(3)).dim == 0


def test_kernel_of_ones_row():
    K = kernel(ExactMatrix.from_dense([[1, 1, 1]]))
    assert K.dim == 2


def test_seeded_4x7_against_minor_expansion():
    rng = random.Random(4707)
    M = rand_matrix(rng, 4, 7)
    r = rank_by_minors(M)
    assert rank(ExactMatrix.from_dense(M)) == r
    assert kernel(ExactMatrix.from_dense(M)).dim == 7 - r


def test_rank_deficient_against_minor_expansion():
    rng = random.Random(11)
    M = low_rank(rng, 5, 6, 2)
    assert rank_by_minors(M) == 2
    assert rank(ExactMatrix.from_dense(M)) == 2


@given(matrices())
def test_rank_nullity(M):
    E = ExactMatrix.from_dense(M)
    K = kernel(E)
    assert rank(E) + K.dim == E.ncols
    for v in K.rows:
        assert not any(E.apply(v))


@given(matrices(4, 4))
def test_rank_matches_sympy(M):
    assert rank(ExactMatrix.from_dense(M)) == sympy_rank(M)


@given(matrices(), st.randoms(use_true_random=False))
def test_rref_is_canonical_under_row_operations(M, rnd):
    E = ExactMatrix.from_dense(M)
    S1 = span(M, E.ncols)
    # random invertible recombination of the rows
    m = len(M)
    P = [[Fraction(rnd.randint(-3, 3)) for _ in range(m)] for _ in range(m)]
    for i in range(m):
        P[i][i] += 10
    mixed = [[sum(P[i][t] * M[t][j] for t in range(m)) for j in range(E.ncols)] for i in range(m)]
    S2 = span(mixed, E.ncols)
    if det_minor(P) != 0:
        assert S1 == S2
        assert S1.rows == S2.rows and S1.pivots == S2.pivots


def test_rref_pivot_rows_are_reduced():
    rows, piv = rref(ExactMatrix.from_dense([[0, 2, 4, 2], [1, 1, 1, 1], [1, 2, 3, 2]]))
    assert piv == [0, 1]
    for r, p in zip(rows, piv):
        assert r[p] == 1
        for q in piv:
            if q != p:
                assert r.get(q, 0) == 0


# --------------------------------------------------------------------------
# dense and modular elimination agree


@pytest.mark.parametrize("shape,r", [((30, 40), 12), ((80, 60), 60), ((60, 90), 45)])
def test_dense_and_modular_paths_agree(shape, r):
    rng = random.Random(hash(shape) & 0xFFFF)
    m, n = shape
    M = ExactMatrix.from_dense(low_rank(rng, m, n, r))
    a = rref(M, "dense")
    b = rref(M, "modular")
    assert a == b
    assert len(a[1]) == min(r, m, n)


@pytest.mark.slow
def test_dense_and_modular_paths_agree_500():
    rng = random.Random(500)
    A = rand_matrix(rng, 500, 40, density=0.2)
    B = rand_matrix(rng, 40, 500, density=0.2)
    dense = [[0] * 500 for _ in range(500)]
    for i in range(500):
        for t in range(40):
            if A[i][t]:
                row = B[t]
                for j in range(500):
                    if row[j]:
                        dense[i][j] += A[i][t] * row[j]
    M = ExactMatrix.from_dense(dense)
    assert rref(M, "dense") == rref(M, "modular")


def test_modular_handles_fractions():
    M = ExactMatrix.from_dense([[Fraction(1, 3), Fraction(2, 7), 5], [Fraction(2, 3), Fraction(4, 7), 10],
                                [1, Fraction(-1, 2), Fraction(3, 11)]])
    assert rref(M, "modular") == rref(M, "dense")


# --------------------------------------------------------------------------
# rank modulo primes


def test_rank_mod_p_identity():
    assert rank_mod_p(ExactMatrix.identity(5), DEFAULT_PRIME) == 5


def test_rank_mod_p_bad_prime_witness():
    p = 1_000_003
    M = ExactMatrix.from_dense([[p]])
    assert rank_mod_p(M, p) == 0
    assert rank(M) == 1


def test_rank_mod_p_rejects_bad_denominator():
    with pytest.raises(LinalgError):
        rank_mod_p(ExactMatrix.from_dense([[Fraction(1, 7)]]), 7)


@pytest.mark.parametrize("seed", range(6))
def test_rank_mod_two_random_primes_equals_exact(seed):
    rng = random.Random(seed)
    m, n = rng.randint(20, 200), rng.randint(20, 120)
    M = ExactMatrix.from_dense(low_rank(rng, m, n, rng.randint(1, min(m, n))))
    p1, p2 = random_prime(rng), random_prime(rng)
    assert p1 != p2
    r = rank(M)
    assert rank_mod_p(M, p1) == rank_mod_p(M, p2) == r


@given(matrices())
def test_rank_mod_p_never_exceeds_exact(M):
    E = ExactMatrix.from_dense(M)
    assert rank_mod_p(E, 7) <= rank(E) if all(x.denominator % 7 for r in M for x in r) else True


# --------------------------------------------------------------------------
# subspaces


def test_sum_and_intersection_of_axes():
    A = span([[1, 0, 0]], 3)
    B = span([[0, 1, 0]], 3)
    assert subspace_sum(A, B).dim == 2
    assert subspace_intersect(A, B).dim == 0


def test_sum_and_intersection_idempotent():
    A = span([[1, 2, 3], [0, 1, 1]], 3)
    assert subspace_sum(A, A) == A
    assert subspace_intersect(A, A) == A


def test_ambient_mismatch():
    with pytest.raises(LinalgError):
        subspace_sum(Subspace.zero(2), Subspace.zero(3))


def test_modular_law_seeded_against_stacked_elimination():
    rng = random.Random(36)
    a = rand_matrix(rng, 3, 6)
    b = rand_matrix(rng, 4, 6)
    A, B = span(a, 6), span(b, 6)
    assert (A.dim, B.dim) == (3, 4)
    stacked = rank_by_minors(a + b)
    assert subspace_sum(A, B).dim == stacked
    assert subspace_intersect(A, B).dim == 3 + 4 - stacked


@given(matrices(4, 6), matrices(4, 6))
def test_modular_law(a, b):
    n = min(len(a[0]), len(b[0]))
    a = [r[:n] for r in a]
    b = [r[:n] for r in b]
    A, B = span(a, n), span(b, n)
    S, I = subspace_sum(A, B), subspace_intersect(A, B)
    assert S.dim + I.dim == A.dim + B.dim
    for v in I.rows:
        assert A.contains(v) and B.contains(v)


@given(matrices(4, 6))
def test_double_annihilator(a):
    A = span(a, len(a[0]))
    assert annihilator(annihilator(A)) == A
    for f in annihilator(A).rows:
        for v in A.rows:
            assert sum(x * y for x, y in zip(f, v)) == 0


def test_contains_and_coordinates():
    A = span([[1, 1, 0], [0, 1, 1]], 3)
    assert contains(A, [1, 2, 1])
    assert not contains(A, [1, 0, 0])
    v = A.combination([2, -1])
    assert A.coordinates(v) == (2, -1)


# --------------------------------------------------------------------------
# solve and inverse


def test_inverse_against_cofactors():
    rng = random.Random(3)
    M = rand_matrix(rng, 4, 4)
    d = det_minor(M)
    assert d != 0
    Mi = inverse(ExactMatrix.from_dense(M))
    for i in range(4):
        for j in range(4):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(M) if k != j]
            assert Mi[i, j] == (-1) ** (i + j) * det_minor(minor) / d


def test_inverse_singular():
    with pytest.raises(LinalgError):
        inverse(ExactMatrix.from_dense([[1, 2], [2, 4]]))


def test_solve():
    M = ExactMatrix.from_dense([[1, 1], [1, -1]])
    assert solve(M, [3, 1]) == (2, 1)
    assert solve(ExactMatrix.from_dense([[1, 1], [1, 1]]), [1, 2]) is None


@given(st.builds(Fraction, st.integers(-10 ** 8, 10 ** 8), st.integers(1, 10 ** 8)))
def test_rational_reconstruction(x):
    # unique reconstruction needs |num|, den below sqrt(m / 2)
    m = DEFAULT_PRIME
    a = x.numerator * pow(x.denominator, -1, m) % m
    assert rational_reconstruct(a, m) == x


# --------------------------------------------------------------------------
# storage


@given(matrices())
def test_dense_sparse_roundtrip(M):
    E = ExactMatrix.from_dense(M)
    assert E.to_dense() == [[Fraction(x) for x in r] for r in M]
    assert ExactMatrix.from_coo(E.nrows, E.ncols, E.to_coo()) == E
    assert E.transpose().transpose() == E


def test_matmul_and_apply():
    A = ExactMatrix.from_dense([[1, 2], [3, 4]])
    B = ExactMatrix.from_dense([[0, 1], [1, 0]])
    assert (A @ B).to_dense() == [[2, 1], [4, 3]]
    assert A.apply([1, 1]) == (3, 7)


# --------------------------------------------------------------------------
# compiled kernel and its pure-Python twin


def _csr(rows, p):
    indptr = [0]
    cols, vals = [], []
    for r in rows:
        for j in sorted(r):
            if r[j] % p:
                cols.append(j)
                vals.append(r[j] % p)
        indptr.append(len(cols))
    return (np.asarray(indptr, dtype=np.int64), np.asarray(cols, dtype=np.int64),
            np.asarray(vals, dtype=np.uint64))


@pytest.mark.skipif(_backend.compiled_echelon() is None, reason="compiled extension not built")
@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("full", [False, True])
def test_compiled_and_python_kernels_agree(seed, full):
    rng = random.Random(seed)
    p = random_prime(rng)
    m, n = rng.randint(1, 60), rng.randint(1, 60)
    rows = [{j: rng.randrange(p) for j in rng.sample(range(n), rng.randint(0, min(n, 8)))} for _ in range(m)]
    args = (*_csr(rows, p), n, p, full)
    out_c = _backend.compiled_echelon()(*args)
    out_p = _backend.python_echelon(*args)
    for a, b in zip(out_c, out_p):
        assert np.array_equal(a, b)


@pytest.mark.skipif(_backend.compiled_echelon() is None, reason="compiled extension not built")
@pytest.mark.parametrize("small_prime", [False, True])
def test_kernels_agree_on_a_prolongation_system(small_prime):
    from prolab import probes, zoo
    from prolab.prolong import direct_constraints

    M = direct_constraints(probes.aut_of(zoo.build("segre(2,3)")), 1)
    p = 7 if small_prime else random_prime(random.Random(1))
    rows = [{j: x.numerator * pow(x.denominator, -1, p) % p for j, x in r.items()} for r in M.rows()]
    for full in (False, True):
        args = (*_csr(rows, p), M.ncols, p, full)
        for a, b in zip(_backend.compiled_echelon()(*args), _backend.python_echelon(*args)):
            assert np.array_equal(a, b)


def test_backend_is_reported():
    assert _backend.BACKEND in ("compiled", "python")
