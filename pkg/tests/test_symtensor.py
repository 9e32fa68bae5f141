import itertools
import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolab import algebras
from prolab.linalg import LinalgError
from prolab.prolong import prolong
from prolab.symtensor import (
    QuadraticForm,
    SymMultiMap,
    multiindex_rank,
    multiindex_unrank,
    multiindices,
    rank_of,
    sym_dim,
)

small = st.fractions(min_value=-9, max_value=9, max_denominator=4)


def rand_map(rng, n, degree, lo=-3, hi=3):
    return SymMultiMap(n, degree, [Fraction(rng.randint(lo, hi)) for _ in range(sym_dim(n, degree) * n)])


def rand_vec(rng, n):
    return [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]


@st.composite
def maps_and_vectors(draw, max_n=4, max_degree=3):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, max_degree))
    c = draw(st.lists(small, min_size=sym_dim(n, d) * n, max_size=sym_dim(n, d) * n))
    vs = [draw(st.lists(small, min_size=n, max_size=n)) for _ in range(d + 1)]
    return SymMultiMap(n, d, c), vs


# --------------------------------------------------------------------------
# multi-indices


def test_sym_dim_examples():
    assert sym_dim(3, 2) == 6
    assert sym_dim(16, 2) == 136
    assert sym_dim(5, 0) == 1


def test_sym_dim_guards():
    with pytest.raises(ValueError):
        sym_dim(0, 2)
    with pytest.raises(ValueError):
        sym_dim(3, -1)


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("k", range(0, 6))
def test_unrank_zero_is_all_zero(n, k):
    assert multiindex_unrank(0, n, k) == (0,) * k


@given(st.integers(1, 7), st.integers(0, 5))
def test_rank_unrank_bijection(n, k):
    mis = multiindices(n, k)
    assert len(mis) == sym_dim(n, k) == comb(n + k - 1, k)
    for r, mu in enumerate(mis):
        assert list(mu) == sorted(mu)
        assert multiindex_rank(mu) == r
        assert multiindex_unrank(r, n, k) == mu


def test_unrank_out_of_range():
    with pytest.raises(IndexError):
        multiindex_unrank(sym_dim(3, 2), 3, 2)


def test_multiindices_are_exhaustive():
    seen = {tuple(sorted(t)) for t in itertools.product(range(4), repeat=3)}
    assert set(multiindices(4, 3)) == seen


@given(st.lists(st.integers(0, 5), min_size=1, max_size=4))
def test_rank_of_ignores_order(mu):
    assert rank_of(mu, 6) == rank_of(sorted(mu), 6) == rank_of(list(reversed(mu)), 6)


# --------------------------------------------------------------------------
# evaluation


def test_single_coefficient_evaluation():
    A = SymMultiMap.from_values(2, 2, {((0, 0), 1): 1})
    assert A.evaluate([1, 0], [1, 0]) == (0, 1)
    S = A.slice((0,))
    assert S.to_dense() == [[0, 0], [1, 0]]


def test_symmetry_on_seeded_randoms():
    rng = random.Random(100)
    for _ in range(100):
        n = rng.randint(1, 4)
        A = rand_map(rng, n, 2)
        u, v = rand_vec(rng, n), rand_vec(rng, n)
        assert A.evaluate(u, v) == A.evaluate(v, u)


@given(maps_and_vectors(max_degree=3))
def test_permutation_invariance(Av):
    A, vs = Av
    args = vs[: A.degree]
    ref = A.evaluate(*args)
    for perm in itertools.permutations(args):
        assert A.evaluate(*perm) == ref


@given(maps_and_vectors(max_degree=3))
def test_multilinear_in_first_slot(Av):
    A, vs = Av
    u, w = vs[0], vs[-1]
    rest = vs[1: A.degree]
    uw = [a + b for a, b in zip(u, w)]
    lhs = A.evaluate(uw, *rest)
    rhs = [a + b for a, b in zip(A.evaluate(u, *rest), A.evaluate(w, *rest))]
    assert list(lhs) == rhs


def test_bilinear_expansion_by_hand():
    # oracle: expand A(u + w, v) coordinatewise from the stored basis values
    rng = random.Random(5)
    n = 3
    A = rand_map(rng, n, 2)
    u, w, v = rand_vec(rng, n), rand_vec(rng, n), rand_vec(rng, n)

    def by_hand(x, y):
        out = [Fraction(0)] * n
        for i in range(n):
            for j in range(n):
                val = A.value(tuple(sorted((i, j))))
                for o in range(n):
                    out[o] += x[i] * y[j] * val[o]
        return out

    uw = [a + b for a, b in zip(u, w)]
    assert list(A.evaluate(uw, v)) == by_hand(uw, v) == [a + b for a, b in zip(by_hand(u, v), by_hand(w, v))]


@given(maps_and_vectors(max_degree=3))
def test_storage_evaluation_consistency(Av):
    A, _ = Av
    n = A.n
    e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for mu in multiindices(n, A.degree):
        assert A.evaluate(*(e[i] for i in mu)) == A.value(mu)


def test_evaluate_dimension_mismatch():
    A = SymMultiMap.zero(3, 2)
    with pytest.raises(LinalgError):
        A.evaluate([1, 0], [1, 0, 0])
    with pytest.raises(LinalgError):
        A.evaluate([1, 0, 0])


# --------------------------------------------------------------------------
# slices and contraction


@given(maps_and_vectors(max_n=4, max_degree=3))
def test_slice_columns_are_evaluations(Av):
    A, _ = Av
    n = A.n
    e = [[int(i == j) for j in range(n)] for i in range(n)]
    for mu in multiindices(n, A.degree - 1):
        E = A.slice(mu)
        for j in range(n):
            assert tuple(E[i, j] for i in range(n)) == A.evaluate(*(e[i] for i in mu), e[j])


def test_slice_storage_symmetry():
    rng = random.Random(9)
    A = rand_map(rng, 3, 3)
    for mu in multiindices(3, 2):
        for j in range(3):
            for mu2 in multiindices(3, 2):
                for j2 in range(3):
                    if sorted(mu + (j,)) == sorted(mu2 + (j2,)):
                        c1 = [A.slice(mu)[i, j] for i in range(3)]
                        c2 = [A.slice(mu2)[i, j2] for i in range(3)]
                        assert c1 == c2


def test_slice_length_mismatch():
    with pytest.raises(LinalgError):
        SymMultiMap.zero(3, 3).slice((0,))


def test_slices_of_conformal_prolongation_lie_in_co3():
    g = algebras.co(3)
    res = prolong(g, 1)
    assert res.dim == 3
    for A in res.basis:
        for mu in multiindices(3, 1):
            assert g.contains(algebras.vectorize(A.slice(mu)))


@given(maps_and_vectors(max_degree=3))
def test_contract_fixes_the_first_argument(Av):
    A, vs = Av
    if A.degree < 2:
        return
    B = A.contract(vs[0])
    assert B.degree == A.degree - 1
    assert B.evaluate(*vs[1: A.degree]) == A.evaluate(*vs[: A.degree])


@given(maps_and_vectors(), st.fractions(min_value=-5, max_value=5, max_denominator=3))
def test_vector_space_operations(Av, c):
    A, _ = Av
    assert (A + A) - A == A
    assert (c * A).coeffs == tuple(c * x for x in A.coeffs)
    assert (A - A).is_zero()
    assert hash(A) == hash(SymMultiMap(A.n, A.degree, A.coeffs))


def test_wrong_coefficient_count():
    with pytest.raises(LinalgError):
        SymMultiMap(2, 2, [0] * 5)


# --------------------------------------------------------------------------
# quadratic forms


@st.composite
def forms(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    v = draw(st.lists(small, min_size=sym_dim(n, 2), max_size=sym_dim(n, 2)))
    return QuadraticForm.from_sym2(n, v)


def test_form_must_be_symmetric():
    with pytest.raises(LinalgError):
        QuadraticForm(((1, 2), (3, 4)))


@given(forms())
def test_sym2_roundtrip(q):
    assert QuadraticForm.from_sym2(q.n, q.sym2_vector()) == q


@given(forms(), st.data())
def test_polarization_identity(q, data):
    n = q.n
    u = data.draw(st.lists(small, min_size=n, max_size=n))
    v = data.draw(st.lists(small, min_size=n, max_size=n))
    s = [a + b for a, b in zip(u, v)]
    assert q.value(s) == q.value(u) + q.value(v) + 2 * q.polar(u, v)
    assert q.polar(u, v) == q.polar(v, u)
    assert q.polar(u, v) == sum(a * b for a, b in zip(q.gradient(u), v))


@given(forms())
def test_from_function_recovers_form(q):
    assert QuadraticForm.from_function(q.n, q.value) == q


@given(forms(max_n=4), st.data())
def test_restrict_is_pullback(q, data):
    n = q.n
    r = data.draw(st.integers(1, 3))
    basis = [data.draw(st.lists(small, min_size=n, max_size=n)) for _ in range(r)]
    t = data.draw(st.lists(small, min_size=r, max_size=r))
    image = [sum(t[a] * basis[a][i] for a in range(r)) for i in range(n)]
    assert q.restrict(basis).value(t) == q.value(image)
