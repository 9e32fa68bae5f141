import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolab import algebras, probes, zoo
from prolab.linalg import ExactMatrix, LinalgError, Subspace, inverse, kernel, span
from prolab.prolong import (
    AtLeast,
    ProlongationTooLarge,
    direct_constraints,
    prolong,
    quotient_projector,
    result_subspace,
    slices_in,
    transform,
    vanishing_order,
)
from prolab.symtensor import SymMultiMap, sym_dim

from oracles import sympy_prolongation_dim


def rand_invertible(rng, n):
    while True:
        P = ExactMatrix.from_dense([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        try:
            inverse(P)
            return P
        except LinalgError:
            continue


def aut(vid):
    return probes.aut_of(zoo.build(vid))


ALGEBRAS = {
    "gl(2)": lambda: algebras.gl(2),
    "sl(3)": lambda: algebras.sl(3),
    "so(3)": lambda: algebras.so(3),
    "co(3)": lambda: algebras.co(3),
    "co(4)": lambda: algebras.co(4),
    "sp(4)": lambda: algebras.sp(4),
    "aut segre(2,2)": lambda: aut("segre(2,2)"),
    "aut quadric(5)": lambda: aut("quadric(5)"),
    "aut veronese(2)": lambda: aut("veronese(2)"),
    "aut symp_vmrt(2,2)": lambda: aut("symp_vmrt(2,2)"),
}


# --------------------------------------------------------------------------
# quotient projector


def test_projector_of_gl_is_empty():
    assert quotient_projector(algebras.gl(3)).nrows == 0


def test_projector_of_zero_is_identity():
    Q = quotient_projector(Subspace.zero(9))
    assert Q.nrows == 9
    assert span(Q.to_dense(), 9) == Subspace.full(9)
    assert kernel(Q).dim == 0


def test_projector_of_so3_roundtrip():
    g = algebras.so(3)
    Q = quotient_projector(g)
    assert Q.nrows == 6
    assert kernel(Q) == g


# --------------------------------------------------------------------------
# dimensions


@pytest.mark.parametrize("n", range(1, 5))
@pytest.mark.parametrize("k", [1, 2])
def test_gl_dims(n, k):
    assert prolong(algebras.gl(n), k).dim == n * comb(n + k, k + 1)


def test_gl2_first_prolongation():
    assert prolong(algebras.gl(2), 1).dim == 6


def test_co3_prolongation():
    assert prolong(algebras.co(3), 1).dim == 3


def test_so3_prolongation_vanishes():
    assert prolong(algebras.so(3), 1).dim == 0


def test_segre_2_2():
    g = aut("segre(2,2)")
    assert g.dim == 7
    assert prolong(g, 1).dim == 4
    assert prolong(g, 2).dim == 0


@pytest.mark.parametrize("name,k,expected", [
    ("gl(2)", 1, 6), ("so(3)", 1, 0), ("co(3)", 1, 3), ("sl(3)", 1, 15), ("sp(4)", 1, 20),
    ("aut segre(2,2)", 1, 4), ("aut segre(2,2)", 2, 0), ("co(4)", 1, 4),
])
def test_against_sympy_oracle(name, k, expected):
    g = ALGEBRAS[name]()
    n = algebras.endo_dim(g)
    mats = [M.to_dense() for M in algebras.elements(g)]
    assert sympy_prolongation_dim(mats, n, k) == expected
    assert prolong(g, k).dim == expected


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_direct_and_recursive_agree(name):
    g = ALGEBRAS[name]()
    n = algebras.endo_dim(g)
    for k in (1, 2):
        a = prolong(g, k, method="direct")
        b = prolong(g, k, method="recursive")
        assert a.dim == b.dim
        assert result_subspace(a, n) == result_subspace(b, n)


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_modp_matches_exact(name):
    g = ALGEBRAS[name]()
    for k in (1, 2):
        exact = prolong(g, k)
        for seed in (0, 1):
            m = prolong(g, k, field="modp", seed=seed)
            assert m.dim == exact.dim
            assert m.field_used.startswith("mod-p(") and not m.exact
        assert prolong(g, k, field="modp", method="recursive").dim == exact.dim


@pytest.mark.parametrize("name", sorted(ALGEBRAS))
def test_every_basis_slice_lies_in_g(name):
    g = ALGEBRAS[name]()
    res = prolong(g, 1)
    assert len(res.basis) == res.dim
    for A in res.basis:
        assert slices_in(g, A)


def test_constraint_shape_and_unknowns():
    g = algebras.so(3)
    M = direct_constraints(g, 1)
    assert M.ncols == sym_dim(3, 2) * 3
    assert prolong(g, 1).constraint_shape == M.shape


def test_monotone_vanishing():
    for name in ("so(3)", "co(3)", "aut segre(2,2)", "aut quadric(5)"):
        g = ALGEBRAS[name]()
        dims = [prolong(g, k, method="recursive").dim for k in (1, 2, 3)]
        for a, b in zip(dims, dims[1:]):
            if a == 0:
                assert b == 0


# --------------------------------------------------------------------------
# vanishing order


def test_vanishing_order_so3():
    assert vanishing_order(algebras.so(3), 3) == 1


@pytest.mark.parametrize("n", [3, 4, 5])
def test_vanishing_order_co(n):
    assert vanishing_order(algebras.co(n), 3) == 2


def test_vanishing_order_gl_sentinel():
    v = vanishing_order(algebras.gl(2), 3)
    assert isinstance(v, AtLeast) and v == 3
    assert str(v) == "≥ 3"


def test_vanishing_order_guard():
    with pytest.raises(ValueError):
        vanishing_order(algebras.so(3), 0)


# --------------------------------------------------------------------------
# transformations


def test_transform_identity_is_fixed():
    rng = random.Random(0)
    A = SymMultiMap(3, 2, [rng.randint(-3, 3) for _ in range(18)])
    assert transform(A, ExactMatrix.identity(3)) == A


@given(st.integers(1, 3), st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool),
       st.randoms(use_true_random=False))
def test_transform_by_scalar(k, c, rnd):
    n = 2
    A = SymMultiMap(n, k + 1, [rnd.randint(-3, 3) for _ in range(sym_dim(n, k + 1) * n)])
    P = ExactMatrix.from_dense([[c, 0], [0, c]])
    assert transform(A, P) == c ** (-k) * A


def test_transform_singular():
    with pytest.raises(LinalgError):
        transform(SymMultiMap.zero(2, 2), ExactMatrix.from_dense([[1, 1], [1, 1]]))


@given(st.integers(0, 10 ** 6))
def test_transform_is_an_action(seed):
    rng = random.Random(seed)
    n = 2
    A = SymMultiMap(n, 2, [rng.randint(-3, 3) for _ in range(sym_dim(n, 2) * n)])
    P, R = rand_invertible(rng, n), rand_invertible(rng, n)
    assert transform(transform(A, R), P) == transform(A, P @ R)


@pytest.mark.parametrize("name", ["co(3)", "sp(4)", "aut segre(2,2)", "aut symp_vmrt(2,2)"])
@pytest.mark.parametrize("seed", range(3))
def test_equivariance(name, seed):
    g = ALGEBRAS[name]()
    n = algebras.endo_dim(g)
    P = rand_invertible(random.Random(seed), n)
    lhs = prolong(transform(g, P), 1)
    rhs = transform(prolong(g, 1), P)
    assert result_subspace(lhs, n) == rhs


# --------------------------------------------------------------------------
# guards


def test_degree_guard():
    with pytest.raises(ValueError):
        prolong(algebras.gl(2), 0)


def test_cap_guard():
    with pytest.raises(ProlongationTooLarge):
        prolong(algebras.gl(4), 1, method="direct", cap=10)
    # auto falls back to the recursive route above the cap
    assert prolong(algebras.co(3), 1, cap=10).method == "recursive"


def test_unknown_options():
    with pytest.raises(ValueError):
        prolong(algebras.gl(2), 1, field="reals")
    with pytest.raises(ValueError):
        prolong(algebras.gl(2), 1, method="magic")


def test_modp_given_prime_is_recorded():
    r = prolong(algebras.co(3), 1, field="modp", prime=1_000_003)
    assert r.field_used == "mod-p(1000003)" and r.dim == 3


def test_fraction_scaled_algebra_is_unchanged():
    g = algebras.co(3)
    scaled = span([[Fraction(1, 7) * x for x in r] for r in g.rows], 9)
    assert scaled == g
