import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prolab import algebras, jordan, probes, zoo
from prolab.linalg import ExactMatrix, kernel, rank, span
from prolab.symtensor import multiindices, sym_dim
from prolab.zoo import ParameterError, SamplingError

ALL = zoo.DEFAULT_IDS
SMALL = [v for v in ALL if zoo.build(v).ambient_dim <= 16]

ints = st.integers(-6, 6).map(Fraction)


# --------------------------------------------------------------------------
# presentation invariants, every zoo variety


@pytest.mark.parametrize("vid", ALL)
def test_base_and_samples_on_the_cone(vid):
    V = zoo.build(vid)
    assert V.quadrics.vanishes_at(V.base_point)
    for p in zoo.sample_points(V, 25, seed=1):
        assert len(p) == V.ambient_dim
        assert all(f.value(p) == 0 for f in V.quadrics.forms)


@pytest.mark.parametrize("vid", ALL)
def test_identity_in_cone_aut(vid):
    V = zoo.build(vid)
    assert probes.aut_of(V).contains(algebras.identity_vector(V.ambient_dim))


@pytest.mark.parametrize("vid", ALL)
def test_tangent_dimension_at_base(vid):
    V = zoo.build(vid)
    T = probes.tangent_space(V.quadrics, V.base_point)
    assert T.dim == V.expected.dim_S + 1


@pytest.mark.parametrize("vid", ALL)
def test_samples_span_ambient(vid):
    V = zoo.build(vid)
    n = V.ambient_dim
    assert span(zoo.sample_points(V, n + 10, seed=2), n).dim == n


@pytest.mark.parametrize("vid", SMALL)
def test_quadrics_from_samples_stable_under_doubling(vid):
    V = zoo.build(vid)
    n = V.ambient_dim
    count = sym_dim(n, 2) + 20
    pts = zoo.sample_points(V, 2 * count, seed="stability")
    I1 = zoo.quadrics_from_points(pts[:count], n)
    I2 = zoo.quadrics_from_points(pts, n)
    assert I1.space == I2.space == V.quadrics.space


@pytest.mark.slow
def test_cayley_quadrics_from_samples():
    V = zoo.build("cayley_op2")
    pts = zoo.sample_points(V, sym_dim(27, 2) + 20, seed="stability")
    assert zoo.quadrics_from_points(pts, 27).space == V.quadrics.space


@pytest.mark.parametrize("vid", ALL)
def test_sampling_is_deterministic(vid):
    V = zoo.build(vid)
    assert zoo.sample_points(V, 5, seed=3) == zoo.sample_points(V, 5, seed=3)
    assert zoo.sample_points(V, 5, seed=3) != zoo.sample_points(V, 5, seed=4)


# --------------------------------------------------------------------------
# documented examples


def test_veronese_2():
    V = zoo.build("veronese(2)")
    assert (V.ambient_dim, V.expected.dim_S, V.quadrics.dim) == (6, 2, 6)


def test_veronese_2_points_are_squares():
    V = zoo.build("veronese(2)")
    pts = zoo.sample_points(V, 30, seed=0)
    assert span(pts, 6).dim == 6
    idx = {ij: r for r, ij in enumerate(multiindices(3, 2))}
    for p in pts:
        M = [[p[idx[(min(i, j), max(i, j))]] for j in range(3)] for i in range(3)]
        assert rank(ExactMatrix.from_dense(M)) == 1


def test_plucker_gr2_5():
    V = zoo.build("plucker_gr2(5)")
    assert (V.ambient_dim, V.expected.dim_S, V.expected.dim_sec) == (10, 6, 9)


def test_quadric_is_a_hypersurface():
    # quadric(n) lives in ambient dimension n
    V = zoo.build("quadric(5)")
    assert (V.ambient_dim, V.quadrics.dim, V.expected.dim_S) == (5, 1, 3)


def test_symp_vmrt_3_2():
    V = zoo.build("symp_vmrt(3,2)")
    assert V.ambient_dim == 12 and V.expected.dim_S == 4
    assert probes.tangent_space(V.quadrics, V.base_point).dim == 5


@pytest.mark.parametrize("vid,count", [
    ("veronese(1)", 1), ("segre(2,2)", 1), ("spinor_s5", 10), ("cayley_op2", 27),
    ("plucker_gr2(6)", 15), ("segre(3,3)", 9),
])
def test_quadric_counts(vid, count):
    assert zoo.build(vid).quadrics.dim == count


def test_spinor_kernel_count():
    V = zoo.build("spinor_s5")
    pts = zoo.sample_points(V, 200, seed=7)
    rows = [zoo.evaluation_row(p) for p in pts]
    assert rank(ExactMatrix.from_dense(rows)) == sym_dim(16, 2) - 10


def test_cayley_points_satisfy_the_adjoint():
    V = zoo.build("cayley_op2")
    for p in zoo.sample_points(V, 60, seed=0):
        assert not any(jordan.sharp(p))


# --------------------------------------------------------------------------
# hyperplane sections


def test_quadric_hyperplane_section_drops_dimension():
    V = zoo.build("quadric(5)")
    lam = [0, 1, 2, -1, 3]
    H = zoo.hyperplane_section(V, lam)
    assert H.ambient_dim == 4 and H.quadrics.dim == 1
    assert probes.tangent_space(H.quadrics, H.base_point).dim == V.expected.dim_S
    for p in zoo.sample_points(H, 15, seed=0):
        assert H.quadrics.vanishes_at(p)


def test_s5_hyperplane_points_lift_to_spinors():
    V = zoo.build("spinor_s5")
    H = zoo.build("s5_hyperplane")
    assert H.expected.dim_S == 9
    assert probes.tangent_space(H.quadrics, H.base_point).dim == 10
    # lift section coordinates through the canonical basis of ker(lam)
    rng = random.Random("s5-hyperplane|0")
    lam = [Fraction(0)] + [Fraction(rng.randint(-3, 3)) for _ in range(15)]
    ker = kernel(ExactMatrix(1, 16, [{j: x for j, x in enumerate(lam) if x}]))
    for p in zoo.sample_points(H, 40, seed=0):
        full = ker.combination(p)
        assert sum(a * b for a, b in zip(lam, full)) == 0
        assert V.quadrics.vanishes_at(full)
        assert H.quadrics.vanishes_at(p)


def test_gr25_hyperplane():
    H = zoo.build("gr25_hyperplane")
    assert H.expected.dim_S == 5
    assert probes.tangent_space(H.quadrics, H.base_point).dim == 6
    assert span(zoo.sample_points(H, 20, seed=0), 9).dim == 9


def test_hyperplane_guards():
    V = zoo.build("quadric(4)")
    with pytest.raises(ParameterError):
        zoo.hyperplane_section(V, [0, 0, 0, 0])
    with pytest.raises(ParameterError):
        zoo.hyperplane_section(V, [1, 0, 0, 0])  # does not vanish at e_0
    with pytest.raises(ParameterError):
        zoo.hyperplane_section(V, [0, 1, 0])


# --------------------------------------------------------------------------
# parameters and ids


@pytest.mark.parametrize("call", [
    lambda: zoo.veronese(0), lambda: zoo.segre(0, 2), lambda: zoo.plucker_gr2(3),
    lambda: zoo.quadric(2), lambda: zoo.symp_vmrt(1, 2), lambda: zoo.symp_vmrt(2, 0),
    lambda: zoo.segre_hyperplane(1, 3),
])
def test_parameter_guards(call):
    with pytest.raises(ParameterError):
        call()


def test_parse_id_forms():
    assert zoo.parse_id("segre(3,3)") == ("segre", (3, 3))
    assert zoo.parse_id("segre:3,3") == ("segre", (3, 3))
    assert zoo.parse_id("spinor_s5") == ("spinor_s5", ())
    with pytest.raises(ParameterError):
        zoo.parse_id("nope(1)")
    with pytest.raises(ParameterError):
        zoo.parse_id("segre(a,b)")
    with pytest.raises(ParameterError):
        zoo.build("segre", 1, 2, 3)


def test_build_is_cached():
    assert zoo.build("segre(2,3)") is zoo.build("segre", 2, 3)


def test_explicit_samples_run_out():
    V = zoo.build("quadric(4)")
    W = zoo.VarietyPresentation("pts", 4, V.quadrics, V.base_point, points=(V.base_point,))
    assert W.sample(0, 0) == V.base_point
    with pytest.raises(SamplingError):
        W.sample(0, 1)


# --------------------------------------------------------------------------
# split octonions and the Albert algebra


octs = st.lists(ints, min_size=8, max_size=8).map(tuple)
alberts = st.lists(ints, min_size=27, max_size=27).map(tuple)


@given(octs, octs)
def test_octonion_norm_is_multiplicative(x, y):
    assert jordan.oct_norm(jordan.oct_mul(x, y)) == jordan.oct_norm(x) * jordan.oct_norm(y)


@given(octs)
def test_octonion_conjugate(x):
    n = jordan.oct_norm(x)
    assert jordan.oct_mul(x, jordan.oct_conj(x)) == jordan.oct_scale(n, jordan.ONE_OCT)


@given(octs, octs)
def test_octonions_are_alternative(x, y):
    xx = jordan.oct_mul(x, x)
    assert jordan.oct_mul(xx, y) == jordan.oct_mul(x, jordan.oct_mul(x, y))


@given(alberts)
def test_double_adjoint(X):
    assert jordan.sharp(jordan.sharp(X)) == tuple(jordan.det(X) * x for x in X)


@given(ints, octs, octs)
def test_rank_one_points(s, y, z):
    assert not any(jordan.sharp(jordan.rank_one_point(s, y, z)))


def test_albert_split_join_roundtrip():
    X = tuple(Fraction(i) for i in range(27))
    assert jordan.join_albert(*jordan.split_albert(X)) == X
