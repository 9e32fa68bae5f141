"""A zoo of projective varieties cut out by quadrics, with exact rational sampling.

Every variety here (except sections and user files) comes with a chart: a map
t -> phi(t) whose coordinates are homogeneous quadratic polynomials in the
parameters t and whose image is dense in the affine cone. Sampling evaluates
the chart at small random integer parameters. Hyperplane sections through the
base point phi(t0) are sampled on the secant line of the parameter space: for a
direction d, the restriction of lambda(phi(t0 + s d)) is s (lambda(P) + s lambda(phi(d)))
with P = phi(t0 + d) - phi(t0) - phi(d), so the second root is rational.
"""
from __future__ import annotations

import itertools
import math
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from prolab import jordan
from prolab.linalg import (
    ONE,
    ZERO,
    ExactMatrix,
    Subspace,
    Vector,
    dot,
    kernel,
    span,
    vec,
)
from prolab.symtensor import QuadraticForm, multiindices, rank_of, sym_dim

NO_LINES = -math.inf
MAX_ATTEMPTS = 60


class SamplingError(RuntimeError):
    pass


class ParameterError(ValueError):
    pass


# --------------------------------------------------------------------------
# quadratic ideals


@dataclass(frozen=True)
class QuadraticIdeal:
    """Degree-2 part of an ideal, as a canonical subspace of Sym^2 V^* coordinates."""

    n: int
    space: Subspace

    @classmethod
    def from_vectors(cls, n: int, vectors: Sequence[Sequence]) -> "QuadraticIdeal":
        return cls(n, span([vec(v) for v in vectors], sym_dim(n, 2)))

    @classmethod
    def from_forms(cls, forms: Sequence[QuadraticForm], n: int | None = None) -> "QuadraticIdeal":
        if n is None:
            if not forms:
                raise ParameterError("ambient dimension needed for an empty ideal")
            n = forms[0].n
        return cls.from_vectors(n, [f.sym2_vector() for f in forms])

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def forms(self) -> tuple[QuadraticForm, ...]:
        return tuple(QuadraticForm.from_sym2(self.n, r) for r in self.space.rows)

    def vanishes_at(self, v: Sequence) -> bool:
        return all(f.value(v) == 0 for f in self.forms)

    def restrict(self, basis: Sequence[Sequence]) -> "QuadraticIdeal":
        """Pull back along the map sending e_i to basis[i]."""
        forms = [f.restrict(basis) for f in self.forms]
        return QuadraticIdeal.from_forms(forms, len(basis))


def evaluation_row(v: Sequence[Fraction]) -> list[Fraction]:
    """Row r with <r, sym2(Q)> = v^T Q v."""
    return [v[i] * v[j] * (1 if i == j else 2) for i, j in multiindices(len(v), 2)]


def quadrics_from_points(points: Sequence[Sequence], n: int) -> QuadraticIdeal:
    rows = [{c: x for c, x in enumerate(evaluation_row(vec(p))) if x} for p in points]
    N = sym_dim(n, 2)
    return QuadraticIdeal(n, kernel(ExactMatrix(len(rows), N, rows)))


def _form(n: int, terms: Sequence[tuple]) -> Vector:
    """Sym^2 coordinates of sum coef * x_a * x_b."""
    out = [ZERO] * sym_dim(n, 2)
    for coef, a, b in terms:
        c = Fraction(coef)
        if a == b:
            out[rank_of((a, a), n)] += c
        else:
            out[rank_of((a, b), n)] += c / 2
    return tuple(out)


# --------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Expected:
    """Reference values for a variety S in P(V); None means not recorded."""

    dim_S: int | None = None
    dim_sec: int | None = None
    dim_aut: int | None = None
    dim_g1: int | None = None
    vmrt: float | int | None = None


@dataclass(frozen=True, eq=False)
class VarietyPresentation:
    name: str
    ambient_dim: int
    quadrics: QuadraticIdeal
    base_point: Vector
    expected: Expected = Expected()
    chart: Callable[[Sequence[Fraction]], Vector] | None = field(default=None, repr=False)
    chart_dim: int = 0
    base_param: Vector | None = None
    draw: Callable[[random.Random], Vector | None] | None = field(default=None, repr=False)
    points: tuple[Vector, ...] | None = field(default=None, repr=False)

    def sample(self, seed: int | str, index: int) -> Vector:
        """Point number ``index`` of the stream determined by ``seed``."""
        if self.points is not None:
            if index >= len(self.points):
                raise SamplingError(
                    f"{self.name}: {len(self.points)} explicit samples, point {index} requested")
            return self.points[index]
        if self.draw is None:
            raise SamplingError(f"{self.name}: no sampler and no explicit samples")
        for attempt in range(MAX_ATTEMPTS):
            p = self.draw(random.Random(f"{self.name}|{seed}|{index}|{attempt}"))
            if p is not None and any(p):
                return p
        raise SamplingError(f"{self.name}: no point after {MAX_ATTEMPTS} attempts (seed {seed}, index {index})")

    def __repr__(self) -> str:
        return f"VarietyPresentation({self.name}, n={self.ambient_dim}, I2={self.quadrics.dim})"


def sample_points(V: VarietyPresentation, count: int, seed: int | str = 0) -> list[Vector]:
    return [V.sample(seed, i) for i in range(count)]


def _chart_draw(chart, dim: int, lo: int = -12, hi: int = 12):
    def draw(rng: random.Random):
        t = [Fraction(rng.randint(lo, hi)) for _ in range(dim)]
        return chart(t)
    return draw


def _make(name, n, quadrics, chart, chart_dim, base_param, expected) -> VarietyPresentation:
    base_param = vec(base_param)
    return VarietyPresentation(
        name=name,
        ambient_dim=n,
        quadrics=quadrics,
        base_point=tuple(chart(base_param)),
        expected=expected,
        chart=chart,
        chart_dim=chart_dim,
        base_param=base_param,
        draw=_chart_draw(chart, chart_dim),
    )


def _unit(m: int, i: int) -> list[Fraction]:
    v = [ZERO] * m
    v[i] = ONE
    return v


# --------------------------------------------------------------------------
# constructors


def veronese(p: int) -> VarietyPresentation:
    """Second Veronese embedding of P^p, coordinates w_i w_j (i <= j) of W = Q^{p+1}."""
    if p < 1:
        raise ParameterError("veronese needs p >= 1")
    w = p + 1
    n = sym_dim(w, 2)
    pairs = multiindices(w, 2)
    idx = {ij: r for r, ij in enumerate(pairs)}

    def x(i, j):
        return idx[(min(i, j), max(i, j))]

    minors = []
    for i, k in itertools.combinations(range(w), 2):
        for j, l in itertools.combinations_with_replacement(range(w), 2):
            minors.append(_form(n, [(1, x(i, j), x(k, l)), (-1, x(i, l), x(k, j))]))
        for j, l in itertools.combinations(range(w), 2):
            minors.append(_form(n, [(1, x(i, l), x(k, j)), (-1, x(i, j), x(k, l))]))

    def chart(t):
        return tuple(t[i] * t[j] for i, j in pairs)

    exp = Expected(dim_S=p, dim_sec=min(2 * p, n - 1), dim_aut=w * w, dim_g1=n, vmrt=NO_LINES)
    return _make(f"veronese({p})", n, QuadraticIdeal.from_vectors(n, minors), chart, w, _unit(w, 0), exp)


def segre(a: int, b: int) -> VarietyPresentation:
    """P^{a-1} x P^{b-1} in Q^a (x) Q^b, coordinate i*b + j = x_i y_j."""
    if a < 1 or b < 1:
        raise ParameterError("segre needs a, b >= 1")
    n = a * b
    minors = [
        _form(n, [(1, i * b + j, k * b + l), (-1, i * b + l, k * b + j)])
        for i, k in itertools.combinations(range(a), 2)
        for j, l in itertools.combinations(range(b), 2)
    ]

    def chart(t):
        return tuple(t[i] * t[a + j] for i in range(a) for j in range(b))

    if a >= 2 and b >= 2:
        exp = Expected(a + b - 2, min(2 * a + 2 * b - 5, n - 1), a * a + b * b - 1, n, max(a, b) - 2)
    else:
        exp = Expected(dim_S=a + b - 2)
    base = _unit(a, 0) + _unit(b, 0)
    return _make(f"segre({a},{b})", n, QuadraticIdeal.from_vectors(n, minors), chart, a + b, base, exp)


def plucker_gr2(m: int) -> VarietyPresentation:
    """Gr(2, m) in Lambda^2 Q^m, coordinates p_ij (i < j) in lexicographic order."""
    if m < 4:
        raise ParameterError("plucker_gr2 needs m >= 4")
    pairs = list(itertools.combinations(range(m), 2))
    idx = {ij: r for r, ij in enumerate(pairs)}
    n = len(pairs)
    rels = [
        _form(n, [(1, idx[(i, j)], idx[(k, l)]), (-1, idx[(i, k)], idx[(j, l)]), (1, idx[(i, l)], idx[(j, k)])])
        for i, j, k, l in itertools.combinations(range(m), 4)
    ]

    def chart(t):
        return tuple(t[i] * t[m + j] - t[j] * t[m + i] for i, j in pairs)

    exp = Expected(2 * (m - 2), min(4 * m - 11, n - 1), m * m, n, m - 2)
    base = _unit(m, 0) + _unit(m, 1)
    return _make(f"plucker_gr2({m})", n, QuadraticIdeal.from_vectors(n, rels), chart, 2 * m, base, exp)


def _split_terms(n: int, offset: int = 0) -> list[tuple]:
    """Split form sum x_i x_{n-1-i} (+ x_mid^2 for odd n) on coordinates offset..offset+n-1."""
    terms = [(1, offset + i, offset + n - 1 - i) for i in range(n // 2)]
    if n % 2:
        terms.append((1, offset + n // 2, offset + n // 2))
    return terms


def split_form_value(y: Sequence[Fraction]) -> Fraction:
    n = len(y)
    total = sum((y[i] * y[n - 1 - i] for i in range(n // 2)), ZERO)
    if n % 2:
        total += y[n // 2] ** 2
    return total


def quadric(n: int) -> VarietyPresentation:
    """The quadric Q^{n-2} in P^{n-1} of the split form; base point e_0."""
    if n < 3:
        raise ParameterError("quadric needs n >= 3")
    q = _form(n, _split_terms(n))

    def chart(t):
        s, y = t[0], t[1:]
        return (s * s, *(s * c for c in y), -split_form_value(y))

    vmrt = NO_LINES if n == 3 else n - 4
    exp = Expected(n - 2, n - 1, n * (n - 1) // 2 + 1, n, vmrt)
    return _make(f"quadric({n})", n, QuadraticIdeal.from_vectors(n, [q]), chart, n - 1, _unit(n - 1, 0), exp)


_S5_PAIRS = list(itertools.combinations(range(5), 2))
_S5_QUADS = [tuple(j for j in range(5) if j != i) for i in range(5)]


def _pf4(w: dict, a, b, c, d) -> Fraction:
    return w[(a, b)] * w[(c, d)] - w[(a, c)] * w[(b, d)] + w[(a, d)] * w[(b, c)]


def _spinor_chart(t):
    s = t[0]
    w = dict(zip(_S5_PAIRS, t[1:]))
    return (s * s, *(s * w[p] for p in _S5_PAIRS), *(_pf4(w, *q) for q in _S5_QUADS))


def spinor_s5() -> VarietyPresentation:
    """The 10-dimensional spinor variety in P^15 via (s^2, s w, w^w/2), w in Lambda^2 Q^5."""
    n = 16
    draw = _chart_draw(_spinor_chart, 11)
    pts = [p for p in (draw(random.Random(f"spinor-ideal|{i}")) for i in range(sym_dim(n, 2) + 20))]
    exp = Expected(10, 15, 46, 16, 6)
    return _make("spinor_s5", n, quadrics_from_points(pts, n), _spinor_chart, 11, _unit(11, 0), exp)


def _cayley_chart(t):
    return jordan.rank_one_point(t[0], t[1:9], t[9:17])


def cayley_op2() -> VarietyPresentation:
    """The Cayley plane: rank-one locus X^# = 0 in the split Albert algebra."""
    n = 27
    exp = Expected(16, 25, 79, 27, 10)
    return _make("cayley_op2", n, QuadraticIdeal.from_vectors(n, _polarize_all(jordan.sharp, n)),
                 _cayley_chart, 17, _unit(17, 0), exp)


def _polarize_all(f, n: int) -> list[Vector]:
    """Sym^2 coordinates of every component of a vector of quadratic forms."""
    def at(*idx):
        v = [ZERO] * n
        for i in idx:
            v[i] += 1
        return f(v)

    diag = [at(i) for i in range(n)]
    pairs = multiindices(n, 2)
    out = []
    cross = {(i, j): at(i, j) for i, j in pairs if i != j}
    for c in range(len(diag[0])):
        out.append(tuple(diag[i][c] if i == j else (cross[(i, j)][c] - diag[i][c] - diag[j][c]) / 2
                         for i, j in pairs))
    return out


def symp_vmrt(k: int, m: int) -> VarietyPresentation:
    """Z = {(w (x) q, w^2)} in (W (x) Q) + Sym^2 W, dim W = k, dim Q = m.

    Coordinates: i*m + j for w_i q_j, then k*m + rank(i, j) for w_i w_j.
    """
    if k < 2 or m < 1:
        raise ParameterError("symp_vmrt needs k >= 2, m >= 1")
    wpairs = multiindices(k, 2)
    n = k * m + len(wpairs)

    def chart(t):
        w, q = t[:k], t[k:]
        return (*(w[i] * q[j] for i in range(k) for j in range(m)), *(w[i] * w[j] for i, j in wpairs))

    draw = _chart_draw(chart, k + m)
    pts = [draw(random.Random(f"symp-ideal|{k},{m}|{i}")) for i in range(sym_dim(n, 2) + 20)]
    exp = Expected(k - 1 + m, min(2 * m + 2 * k - 2, n - 1), m * m + k * m + k * k, k * (k + 1) // 2)
    return _make(f"symp_vmrt({k},{m})", n, quadrics_from_points(pts, n), chart, k + m, _unit(k + m, 0), exp)


# --------------------------------------------------------------------------
# hyperplane sections


def hyperplane_section(V: VarietyPresentation, lam: Sequence, name: str | None = None,
                       expected: Expected = Expected(),
                       draw: Callable[[random.Random], Vector | None] | None = None) -> VarietyPresentation:
    """S cut by the hyperplane lam = 0, presented in RREF coordinates of ker(lam).

    ``draw`` optionally samples points of the section in the coordinates of V;
    by default the secant-line sampler of the chart is used.
    """
    lam = vec(lam)
    n = V.ambient_dim
    if len(lam) != n:
        raise ParameterError(f"covector of length {len(lam)} for ambient dimension {n}")
    if not any(lam):
        raise ParameterError("zero covector")
    if dot(lam, V.base_point) != 0:
        raise ParameterError("the covector must vanish at the base point")
    probe = sample_points(V, n + 5, "hyperplane-probe")
    if all(dot(lam, p) == 0 for p in probe):
        raise ParameterError("the covector vanishes on the whole variety")

    H = kernel(ExactMatrix(1, n, [{j: x for j, x in enumerate(lam) if x}]))
    piv = H.pivots

    def coords(p):
        return tuple(p[c] for c in piv)

    if draw is None:
        if V.chart is None:
            raise ParameterError(f"{V.name} has no chart to sample a section from")
        chart, t0, cd = V.chart, V.base_param, V.chart_dim
        c0 = chart(t0)

        def draw(rng):
            d = [Fraction(rng.randint(-4, 4)) for _ in range(cd)]
            cdel = chart(d)
            den = dot(lam, cdel)
            if den == 0:
                return None
            P = [a - b - c for a, b, c in zip(chart([x + y for x, y in zip(t0, d)]), c0, cdel)]
            s = -dot(lam, P) / den
            if s == 0:
                return None
            return chart([x + s * y for x, y in zip(t0, d)])

    inner = draw

    def section_draw(rng):
        p = inner(rng)
        if p is None:
            return None
        if dot(lam, p) != 0:
            raise SamplingError("section sampler left the hyperplane")
        return coords(p)

    quadrics = V.quadrics.restrict(H.rows)
    return VarietyPresentation(
        name=name or f"{V.name}|H",
        ambient_dim=n - 1,
        quadrics=quadrics,
        base_point=coords(V.base_point),
        expected=expected,
        draw=section_draw,
    )


def _small_rng_vector(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> list[Fraction]:
    return [Fraction(rng.randint(lo, hi)) for _ in range(n)]


def s5_hyperplane(seed: int = 0) -> VarietyPresentation:
    """The spinor variety cut by a random hyperplane through its base point."""
    V = spinor_s5()
    rng = random.Random(f"s5-hyperplane|{seed}")
    lam = [ZERO] + _small_rng_vector(rng, 15)
    return hyperplane_section(V, lam, "s5_hyperplane", Expected(9, None, 31, 7))


def _skew_from_seed(seed: int) -> list[list[Fraction]]:
    rng = random.Random(f"gr25-form|{seed}")
    while True:
        w = [[ZERO] * 5 for _ in range(5)]
        for i, j in _S5_PAIRS:
            if (i, j) == (0, 1):
                continue
            x = Fraction(rng.randint(-3, 3))
            w[i][j], w[j][i] = x, -x
        if _skew_rank(w) == 4:
            return w


def _skew_rank(w) -> int:
    from prolab.linalg import rank

    return rank(ExactMatrix.from_dense(w))


def gr25_hyperplane(seed: int = 0) -> VarietyPresentation:
    """Gr(2,5) cut by the hyperplane of a rank-4 two-form w; points u^v with w(u, v) = 0."""
    V = plucker_gr2(5)
    w = _skew_from_seed(seed)
    lam = [w[i][j] for i, j in _S5_PAIRS]

    def draw(rng):
        u = _small_rng_vector(rng, 5, -4, 4)
        form = [sum((u[i] * w[i][j] for i in range(5)), ZERO) for j in range(5)]
        K = kernel(ExactMatrix(1, 5, [{j: x for j, x in enumerate(form) if x}]))
        c = _small_rng_vector(rng, K.dim, -4, 4)
        v = K.combination(c)
        return tuple(u[i] * v[j] - u[j] * v[i] for i, j in _S5_PAIRS)

    return hyperplane_section(V, lam, "gr25_hyperplane", Expected(5, None, 16, 5), draw=draw)


def segre_hyperplane(a: int, b: int, seed: int = 0) -> VarietyPresentation:
    """P^{a-1} x P^{b-1} cut by a full-rank bilinear form vanishing at the base point."""
    if a < 2 or b < 2:
        raise ParameterError("segre_hyperplane needs a, b >= 2")
    from prolab.linalg import rank

    V = segre(a, b)
    rng = random.Random(f"segre-hyperplane|{a},{b}|{seed}")
    while True:
        M = [[Fraction(rng.randint(-3, 3)) for _ in range(b)] for _ in range(a)]
        M[0][0] = ZERO
        if rank(ExactMatrix.from_dense(M)) == min(a, b):
            break
    lam = [M[i][j] for i in range(a) for j in range(b)]
    if a == 2 or b == 2:
        # a scroll over P^1, isomorphic to symp_vmrt(2, max(a, b) - 2)
        exp = Expected(a + b - 3, None, None, 3)
    elif a == b:
        exp = Expected(a + b - 3, None, a * a, 0)
    else:
        exp = Expected(a + b - 3, None, None, 0)
    return hyperplane_section(V, lam, f"segre_hyperplane({a},{b})", exp)


# --------------------------------------------------------------------------
# registry

CONSTRUCTORS: dict[str, Callable[..., VarietyPresentation]] = {
    "veronese": veronese,
    "segre": segre,
    "plucker_gr2": plucker_gr2,
    "quadric": quadric,
    "spinor_s5": spinor_s5,
    "cayley_op2": cayley_op2,
    "symp_vmrt": symp_vmrt,
    "s5_hyperplane": s5_hyperplane,
    "gr25_hyperplane": gr25_hyperplane,
    "segre_hyperplane": segre_hyperplane,
}

DEFAULT_IDS = (
    "veronese(1)", "veronese(2)", "veronese(3)", "veronese(4)",
    "segre(2,2)", "segre(2,3)", "segre(3,3)",
    "plucker_gr2(5)", "plucker_gr2(6)",
    "quadric(3)", "quadric(4)", "quadric(5)", "quadric(6)", "quadric(7)",
    "spinor_s5", "cayley_op2",
    "symp_vmrt(2,2)", "symp_vmrt(3,2)", "symp_vmrt(2,3)",
    "s5_hyperplane", "gr25_hyperplane", "segre_hyperplane(3,3)",
)

_ID = re.compile(r"^\s*([a-z0-9_]+)\s*(?:\(([^)]*)\)|:(.*))?\s*$")


def parse_id(text: str) -> tuple[str, tuple[int, ...]]:
    """``segre(3,3)``, ``segre:3,3`` and ``spinor_s5`` style identifiers."""
    m = _ID.match(text)
    if not m:
        raise ParameterError(f"malformed variety id {text!r}")
    name, a, b = m.group(1), m.group(2), m.group(3)
    args = a if a is not None else b
    if name not in CONSTRUCTORS:
        raise ParameterError(f"unknown variety {name!r}; known: {', '.join(sorted(CONSTRUCTORS))}")
    params = ()
    if args and args.strip():
        try:
            params = tuple(int(x) for x in args.split(","))
        except ValueError:
            raise ParameterError(f"non-integer parameters in {text!r}") from None
    return name, params


def canonical_id(name: str, params: Sequence[int]) -> str:
    return f"{name}({','.join(map(str, params))})" if params else name


@lru_cache(maxsize=None)
def _build_cached(name: str, params: tuple[int, ...]) -> VarietyPresentation:
    try:
        return CONSTRUCTORS[name](*params)
    except TypeError as e:
        raise ParameterError(f"bad parameters for {name}: {e}") from None


def build(name: str, *params: int) -> VarietyPresentation:
    """Build (and cache) a zoo variety by name; ``name`` may also be a full id."""
    if not params and ("(" in name or ":" in name):
        name, params = parse_id(name)
    elif name not in CONSTRUCTORS:
        raise ParameterError(f"unknown variety {name!r}")
    return _build_cached(name, tuple(int(p) for p in params))
