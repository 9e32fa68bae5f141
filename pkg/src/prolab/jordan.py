"""Split octonions (Zorn vector matrices) and the 27-dimensional Albert algebra.

An octonion is stored as 8 rationals ``[a, u1, u2, u3, v1, v2, v3, b]`` for the
Zorn matrix ((a, u), (v, b)). A Hermitian 3x3 octonion matrix is stored as
``[xi1, xi2, xi3, x1 (8), x2 (8), x3 (8)]`` where x1 sits opposite xi1, etc.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from prolab.linalg import ZERO, vec

Oct = tuple[Fraction, ...]


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def oct_mul(x: Sequence, y: Sequence) -> Oct:
    a, u, v, b = x[0], x[1:4], x[4:7], x[7]
    c, s, t, d = y[0], y[1:4], y[4:7], y[7]
    vt = _cross(v, t)
    us = _cross(u, s)
    return (
        a * c + _dot(u, t),
        *(a * s[i] + d * u[i] - vt[i] for i in range(3)),
        *(c * v[i] + b * t[i] + us[i] for i in range(3)),
        b * d + _dot(v, s),
    )


def oct_conj(x: Sequence) -> Oct:
    return (x[7], -x[1], -x[2], -x[3], -x[4], -x[5], -x[6], x[0])


def oct_norm(x: Sequence) -> Fraction:
    """Multiplicative split norm: x * conj(x) = norm(x) * 1."""
    return x[0] * x[7] - _dot(x[1:4], x[4:7])


def oct_trace(x: Sequence) -> Fraction:
    return x[0] + x[7]


def oct_add(*xs: Sequence) -> Oct:
    return tuple(sum(c, ZERO) for c in zip(*xs))


def oct_scale(s, x: Sequence) -> Oct:
    return tuple(s * c for c in x)


ONE_OCT: Oct = vec([1, 0, 0, 0, 0, 0, 0, 1])


@lru_cache(maxsize=1)
def structure_table() -> tuple[tuple[Oct, ...], ...]:
    """table[i][j] = e_i * e_j in the coordinate basis."""
    basis = [tuple(Fraction(int(i == j)) for j in range(8)) for i in range(8)]
    return tuple(tuple(oct_mul(x, y) for y in basis) for x in basis)


def split_albert(X: Sequence) -> tuple[Fraction, Fraction, Fraction, Oct, Oct, Oct]:
    X = vec(X)
    if len(X) != 27:
        raise ValueError("an Albert algebra element has 27 coordinates")
    return X[0], X[1], X[2], X[3:11], X[11:19], X[19:27]


def join_albert(xi1, xi2, xi3, x1, x2, x3) -> tuple[Fraction, ...]:
    return (xi1, xi2, xi3, *x1, *x2, *x3)


def sharp(X: Sequence) -> tuple[Fraction, ...]:
    """The quadratic adjoint X^#, satisfying (X^#)^# = det(X) X."""
    xi1, xi2, xi3, x1, x2, x3 = split_albert(X)
    return join_albert(
        xi2 * xi3 - oct_norm(x1),
        xi3 * xi1 - oct_norm(x2),
        xi1 * xi2 - oct_norm(x3),
        oct_add(oct_conj(oct_mul(x2, x3)), oct_scale(-xi1, x1)),
        oct_add(oct_conj(oct_mul(x3, x1)), oct_scale(-xi2, x2)),
        oct_add(oct_conj(oct_mul(x1, x2)), oct_scale(-xi3, x3)),
    )


def det(X: Sequence) -> Fraction:
    xi1, xi2, xi3, x1, x2, x3 = split_albert(X)
    return (xi1 * xi2 * xi3 - xi1 * oct_norm(x1) - xi2 * oct_norm(x2) - xi3 * oct_norm(x3)
            + oct_trace(oct_mul(oct_mul(x1, x2), x3)))


def rank_one_point(s, y: Sequence, z: Sequence) -> tuple[Fraction, ...]:
    """A point of the rank-one cone, quadratic in (s, y, z).

    The point is (s^2, n(z), n(y); conj(y z), s y, s z), i.e. the entry
    opposite xi2 is s*y and the entry opposite xi3 is s*z.
    """
    s = Fraction(s)
    y, z = vec(y), vec(z)
    return join_albert(s * s, oct_norm(z), oct_norm(y), oct_conj(oct_mul(y, z)), oct_scale(s, y), oct_scale(s, z))
