"""JSON documents for user-supplied varieties and projection centres."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from prolab.linalg import LinalgError, Subspace, frac, span
from prolab.symtensor import QuadraticForm, multiindices
from prolab.zoo import QuadraticIdeal, VarietyPresentation, sample_points

VARIETY_SCHEMA = "prolab-variety/1"
CENTRE_SCHEMA = "prolab-centre/1"


class SchemaError(ValueError):
    """A document that does not follow its schema; the message names the field path."""


def _load(data: bytes | str) -> Any:
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None


def _int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"{path}: expected an integer, got {x!r}")
    return x


def _scalar(x, path: str) -> Fraction:
    if isinstance(x, float):
        raise SchemaError(f"{path}: floats are not exact, write {x!r} as a fraction string")
    try:
        return frac(x)
    except (LinalgError, TypeError) as e:
        raise SchemaError(f"{path}: {e}") from None


def _vector(xs, n: int, path: str) -> tuple[Fraction, ...]:
    if not isinstance(xs, list):
        raise SchemaError(f"{path}: expected a list")
    if len(xs) != n:
        raise SchemaError(f"{path}: expected {n} entries, got {len(xs)}")
    return tuple(_scalar(x, f"{path}[{i}]") for i, x in enumerate(xs))


def _fmt(x: Fraction) -> str:
    return str(x)


def parse_variety_file(data: bytes | str) -> VarietyPresentation:
    """Read a variety document.

    ``quadrics`` is a list of forms; each form is a list of ``[i, j, num, den]``
    entries giving the symmetric Gram matrix entry Q_ij = Q_ji = num/den.
    """
    doc = _load(data)
    if not isinstance(doc, dict):
        raise SchemaError("top level: expected an object")
    schema = doc.get("schema", VARIETY_SCHEMA)
    if schema != VARIETY_SCHEMA:
        raise SchemaError(f"schema: unsupported {schema!r} (expected {VARIETY_SCHEMA!r})")
    if "ambient_dim" not in doc:
        raise SchemaError("ambient_dim: missing")
    n = _int(doc["ambient_dim"], "ambient_dim")
    if n < 1:
        raise SchemaError("ambient_dim: must be >= 1")
    raw = doc.get("quadrics")
    if not isinstance(raw, list):
        raise SchemaError("quadrics: expected a list of forms")
    forms = []
    for q, entries in enumerate(raw):
        if not isinstance(entries, list):
            raise SchemaError(f"quadrics[{q}]: expected a list of entries")
        M = [[Fraction(0)] * n for _ in range(n)]
        seen = set()
        for t, e in enumerate(entries):
            path = f"quadrics[{q}][{t}]"
            if not isinstance(e, list) or len(e) != 4:
                raise SchemaError(f"{path}: expected [i, j, num, den]")
            i, j = _int(e[0], f"{path}[0]"), _int(e[1], f"{path}[1]")
            if not (0 <= i < n and 0 <= j < n):
                raise SchemaError(f"{path}: index out of range for ambient_dim {n}")
            num, den = _int(e[2], f"{path}[2]"), _int(e[3], f"{path}[3]")
            if den == 0:
                raise SchemaError(f"{path}[3]: zero denominator")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise SchemaError(f"{path}: duplicate entry for {key}")
            seen.add(key)
            M[i][j] = M[j][i] = Fraction(num, den)
        forms.append(QuadraticForm(tuple(tuple(r) for r in M)))
    if "base_point" not in doc:
        raise SchemaError("base_point: missing")
    base = _vector(doc["base_point"], n, "base_point")
    if not any(base):
        raise SchemaError("base_point: the zero vector is not a point")
    for q, f in enumerate(forms):
        if f.value(base) != 0:
            raise SchemaError(f"base_point: does not satisfy quadrics[{q}]")
    points = None
    if "samples" in doc:
        if not isinstance(doc["samples"], list):
            raise SchemaError("samples: expected a list of points")
        points = tuple(_vector(p, n, f"samples[{s}]") for s, p in enumerate(doc["samples"]))
        for s, p in enumerate(points):
            for q, f in enumerate(forms):
                if f.value(p) != 0:
                    raise SchemaError(f"samples[{s}]: does not satisfy quadrics[{q}]")
    name = doc.get("name", "custom")
    if not isinstance(name, str):
        raise SchemaError("name: expected a string")
    return VarietyPresentation(
        name=name,
        ambient_dim=n,
        quadrics=QuadraticIdeal.from_forms(forms, n),
        base_point=base,
        points=points if points is not None else (),
    )


def variety_document(V: VarietyPresentation, samples: int = 0, seed: int = 0) -> dict:
    n = V.ambient_dim
    quadrics = []
    for f in V.quadrics.forms:
        entries = []
        for i, j in multiindices(n, 2):
            x = f.matrix[i][j]
            if x:
                entries.append([i, j, x.numerator, x.denominator])
        quadrics.append(entries)
    doc = {
        "schema": VARIETY_SCHEMA,
        "name": V.name,
        "ambient_dim": n,
        "quadrics": quadrics,
        "base_point": [_fmt(x) for x in V.base_point],
    }
    if samples:
        doc["samples"] = [[_fmt(x) for x in p] for p in sample_points(V, samples, seed)]
    return doc


def emit_variety(V: VarietyPresentation, samples: int = 0, seed: int = 0) -> bytes:
    return (json.dumps(variety_document(V, samples, seed), indent=1, sort_keys=True) + "\n").encode()


def parse_centre_file(data: bytes | str, n: int) -> Subspace:
    """Read ``{"schema": "prolab-centre/1", "vectors": [[...], ...]}`` spanning L in Q^n."""
    doc = _load(data)
    if not isinstance(doc, dict):
        raise SchemaError("top level: expected an object")
    schema = doc.get("schema", CENTRE_SCHEMA)
    if schema != CENTRE_SCHEMA:
        raise SchemaError(f"schema: unsupported {schema!r} (expected {CENTRE_SCHEMA!r})")
    vecs = doc.get("vectors")
    if not isinstance(vecs, list) or not vecs:
        raise SchemaError("vectors: expected a nonempty list")
    return span([_vector(v, n, f"vectors[{i}]") for i, v in enumerate(vecs)], n)
