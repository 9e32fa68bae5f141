"""Battery of verification cases and the versioned report format.

Every case computes one number and compares it with a reference value; the
report records both, together with a one-line statement of the claim the
case checks. Reports are deterministic per (selection, field, seed): cases
are sorted by id and wall times are only recorded on request.
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

from prolab import probes, zoo
from prolab.prolong import prolong

SCHEMA = "prolab-report/1"
CSV_COLUMNS = (
    "id", "group", "subject", "quantity", "k", "field",
    "computed", "expected", "passed", "rows", "cols", "seconds", "claim",
)
MAIN_PROLONG_SEEDS = 20
PROJECTION_SEEDS = 50
GENERAL_RANGE = 1000


class UnknownCase(KeyError):
    pass


class ReportError(ValueError):
    pass


# --------------------------------------------------------------------------
# report records


@dataclass(frozen=True)
class CaseRecord:
    id: str
    group: str
    subject: str
    quantity: str
    k: int | None
    field: str
    computed: int | float
    expected: int | float
    passed: bool
    claim: str
    constraint_shape: tuple[int, int] | None = None
    seconds: float | None = None


@dataclass(frozen=True)
class ProlongationReport:
    invocation: dict
    cases: tuple[CaseRecord, ...]
    schema: str = SCHEMA

    @property
    def summary(self) -> dict:
        passed = sum(c.passed for c in self.cases)
        return {"total": len(self.cases), "passed": passed, "failed": len(self.cases) - passed}

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.cases)


def _enc(x):
    if isinstance(x, float) and math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return x


def _dec(x):
    if x == "-inf":
        return -math.inf
    if x == "inf":
        return math.inf
    return x


def _record_doc(c: CaseRecord) -> dict:
    d = asdict(c)
    d["computed"] = _enc(c.computed)
    d["expected"] = _enc(c.expected)
    d["constraint_shape"] = list(c.constraint_shape) if c.constraint_shape else None
    return d


def report_document(report: ProlongationReport) -> dict:
    return {
        "schema": report.schema,
        "invocation": report.invocation,
        "cases": [_record_doc(c) for c in report.cases],
        "summary": report.summary,
    }


def emit_report(report: ProlongationReport, fmt: str = "json") -> bytes:
    """Serialize as ``json``, ``csv`` (columns ``CSV_COLUMNS``) or ``text``."""
    if fmt == "json":
        return (json.dumps(report_document(report), indent=1, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in report.cases:
            rows, cols = c.constraint_shape or ("", "")
            w.writerow([
                c.id, c.group, c.subject, c.quantity, "" if c.k is None else c.k, c.field,
                _enc(c.computed), _enc(c.expected), int(c.passed), rows, cols,
                "" if c.seconds is None else f"{c.seconds:.3f}", c.claim,
            ])
        return buf.getvalue().encode()
    if fmt == "text":
        lines = []
        for c in report.cases:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(f"{mark} {c.id}: {c.quantity} = {_enc(c.computed)} (expected {_enc(c.expected)})")
        s = report.summary
        lines.append(f"{s['passed']}/{s['total']} passed")
        return ("\n".join(lines) + "\n").encode()
    raise ReportError(f"unknown format {fmt!r}")


def parse_report(data: bytes | str) -> ProlongationReport:
    """Inverse of ``emit_report(..., "json")``."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ReportError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict) or doc.get("schema") != SCHEMA:
        raise ReportError(f"schema: expected {SCHEMA!r}")
    cases = []
    for i, d in enumerate(doc.get("cases", [])):
        try:
            shape = d["constraint_shape"]
            cases.append(CaseRecord(
                id=d["id"], group=d["group"], subject=d["subject"], quantity=d["quantity"],
                k=d["k"], field=d["field"], computed=_dec(d["computed"]),
                expected=_dec(d["expected"]), passed=d["passed"], claim=d["claim"],
                constraint_shape=tuple(shape) if shape else None, seconds=d["seconds"],
            ))
        except (KeyError, TypeError) as e:
            raise ReportError(f"cases[{i}]: missing or malformed field {e}") from None
    report = ProlongationReport(doc.get("invocation", {}), tuple(cases))
    if doc.get("summary") != report.summary:
        raise ReportError("summary: counts do not match the cases")
    return report


# --------------------------------------------------------------------------
# cases


@dataclass(frozen=True)
class Case:
    id: str
    group: str
    subject: str
    quantity: str
    k: int | None
    expected: int | float
    claim: str
    run: Callable = field(repr=False, compare=False)
    uses_field: bool = False


CLAIMS = {
    "ihss-prolong": "for an irreducible Hermitian symmetric VMRT the first prolongation of the cone automorphisms has dimension dim V",
    "k2-vanishing": "the second prolongation of the cone automorphisms of a nondegenerate nonsingular variety vanishes",
    "z-family": "the bundle variety Z in (W x Q) + Sym^2 W has aut of dimension m^2 + km + k^2 and first prolongation Sym^2 W*",
    "hyperplane": "general hyperplane sections of the spinor tenfold and of Gr(2,5) keep a nonzero first prolongation of the tabulated dimension; Segre hyperplane sections have none",
    "secant-table": "secant dimensions of the Hermitian symmetric VMRTs follow the classical table",
    "vmrt-table": "lines through a general point of each VMRT form a variety of the tabulated dimension",
    "projection": "the prolongation killed by a projection centre L matches the closed form in Im(L) and Ker(L)",
    "main-prolong": "projecting from a single general point kills the whole first prolongation",
    "dim-not-one": "no nondegenerate nonsingular variety has a one-dimensional first prolongation",
}

IHSS = (
    "quadric(3)", "quadric(4)", "quadric(5)", "quadric(6)", "quadric(7)",
    "segre(2,2)", "segre(2,3)", "segre(3,3)",
    "veronese(1)", "veronese(2)", "veronese(3)",
    "plucker_gr2(5)", "plucker_gr2(6)",
    "spinor_s5", "cayley_op2",
)
K2 = IHSS[:13]
Z_FAMILY = ((2, 2), (3, 2), (2, 3))
SECANT = (
    "segre(2,2)", "segre(2,3)", "segre(3,3)", "plucker_gr2(5)", "plucker_gr2(6)",
    "veronese(1)", "veronese(2)", "veronese(3)", "veronese(4)",
    "quadric(3)", "quadric(4)", "quadric(5)", "quadric(6)", "quadric(7)",
    "spinor_s5", "cayley_op2",
)
PROJECTION = (("I", (3, 3)), ("II", (6,)), ("III", (4,)), ("Symp", (3, 2)))
MAIN_PROLONG = ("veronese(2)", "segre(2,3)", "symp_vmrt(3,2)", "plucker_gr2(6)")


def _g1_dim(V, k: int, field: str, seed: int):
    if field == "exact":
        r = probes.prolongation_of(V, k)
    else:
        r = prolong(probes.aut_of(V), k, field="modp", seed=seed)
    return r.dim, r.constraint_shape, r.field_used


def _prolong_case(vid: str, k: int):
    def run(field, seed):
        return _g1_dim(zoo.build(vid), k, field, seed)
    return run


def _aut_case(vid: str):
    def run(field, seed):
        return probes.aut_of(zoo.build(vid)).dim, None, "exact"
    return run


def _secant_case(vid: str):
    def run(field, seed):
        return probes.terracini(zoo.build(vid), trials=2, seed=seed).dim, None, "exact"
    return run


def _vmrt_case(vid: str):
    def run(field, seed):
        return probes.vmrt_dimension(zoo.build(vid), trials=2, seed=seed), None, "exact"
    return run


def _projection_case(kind: str, params):
    def run(field, seed):
        bad = 0
        for s in range(PROJECTION_SEEDS):
            L = probes.random_centre(kind, params, seed * PROJECTION_SEEDS + s)
            if not probes.verify_projection_formula(kind, params, L, seed=s).match:
                bad += 1
        return bad, None, "exact"
    return run


def _main_prolong_case(vid: str):
    def run(field, seed):
        import random

        from prolab.linalg import span

        V = zoo.build(vid)
        g1 = probes.prolongation_of(V)
        worst = 0
        for s in range(MAIN_PROLONG_SEEDS):
            rng = random.Random(f"main-prolong|{vid}|{seed}|{s}")
            # wide range: small entries hit proper subvarieties such as S itself
            v = [rng.randint(-GENERAL_RANGE, GENERAL_RANGE) for _ in range(V.ambient_dim)]
            if not any(v):
                v[0] = 1
            worst = max(worst, probes.kill_prolongation(g1, span([v], V.ambient_dim)).dim)
        return worst, None, "exact"
    return run


def _dim_not_one(field, seed):
    ones = sum(1 for vid in zoo.DEFAULT_IDS if _g1_dim(zoo.build(vid), 1, field, seed)[0] == 1)
    return ones, None, "exact" if field == "exact" else "mod-p"


def _registry() -> dict[str, Case]:
    cases = []

    def add(group, subject, quantity, k, expected, run, uses_field=False, suffix=None):
        cid = f"{group}/{suffix or subject}"
        cases.append(Case(cid, group, subject, quantity, k, expected, CLAIMS[group], run, uses_field))

    for vid in IHSS:
        add("ihss-prolong", vid, "dim g^(1)", 1, zoo.build(vid).ambient_dim, _prolong_case(vid, 1), True)
    for vid in K2:
        add("k2-vanishing", vid, "dim g^(2)", 2, 0, _prolong_case(vid, 2), True)
    for k, m in Z_FAMILY:
        vid = f"symp_vmrt({k},{m})"
        add("z-family", vid, "dim aut", None, m * m + k * m + k * k, _aut_case(vid), suffix=f"aut/{vid}")
        add("z-family", vid, "dim g^(1)", 1, k * (k + 1) // 2, _prolong_case(vid, 1), True, suffix=f"g1/{vid}")
    for vid, aut, g1 in (("s5_hyperplane", 31, 7), ("gr25_hyperplane", 16, 5), ("segre_hyperplane(3,3)", None, 0)):
        if aut is not None:
            add("hyperplane", vid, "dim aut", None, aut, _aut_case(vid), suffix=f"aut/{vid}")
        add("hyperplane", vid, "dim g^(1)", 1, g1, _prolong_case(vid, 1), True, suffix=f"g1/{vid}")
    for vid in SECANT:
        add("secant-table", vid, "dim Sec(S)", None, zoo.build(vid).expected.dim_sec, _secant_case(vid))
    for vid in zoo.DEFAULT_IDS:
        e = zoo.build(vid).expected.vmrt
        if e is not None:
            add("vmrt-table", vid, "dim lines through a point", None, e, _vmrt_case(vid))
    for kind, params in PROJECTION:
        vid = probes.PROJECTION_VARIETY[kind](*params)
        add("projection", vid, f"type {kind} formula mismatches over {PROJECTION_SEEDS} centres", 1, 0,
            _projection_case(kind, params), suffix=kind)
    for vid in MAIN_PROLONG:
        add("main-prolong", vid, f"max dim killed g^(1) over {MAIN_PROLONG_SEEDS} points", 1, 0,
            _main_prolong_case(vid))
    add("dim-not-one", "zoo", "varieties with dim g^(1) = 1", 1, 0, _dim_not_one, True, suffix="zoo")
    return {c.id: c for c in cases}


_REGISTRY: dict[str, Case] | None = None


def registry() -> dict[str, Case]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _registry()
    return _REGISTRY


GROUPS = tuple(CLAIMS) + ("empty",)


def _split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    parts.append("".join(cur))
    return parts


def select(selection: str | None) -> list[str]:
    """Case ids for a comma-separated list of group names and case ids (``all`` by default)."""
    reg = registry()
    if not selection or selection.strip() == "all":
        return sorted(reg)
    out = set()
    for item in (s.strip() for s in _split_top_level(selection)):
        if not item:
            continue
        if item == "empty":
            continue
        if item in reg:
            out.add(item)
        elif item in CLAIMS:
            out.update(c for c in reg if reg[c].group == item)
        else:
            raise UnknownCase(item)
    return sorted(out)


def run_case(case_id: str, field: str = "exact", seed: int = 0, timings: bool = False) -> CaseRecord:
    c = registry()[case_id]
    t0 = time.perf_counter()
    computed, shape, used = c.run(field, seed)
    dt = time.perf_counter() - t0
    return CaseRecord(
        id=c.id, group=c.group, subject=c.subject, quantity=c.quantity, k=c.k,
        field=used, computed=computed, expected=c.expected, passed=computed == c.expected,
        claim=c.claim, constraint_shape=tuple(shape) if shape else None,
        seconds=round(dt, 3) if timings else None,
    )


def _run_star(args):
    return run_case(*args)


def run_battery(selection: str | None = None, field: str = "exact", seed: int = 0,
                jobs: int = 1, timings: bool = False) -> ProlongationReport:
    if field not in ("exact", "modp"):
        raise ReportError(f"unknown field {field!r}")
    ids = select(selection)
    args = [(cid, field, seed, timings) for cid in ids]
    if jobs > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            records = list(ex.map(_run_star, args))
    else:
        records = [_run_star(a) for a in args]
    records.sort(key=lambda r: r.id)
    invocation = {"command": "battery", "selection": selection or "all", "field": field, "seed": seed}
    return ProlongationReport(invocation, tuple(records))
