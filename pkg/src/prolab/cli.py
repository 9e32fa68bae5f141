"""Command-line driver: ``prolab variety|prolong|secant|vmrt|project|battery``.

Exit codes: 0 when every check passes, 1 when some check fails, 2 on usage
errors (bad ids, unreadable or malformed input files).
"""
from __future__ import annotations

import argparse
import random
import re
import sys

from prolab import algebras, io, probes, report, zoo
from prolab.linalg import Subspace, span
from prolab.prolong import DEFAULT_CAP, ProlongationTooLarge, prolong
from prolab.symtensor import sym_dim

ALGEBRAS = {"gl": algebras.gl, "sl": algebras.sl, "so": algebras.so, "co": algebras.co, "sp": algebras.sp}


class UsageError(Exception):
    pass


def _variety(args) -> zoo.VarietyPresentation:
    if getattr(args, "file", None):
        try:
            with open(args.file, "rb") as fh:
                return io.parse_variety_file(fh.read())
        except OSError as e:
            raise UsageError(f"cannot read {args.file}: {e.strerror}") from None
    if not args.variety:
        raise UsageError("give --variety ID or --file FILE")
    return zoo.build(args.variety)


def _algebra(text: str) -> Subspace:
    m = re.fullmatch(r"\s*([a-z]+)\s*\(\s*(\d+)\s*\)\s*", text)
    if not m or m.group(1) not in ALGEBRAS:
        raise UsageError(f"unknown algebra {text!r}; use one of {', '.join(f'{a}(n)' for a in ALGEBRAS)}")
    try:
        return ALGEBRAS[m.group(1)](int(m.group(2)))
    except ValueError as e:
        raise UsageError(str(e)) from None


def _fmt_dim(x) -> str:
    return "no lines" if x == zoo.NO_LINES else str(x)


# --------------------------------------------------------------------------
# subcommands


def cmd_variety_list(args) -> int:
    for vid in zoo.DEFAULT_IDS:
        V = zoo.build(vid)
        e = V.expected
        print(f"{vid:24s} n={V.ambient_dim:<3d} I2={V.quadrics.dim:<4d} dim S={e.dim_S}")
    return 0


def cmd_variety_show(args) -> int:
    V = _variety(args)
    if args.json:
        sys.stdout.write(io.emit_variety(V, samples=args.samples, seed=args.seed).decode())
        return 0
    print(f"name         {V.name}")
    print(f"ambient dim  {V.ambient_dim}")
    print(f"quadrics     {V.quadrics.dim}")
    print(f"base point   [{', '.join(map(str, V.base_point))}]")
    for key, val in vars(V.expected).items():
        if val is not None:
            print(f"expected {key:8s} {_fmt_dim(val)}")
    return 0


def cmd_variety_check(args) -> int:
    V = _variety(args)
    n = V.ambient_dim
    checks = []
    checks.append(("base point on the cone", V.quadrics.vanishes_at(V.base_point)))
    try:
        count = min(args.samples, len(V.points)) if V.points else args.samples
        pts = zoo.sample_points(V, count, args.seed)
    except zoo.SamplingError as e:
        print(f"note: {e}; checks on sampled points skipped")
        pts = []
    if pts:
        checks.append((f"{len(pts)} samples on the cone", all(V.quadrics.vanishes_at(p) for p in pts)))
        if len(pts) >= n:
            checks.append(("samples span V", span(pts, n).dim == n))
    aut = probes.aut_of(V)
    checks.append(("identity in cone_aut", aut.contains(algebras.identity_vector(n))))
    if V.expected.dim_S is not None:
        T = probes.tangent_space(V.quadrics, V.base_point)
        checks.append((f"tangent dim {T.dim} = dim S + 1", T.dim == V.expected.dim_S + 1))
    if V.expected.dim_aut is not None:
        checks.append((f"dim cone_aut {aut.dim}", aut.dim == V.expected.dim_aut))
    ok = True
    for label, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {label}")
        ok &= passed
    return 0 if ok else 1


def cmd_prolong(args) -> int:
    if args.algebra:
        g = _algebra(args.algebra)
        label = args.algebra
    else:
        V = _variety(args)
        g = probes.aut_of(V)
        label = f"cone_aut({V.name})"
        print(f"dim {label} = {g.dim}")
    n = algebras.endo_dim(g)
    field = args.field
    unknowns = sym_dim(n, args.k + 1) * n
    if field == "exact" and unknowns > args.cap and args.method != "recursive":
        print(f"warning: {unknowns} unknowns exceed the cap {args.cap}; switching to mod-p", file=sys.stderr)
        field = "modp"
    try:
        r = prolong(g, args.k, field=field, method=args.method, prime=args.prime, seed=args.seed, cap=args.cap)
    except ProlongationTooLarge as e:
        raise UsageError(str(e)) from None
    rows, cols = r.constraint_shape
    print(f"dim {label}^({args.k}) = {r.dim}  [{r.field_used}, {r.method}, constraints {rows}x{cols}]")
    return 0


def cmd_secant(args) -> int:
    V = _variety(args)
    res = probes.terracini(V, trials=args.trials, seed=args.seed)
    print(f"dim Sec({V.name}) = {res.dim}  [trials {list(res.trials)}]")
    e = V.expected.dim_sec
    if e is not None:
        print(f"{'PASS' if e == res.dim else 'FAIL'} expected {e}")
        return 0 if e == res.dim else 1
    return 0


def cmd_vmrt(args) -> int:
    V = _variety(args)
    d = probes.vmrt_dimension(V, trials=args.trials, seed=args.seed)
    print(f"lines through a general point of {V.name}: {_fmt_dim(d)}")
    e = V.expected.vmrt
    if e is not None:
        print(f"{'PASS' if e == d else 'FAIL'} expected {_fmt_dim(e)}")
        return 0 if e == d else 1
    return 0


def _projection_kind(name: str):
    try:
        base, params = zoo.parse_id(name)
    except zoo.ParameterError:
        return None
    if base == "segre":
        return "I", params
    if base == "plucker_gr2":
        return "II", params
    if base == "veronese":
        return "III", (params[0] + 1,)
    if base == "symp_vmrt":
        return "Symp", params
    return None


def cmd_project(args) -> int:
    V = _variety(args)
    n = V.ambient_dim
    if args.l_file:
        try:
            with open(args.l_file, "rb") as fh:
                L = io.parse_centre_file(fh.read(), n)
        except OSError as e:
            raise UsageError(f"cannot read {args.l_file}: {e.strerror}") from None
    else:
        if not 1 <= args.l_random <= n:
            raise UsageError(f"--l-random must be between 1 and {n}")
        rng = random.Random(f"project|{V.name}|{args.seed}")
        L = span([[rng.randint(-5, 5) for _ in range(n)] for _ in range(args.l_random)], n)
    g1 = probes.prolongation_of(V)
    killed = probes.kill_prolongation(g1, L)
    print(f"dim L = {L.dim}; dim g^(1) = {g1.dim}; killed by L: {killed.dim}")
    found = _projection_kind(V.name) if not getattr(args, "file", None) else None
    if found:
        kind, params = found
        rep = probes.verify_projection_formula(kind, params, L, seed=args.seed)
        print(f"type {kind} closed form: {rep.formula_dim} (dim Im = {rep.image_dim}"
              + (f", dim Ker = {rep.kernel_dim}" if rep.kernel_dim is not None else "") + ")")
        print(f"{'PASS' if rep.match else 'FAIL'} engine agrees with the closed form")
        return 0 if rep.match else 1
    return 0


def cmd_battery(args) -> int:
    try:
        rep = report.run_battery(args.select, field=args.field, seed=args.seed, jobs=args.jobs,
                                 timings=args.timings)
    except report.UnknownCase as e:
        raise UsageError(f"unknown case or group {e.args[0]!r}; groups: {', '.join(report.GROUPS)}") from None
    data = report.emit_report(rep, args.format)
    if args.out and args.out != "-":
        with open(args.out, "wb") as fh:
            fh.write(data)
        s = rep.summary
        print(f"{s['passed']}/{s['total']} passed; report written to {args.out}")
    else:
        sys.stdout.buffer.write(data)
    return 0 if rep.ok else 1


# --------------------------------------------------------------------------
# parser


def _add_variety(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--variety", help="zoo id such as segre(3,3) or spinor_s5")
    g.add_argument("--file", help="variety JSON document (prolab-variety/1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prolab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("variety", help="list, show or check varieties")
    vsub = v.add_subparsers(dest="action", required=True)
    vsub.add_parser("list", help="zoo ids with ambient dimension").set_defaults(func=cmd_variety_list)
    for name, func, help_ in (("show", cmd_variety_show, "describe a variety"),
                              ("check", cmd_variety_check, "run the presentation invariants")):
        p = vsub.add_parser(name, help=help_)
        p.add_argument("id", nargs="?", help="zoo id (alternative to --variety)")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--variety")
        g.add_argument("--file")
        p.add_argument("--samples", type=int, default=30 if name == "check" else 0)
        p.add_argument("--seed", type=int, default=0)
        if name == "show":
            p.add_argument("--json", action="store_true", help="emit a prolab-variety/1 document")
        p.set_defaults(func=func)

    p = sub.add_parser("prolong", help="dimension of the k-th prolongation")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--algebra", help="gl(n), sl(n), so(n), co(n) or sp(n)")
    g.add_argument("--variety", help="cone automorphisms of a zoo variety")
    g.add_argument("--file", help="cone automorphisms of a variety JSON document")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--field", choices=("exact", "modp"), default="exact")
    p.add_argument("--prime", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("auto", "direct", "recursive"), default="auto")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="unknowns allowed for exact elimination")
    p.set_defaults(func=cmd_prolong)

    p = sub.add_parser("secant", help="secant dimension by tangent spaces at two points")
    _add_variety(p)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_secant)

    p = sub.add_parser("vmrt", help="dimension of the lines through a general point")
    _add_variety(p)
    p.add_argument("--trials", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_vmrt)

    p = sub.add_parser("project", help="prolongation killed by a projection centre L")
    _add_variety(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--l-random", type=int, metavar="D", help="random L of dimension D")
    g.add_argument("--l-file", metavar="F", help="centre JSON document (prolab-centre/1)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("battery", help="run verification cases and write a report")
    p.add_argument("--select", help="comma-separated groups or case ids (default: all)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--field", choices=("exact", "modp"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="record wall time per case")
    p.set_defaults(func=cmd_battery)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "id", None):
        if args.variety or args.file:
            ap.error("give the variety once")
        args.variety = args.id
    if args.command == "variety" and args.action != "list" and not (args.variety or args.file):
        ap.error("variety id or --file required")
    try:
        return args.func(args)
    except (UsageError, zoo.ParameterError, io.SchemaError, probes.ProbeError) as e:
        print(f"prolab: error: {e}", file=sys.stderr)
        return 2
    except zoo.SamplingError as e:
        print(f"prolab: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
