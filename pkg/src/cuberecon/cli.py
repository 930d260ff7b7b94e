"""Command line front door.

Exit codes: 0 pass, 1 fail (including bad input), 2 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .complex import CubeComplex, DistanceMatrix, boundary_distance_matrix
from .errors import CubeError, HypothesisViolation
from .harness import canonical_json, cmd_roundtrip as run_roundtrip, generate, reconstruct_any
from .iso import isomorphic_labeled
from .thickening import shell_configuration_audit, shell_stats, thicken
from .validate import FAIL, INCONCLUSIVE, validate_cat0

EXIT = {"pass": 0, FAIL: 1, INCONCLUSIVE: 2}
GEN_KINDS = {"voxel-random": "cat0", "tree": "tree", "quad2d": "quad2d", "named": "named"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _out_path(args, given: str | None, default_name: str) -> str | None:
    """Explicit path, else a file in ``--out-dir``, else ``None`` for stdout."""
    if given:
        path = given if os.path.isabs(given) or not args.out_dir else os.path.join(args.out_dir, given)
    elif args.out_dir:
        path = os.path.join(args.out_dir, default_name)
    else:
        return None
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _emit(args, text: str, given: str | None, default_name: str) -> None:
    path = _out_path(args, given, default_name)
    if not text.endswith("\n"):
        text += "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _load_complex(path: str) -> CubeComplex:
    try:
        return CubeComplex.from_json(_read(path))
    except json.JSONDecodeError as exc:
        raise CubeError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _load_matrix(path: str) -> DistanceMatrix:
    text = _read(path)
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        return DistanceMatrix(doc["labels"], doc["d"])
    return DistanceMatrix.from_csv(text)


def _matrix_text(D: DistanceMatrix, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"labels": list(D.labels), "d": D.d.tolist()})
    return D.to_csv()


# --------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    kind = GEN_KINDS[args.kind]
    if kind != "named" and args.seed is None:
        args.seed = 0
    X = generate(kind, seed=args.seed, size=args.n, name=args.name)
    _emit(args, canonical_json(X), args.out, f"{args.name or kind}.json")
    return 0


def cmd_validate(args) -> int:
    X = _load_complex(args.input)
    rep = validate_cat0(X, budget=args.budget)
    doc = rep.to_dict()
    for w in doc["witnesses"]:
        w["labels"] = [X.labels[i] for i in w["ids"]]
    if args.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["verdict", "check", "labels", "reason"])
        for w in doc["witnesses"]:
            wr.writerow([rep.verdict, w["check"], " ".join(w["labels"]), w["reason"]])
        if not doc["witnesses"]:
            wr.writerow([rep.verdict, "", "", ""])
        text = buf.getvalue()
    else:
        text = _json(doc)
    _emit(args, text, args.out, "validation." + ("csv" if args.format == "csv" else "json"))
    return EXIT[rep.verdict]


def cmd_distances(args) -> int:
    X = _load_complex(args.input)
    D = boundary_distance_matrix(X, args.dim).sorted()
    fmt = args.format or "csv"
    _emit(args, _matrix_text(D, fmt), args.out, f"distances.{fmt}")
    return 0


def cmd_reconstruct(args) -> int:
    D = _load_matrix(args.input)
    try:
        Y, trace = reconstruct_any(D, args.dim)
    except HypothesisViolation as exc:
        print(f"refused: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _emit(args, canonical_json(Y), args.out, "reconstruction.json")
    if args.trace:
        _emit(args, _json(trace), args.trace, "trace.json")
    return 0


def cmd_isocheck(args) -> int:
    X, Y = _load_complex(args.a), _load_complex(args.b)
    iso = isomorphic_labeled(X, Y, args.dim)
    if iso is None:
        doc = {"isomorphic": False}
    else:
        doc = {"isomorphic": True, "mapping": dict(sorted(iso.label_map(X, Y).items()))}
    _emit(args, _json(doc), args.out, "mapping.json")
    return 0 if iso is not None else 1


def cmd_thicken(args) -> int:
    X = _load_complex(args.input)
    T = thicken(X)
    stats = shell_stats(T, check=False)
    S = T.surface
    doc = T.shell.to_dict() if T.shell is not None else {"shell": None}
    doc["surface"] = {"vertices": S.vertices, "edges": [list(e) for e in S.edges], "faces": [list(f) for f in S.faces]}
    doc["pi"] = dict(sorted(S.pi.items()))
    doc["notes"] = T.notes
    _emit(args, json.dumps(doc, sort_keys=True), args.out, "shell.json")
    audit = shell_configuration_audit(T)
    euler_ok = stats.euler == 2 and 2 * stats.F == stats.E and stats.n_k.get(3, 0) == stats.identity_rhs()
    report = {"stats": stats.to_dict(), "euler": stats.euler, "identity_rhs": stats.identity_rhs(),
              "identities_hold": euler_ok, "audit": audit}
    if args.audit or not args.out:
        _emit(args, _json(report), args.audit, "audit.json")
    return 0 if euler_ok and audit["ok"] else 1


def cmd_roundtrip(args) -> int:
    if args.spec:
        spec = json.loads(_read(args.spec))
    else:
        spec = {"kind": args.kind}
        if args.kind == "named":
            if args.names:
                spec["names"] = args.names
        else:
            lo = args.seed if args.seed is not None else 0
            spec["seeds"] = [lo, lo + args.count]
    report = run_roundtrip(spec, args.jobs, not args.no_timing)
    if args.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["kind", "seed", "name", "verdict", "reconstruction_sha256", "time_s"])
        for c in report["cases"]:
            d = c["case"]
            wr.writerow([d["kind"], d["seed"], d["name"], c["verdict"], c.get("reconstruction_sha256", ""), c.get("time_s", "")])
        text = buf.getvalue()
    else:
        text = _json(report)
    _emit(args, text, args.out, "roundtrip." + ("csv" if args.format == "csv" else "json"))
    agg = report["aggregate"]
    return 0 if agg["ok"] == agg["total"] else 1


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)

    p = _Parser(prog="cuberecon", description="Reconstruct CAT(0) cube complexes from boundary distances.")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--format", choices=["json", "csv"], default=None)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a complex")
    g.add_argument("--kind", choices=sorted(GEN_KINDS), required=True)
    g.add_argument("--n", type=int, default=None, help="size: cubes, tree vertices or squares")
    g.add_argument("--name", default=None)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", parents=[common], help="check the CAT(0) conditions")
    v.add_argument("--in", dest="input", required=True)
    v.add_argument("--out", default=None)
    v.add_argument("--budget", type=int, default=1_000_000)
    v.set_defaults(func=cmd_validate)

    d = sub.add_parser("distances", parents=[common], help="boundary distance matrix")
    d.add_argument("--in", dest="input", required=True)
    d.add_argument("--out", default=None)
    d.add_argument("--dim", type=int, choices=[1, 2, 3], default=None)
    d.set_defaults(func=cmd_distances)

    r = sub.add_parser("reconstruct", parents=[common], help="rebuild a complex from a matrix")
    r.add_argument("--in", dest="input", required=True)
    r.add_argument("--out", default=None)
    r.add_argument("--trace", default=None)
    r.add_argument("--dim", type=int, choices=[1, 2, 3], default=3)
    r.set_defaults(func=cmd_reconstruct)

    i = sub.add_parser("isocheck", parents=[common], help="labelled isomorphism test")
    i.add_argument("--a", required=True)
    i.add_argument("--b", required=True)
    i.add_argument("--out", default=None)
    i.add_argument("--dim", type=int, choices=[1, 2, 3], default=None)
    i.set_defaults(func=cmd_isocheck)

    t = sub.add_parser("thicken", parents=[common], help="build the shell and audit it")
    t.add_argument("--in", dest="input", required=True)
    t.add_argument("--out", default=None)
    t.add_argument("--audit", default=None)
    t.set_defaults(func=cmd_thicken)

    rt = sub.add_parser("roundtrip", parents=[common], help="round-trip experiment")
    rt.add_argument("--spec", default=None, help="JSON corpus description")
    rt.add_argument("--kind", choices=["cat0", "tree", "quad2d", "named"], default="cat0")
    rt.add_argument("--count", type=int, default=200)
    rt.add_argument("--names", nargs="*", default=None)
    rt.add_argument("--out", default=None)
    rt.add_argument("--no-timing", action="store_true", help="omit timing fields")
    rt.set_defaults(func=cmd_roundtrip)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CubeError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
