"""``jointslab`` command line: generate, detect, verify, check-bound, count, report."""
from __future__ import annotations

import argparse
import json
import sys

from . import configs as C
from . import formats as fmt
from .algebra import default_field, field_from_descriptor
from .combinatorics import ColoredGraph, UniformHypergraph, count_rainbow_triangles, count_simplices
from .errors import ConfigParseError, JointsLabError
from .pipeline import MODES, RunReport, certificate_record, verify
from .variational import THEOREMS, certify_bound

GENERATE_KINDS = ("joints", "multijoints-k4", "flatjoints", "from-graph")


def _field(text):
    return default_field() if text is None else field_from_descriptor(text)


def summary(cfg) -> str:
    counts = cfg.counts()
    if isinstance(cfg, C.MultijointsConfiguration):
        sizes = cfg.family_sizes
        if len(set(sizes)) == 1:
            fam = "=".join(f"L{i + 1}" for i in range(len(sizes))) + f"={sizes[0]}"
        else:
            fam = " ".join(f"L{i + 1}={x}" for i, x in enumerate(sizes))
        return f"{fam} J={cfg.num_joints}"
    return " ".join(f"{k}={v}" for k, v in counts.items() if k != "J") + f" J={counts['J']}"


def cmd_generate(args) -> int:
    F = _field(args.field)
    if args.kind == "joints":
        cfg = C.generate_generic_hyperplane_config(args.k, args.d, F, seed=args.seed)
    elif args.kind == "multijoints-k4":
        cfg = C.generate_k4_blowup_multijoints(args.k, F)
    elif args.kind == "flatjoints":
        if args.m is None:
            raise SystemExit("--m is required for flatjoints")
        cfg = C.generate_generic_flat_config(args.k, args.d, args.m, F,
                                             seed=None if args.seed == 0 else args.seed)
    else:
        if args.graph is None:
            raise SystemExit("--graph is required for from-graph")
        g = fmt.load_graph(args.graph)
        k = g.vertices
        if isinstance(g, UniformHypergraph):
            cfg = C.generate_from_hypergraph(k, g.edges, g.arity + 1, F, seed=args.seed)
        else:
            cfg = C.generate_from_colored_graph(k, g.colors, F, seed=args.seed)
    if args.out:
        fmt.dump_config(cfg, args.out)
    print(summary(cfg))
    return 0


def cmd_detect(args) -> int:
    doc = fmt.load_document(args.config)
    if isinstance(doc, dict):
        doc = {k: v for k, v in doc.items() if k != "joints"}
    cfg = fmt.document_to_config(doc, args.config)
    if args.out:
        fmt.dump_config(cfg, args.out)
    print(summary(cfg))
    return 0


def _emit(report: RunReport, json_path) -> int:
    print(report.to_text())
    if json_path:
        fmt.dump_json(report.to_json(), json_path)
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    doc = fmt.load_document(args.config)
    cfg = fmt.document_to_config(doc, args.config)
    report = verify(cfg, fmt.digest(doc), args.mode, args.n, args.n_cap, args.jobs)
    return _emit(report, args.json)


def cmd_check_bound(args) -> int:
    if args.config:
        doc = fmt.load_document(args.config)
        cfg = fmt.document_to_config(doc, args.config)
        digest = fmt.digest(doc)
        if isinstance(cfg, C.MultijointsConfiguration):
            J, L, d = cfg.num_joints, list(cfg.family_sizes), cfg.d
        elif isinstance(cfg, C.FlatJointsConfiguration):
            J, L, d = cfg.num_joints, len(cfg.lines), cfg.d
            args.m = cfg.m if args.m is None else args.m
            args.F = len(cfg.flats) if args.F is None else args.F
        else:
            J, L, d = cfg.num_joints, cfg.num_lines, cfg.d
    else:
        if args.J is None or args.L is None:
            raise SystemExit("give --config or both --J and --L")
        J, L, d = args.J, args.L, args.d
        digest = fmt.digest({"J": J, "L": L, "d": d, "m": args.m, "F": args.F})
    if args.theorem in ("main", "flats"):
        if isinstance(L, list):
            if len(L) != 1:
                raise SystemExit(f"--theorem {args.theorem} takes a single line count")
            L = L[0]
    elif not isinstance(L, list):
        L = [L]
    cert = certify_bound(args.theorem, J, L, d, args.m, args.F)
    report = RunReport(digest, "counts", None)
    report.add(certificate_record(cert, f"{args.theorem} bound"))
    return _emit(report, args.json)


def cmd_count(args) -> int:
    g = fmt.load_graph(args.graph)
    if args.rainbow:
        if not isinstance(g, ColoredGraph):
            raise SystemExit("--rainbow needs a colored-graph document")
        print(count_rainbow_triangles(g))
    else:
        if not isinstance(g, UniformHypergraph):
            raise SystemExit("--simplices needs a hypergraph document")
        print(count_simplices(g))
    return 0


def cmd_report(args) -> int:
    try:
        doc = json.loads(open(args.report).read())
        report = RunReport.from_json(doc)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigParseError(args.report, f"not a run report: {exc}") from exc
    print(report.to_text())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jointslab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build a generic configuration")
    g.add_argument("--kind", choices=GENERATE_KINDS, default="joints")
    g.add_argument("--k", type=int, default=4, help="hyperplanes (or blow-up factor)")
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--m", type=int)
    g.add_argument("--field", help="'rational' or 'prime:P' (default from JOINTSLAB_PRIME)")
    g.add_argument("--graph", help="graph or hypergraph document for --kind from-graph")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="write the configuration document here")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("detect", help="recompute joints from the lines of a document")
    d.add_argument("config")
    d.add_argument("--out")
    d.set_defaults(func=cmd_detect)

    v = sub.add_parser("verify", help="run the full verification chain")
    v.add_argument("config")
    v.add_argument("--n", type=int, help="rounding order (default 10 x max joints per line)")
    v.add_argument("--n-cap", type=int, help="largest n used for constraint matrices")
    v.add_argument("--mode", choices=MODES, default="all")
    v.add_argument("--json", help="also write the report as JSON")
    v.add_argument("--jobs", type=int, default=1)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("check-bound", help="exact integer form of a bound")
    b.add_argument("--theorem", choices=THEOREMS, default="main")
    b.add_argument("--config")
    b.add_argument("--J", type=int)
    b.add_argument("--L", type=int, nargs="+")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--m", type=int)
    b.add_argument("--F", type=int)
    b.add_argument("--json")
    b.set_defaults(func=cmd_check_bound)

    c = sub.add_parser("count", help="rainbow triangles or simplices of a graph document")
    grp = c.add_mutually_exclusive_group(required=True)
    grp.add_argument("--rainbow", action="store_true")
    grp.add_argument("--simplices", action="store_true")
    c.add_argument("graph")
    c.set_defaults(func=cmd_count)

    r = sub.add_parser("report", help="render a JSON run report as text")
    r.add_argument("report")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (JointsLabError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
