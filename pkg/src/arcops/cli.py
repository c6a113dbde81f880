"""Command line interface: `arcops <command> ...`.

Every command prints one JSON document carrying "schema_version".  Exit
codes: 0 success, 1 verification failure, 2 usage or domain error, 3 bad
input file.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import formats
from .correlators import ArityMismatch, angle_slots, y_partitioned
from .formats import FormatError, SCHEMA_VERSION, dumps, rational_to_str
from .frobenius import NondegeneracyError, rank
from .graph_core import (FAMILIES, DomainError, StructuralError, canonical_ribbon, classify,
                         differential, dual_ribbon, enumerate_graphs, validate)
from .partition_gluing import compose_graphs, expand

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_FORMAT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(obj: dict) -> None:
    sys.stdout.write(dumps({"schema_version": SCHEMA_VERSION, **obj}))


def _load_graph(path: str):
    try:
        return formats.load_graph(path)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


def _load_algebra(path: str):
    try:
        return formats.load_algebra(path)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc


# ----- commands ----------------------------------------------------------

def cmd_validate(args) -> int:
    rep = validate(_load_graph(args.graph))
    _emit({"command": "validate", "ok": rep.ok, "violations": list(rep.violations)})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_classify(args) -> int:
    c = classify(_load_graph(args.graph), require_io=args.io)
    out = {"command": "classify", "exhaustive": c.exhaustive,
           "quasi_filling": c.quasi_filling, "twisted_at": sorted(c.twisted_at)}
    if c.in_out_only is not None:
        out.update(in_out_only=c.in_out_only, hits_all_in=c.hits_all_in,
                   untwisted_at_in=c.untwisted_at_in)
    _emit(out)
    return EXIT_OK


def cmd_dual(args) -> int:
    gamma = canonical_ribbon(dual_ribbon(_load_graph(args.graph)))
    _emit({"command": "dual", "ribbon": formats.ribbon_to_dict(gamma)})
    return EXIT_OK


def cmd_expand(args) -> int:
    x = expand(_load_graph(args.graph), args.weight, angle=args.angle)
    body = formats.formal_sum_to_dict(x, weight_cap=args.weight)
    body.pop("schema_version")
    _emit({"command": "expand", **body})
    return EXIT_OK


def cmd_glue(args) -> int:
    g1, g2 = _load_graph(args.g1), _load_graph(args.g2)
    for lab, g in ((args.i, g1), (args.j, g2)):
        if not 0 <= lab < g.n_boundaries:
            raise UsageError(f"boundary {lab} out of range")
    x = compose_graphs(g1, args.i, g2, args.j, mode=args.mode, angle=args.angle)
    body = formats.formal_sum_to_dict(x)
    body.pop("schema_version")
    _emit({"command": "glue", "mode": args.mode, **body})
    return EXIT_OK


def cmd_diff(args) -> int:
    x = differential(_load_graph(args.graph), args.family)
    terms = [{"coeff": int(c), "graph": formats.graph_to_dict(g)} for g, c in x]
    _emit({"command": "diff", "family": args.family, "terms": terms})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    gs = enumerate_graphs(args.genus, args.boundaries, args.edges, args.family)
    _emit({"command": "enumerate", "genus": args.genus, "boundaries": args.boundaries,
           "edges": args.edges, "family": args.family, "count": len(gs),
           "graphs": [formats.graph_to_dict(g) for g in gs]})
    return EXIT_OK


def _element(A, raw) -> list:
    if isinstance(raw, str):
        if raw not in A.names:
            raise FormatError(f"unknown basis element {raw!r}")
        v = [Fraction(0)] * A.dim
        v[A.names.index(raw)] = Fraction(1)
        return v
    if isinstance(raw, list) and len(raw) == A.dim:
        return [formats.parse_rational(c) for c in raw]
    raise FormatError(f"element must be a basis name or {A.dim} rationals")


def _slot_names(g) -> dict:
    # flag position -> (boundary label, index among the marked flags there)
    names, seen = {}, {}
    slots = set(angle_slots(g))
    pos = 0
    for lab, flags in enumerate(g.boundaries):
        for _ in flags:
            if pos in slots:
                names[pos] = (lab, seen.get(lab, 0))
                seen[lab] = seen.get(lab, 0) + 1
            pos += 1
    return names


def cmd_correlate(args) -> int:
    g = _load_graph(args.graph)
    A = _load_algebra(args.algebra)
    form = y_partitioned(A, g)
    names = _slot_names(g)
    if args.inputs is None:
        entries = [[*idx, rational_to_str(v)] for idx, v in sorted(form.table.items()) if v]
        _emit({"command": "correlate", "slots": [list(names[s]) for s in form.slots],
               "dim": A.dim, "entries": entries})
        return EXIT_OK
    try:
        with open(args.inputs, encoding="utf-8") as fh:
            doc = formats.loads(fh.read())
    except OSError as exc:
        raise FormatError(f"cannot read {args.inputs}: {exc.strerror}") from exc
    raw = doc.get("inputs") if isinstance(doc, dict) else None
    if not isinstance(raw, dict):
        raise FormatError('inputs file needs an "inputs" object')
    inputs = {}
    for pos, (lab, k) in names.items():
        vals = raw.get(str(lab))
        if not isinstance(vals, list) or len(vals) <= k:
            raise FormatError(f"boundary {lab} needs one element per marked angle")
        inputs[pos] = _element(A, vals[k])
    for key, vals in raw.items():
        want = sum(1 for lab, _ in names.values() if str(lab) == key)
        if not isinstance(vals, list) or len(vals) != want:
            raise FormatError(f"boundary {key} expects {want} elements")
    _emit({"command": "correlate", "value": rational_to_str(form.evaluate(inputs))})
    return EXIT_OK


def _slug(text: str) -> str:
    keep = "".join(ch if ch.isalnum() else "-" for ch in text.lower())
    return "-".join(p for p in keep.split("-") if p)


def cmd_verify(args) -> int:
    from .suites import REGISTRY, run_suites
    names = [args.suite]
    if args.suite != "all" and args.suite not in REGISTRY:
        raise UsageError(f"unknown suite {args.suite!r}; choose from all, {', '.join(REGISTRY)}")
    reports = run_suites(names, args.corpus_size)
    ok = all(r.passed for r in reports)
    written = []
    for r in reports:
        for c in r.checks:
            if c.counterexample is None or args.counterexample_dir is None:
                continue
            os.makedirs(args.counterexample_dir, exist_ok=True)
            path = os.path.join(args.counterexample_dir, f"{r.suite}__{_slug(c.name)}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dumps({"schema_version": SCHEMA_VERSION, "suite": r.suite,
                                "check": c.name, "counterexample": c.counterexample}))
            written.append(path)
    out = {"command": "verify", "status": "pass" if ok else "fail",
           "suites": [r.to_dict(args.timing) for r in reports]}
    if written:
        out["counterexample_files"] = written
    _emit(out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_homology_cells(args) -> int:
    gs = enumerate_graphs(args.genus, args.boundaries, args.edges, "quasi_filling")
    by_k: dict = {}
    for g in gs:
        by_k.setdefault(g.n_arcs, []).append(g)
    ks = sorted(by_k)
    index = {k: {g: i for i, g in enumerate(by_k[k])} for k in ks}
    mats, stray = {}, 0
    for k in ks:
        if k - 1 not in index:
            continue
        rows = [[Fraction(0)] * len(by_k[k]) for _ in by_k[k - 1]]
        for col, g in enumerate(by_k[k]):
            for h, c in differential(g, "quasi_filling"):
                if h in index[k - 1]:
                    rows[index[k - 1][h]][col] += c
                else:
                    stray += 1
        mats[k] = rows
    ranks = {k: rank(m) if m and m[0] else 0 for k, m in mats.items()}
    dd_zero = True
    for k in ks:
        if k in mats and k - 1 in mats:
            lo, hi = mats[k - 1], mats[k]
            for r in range(len(lo)):
                for c in range(len(hi[0])):
                    if sum(lo[r][m] * hi[m][c] for m in range(len(hi))):
                        dd_zero = False
    cells = {str(k): len(by_k[k]) for k in ks}
    betti = {}
    for k in ks:
        kernel = len(by_k[k]) - ranks.get(k, 0)
        betti[str(k)] = kernel - ranks.get(k + 1, 0)
    ok = dd_zero and stray == 0
    _emit({"command": "homology-cells", "genus": args.genus, "boundaries": args.boundaries,
           "edges": args.edges, "cells": cells,
           "ranks": {str(k): v for k, v in sorted(ranks.items())},
           "betti": betti, "d_squared_zero": dd_zero, "stray_terms": stray,
           "status": "pass" if ok else "fail"})
    return EXIT_OK if ok else EXIT_FAIL


# ----- parser ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcops", description="Arc graph operations and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the invariants of a graph file")
    s.add_argument("graph")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("classify", help="family membership and twisted boundaries")
    s.add_argument("graph")
    s.add_argument("--io", action="store_true", help="require an in/out marking")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("dual", help="dual marked ribbon graph of a quasi-filling graph")
    s.add_argument("graph")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("expand", help="partitioning operator up to a total weight")
    s.add_argument("graph")
    s.add_argument("--weight", type=int, required=True)
    s.add_argument("--angle", action="store_true", help="angle marked partitioning")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("glue", help="glue boundary 0 of g2 (or --j) to boundary i of g1")
    s.add_argument("g1")
    s.add_argument("i", type=int)
    s.add_argument("g2")
    s.add_argument("--j", type=int, default=0)
    s.add_argument("--mode", choices=("algebraic", "topological"), default="algebraic")
    s.add_argument("--angle", action="store_true")
    s.set_defaults(func=cmd_glue)

    s = sub.add_parser("diff", help="graph differential in a family")
    s.add_argument("graph")
    s.add_argument("--family", choices=FAMILIES, default="all")
    s.set_defaults(func=cmd_diff)

    s = sub.add_parser("enumerate", help="all graphs of a family up to an edge count")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--boundaries", type=int, required=True,
                   help="n: the surface has boundaries 0..n")
    s.add_argument("--edges", type=int, required=True)
    s.add_argument("--family", choices=FAMILIES, default="all")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("correlate", help="correlator of a graph on a Frobenius algebra")
    s.add_argument("graph")
    s.add_argument("algebra")
    s.add_argument("--inputs", help='JSON {"inputs": {"<label>": [element, ...]}}')
    s.set_defaults(func=cmd_correlate)

    s = sub.add_parser("verify", help="run a verification suite (or all)")
    s.add_argument("suite")
    s.add_argument("--corpus-size", choices=("small", "full"), default="full")
    s.add_argument("--timing", action="store_true", help="include wall clock seconds")
    s.add_argument("--counterexample-dir", default="counterexamples",
                   help="where failing checks write their counterexample")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("homology-cells", help="ranks of the quasi-filling cell differential")
    s.add_argument("--genus", type=int, required=True)
    s.add_argument("--boundaries", type=int, required=True)
    s.add_argument("--edges", type=int, default=4)
    s.set_defaults(func=cmd_homology_cells)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("weight", "edges", "genus", "boundaries"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            parser.print_usage(sys.stderr)
            print(f"arcops: --{name} must be nonnegative", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.func(args)
    except (FormatError, StructuralError) as exc:
        print(f"arcops: input error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (UsageError, DomainError, ArityMismatch, NondegeneracyError) as exc:
        print(f"arcops: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
