"""JSON file formats for graphs, formal sums, ribbon graphs and algebras."""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .graph_core import (ANGLE, ARC, BOUNDARY, ArcGraph, MarkedRibbonGraph,
                         Region, StructuralError)

SCHEMA_VERSION = 1


class FormatError(ValueError):
    """File content does not follow the documented layout."""


def _require(obj: dict, key: str, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"missing field {key!r}")
    val = obj[key]
    if kind is not None and not isinstance(val, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return val


# ----- rationals ---------------------------------------------------------

def rational_to_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, bool):
        raise FormatError("booleans are not rationals")
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise FormatError(f"rational must be a string, got {s!r}")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {s!r}") from exc


# ----- arc graphs --------------------------------------------------------

def _side_to_json(side) -> dict:
    kind, ref = side
    return {kind: ref}


def _side_from_json(obj) -> tuple:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise FormatError(f"bad side {obj!r}")
    (kind, ref), = obj.items()
    if kind not in (ARC, ANGLE, BOUNDARY):
        raise FormatError(f"unknown side kind {kind!r}")
    if kind == BOUNDARY and not isinstance(ref, int):
        raise FormatError("boundary side must name an integer label")
    if kind != BOUNDARY and not isinstance(ref, str):
        raise FormatError("arc and angle sides must name a flag")
    return (kind, ref)


def graph_to_dict(g: ArcGraph) -> dict:
    out: dict[str, Any] = {
        "boundaries": [{"label": lab, "flags": list(fl)}
                       for lab, fl in enumerate(g.boundaries)],
        "arcs": [list(a) for a in g.arcs],
        "regions": [{"genus": r.genus,
                     "cycles": [[_side_to_json(s) for s in cyc] for cyc in r.cycles]}
                    for r in g.regions],
        "genus": g.genus,
    }
    if g.angle_marks is not None:
        out["angle_marks"] = {f: m for f, m in g.angle_marks}
    if g.io is not None:
        out["io"] = {str(lab): x for lab, x in enumerate(g.io)}
    return out


def graph_from_dict(obj: dict) -> ArcGraph:
    """Parse a graph object.  A missing "genus" is solved from the Euler identity."""
    bnds = _require(obj, "boundaries", list)
    by_label = {}
    for b in bnds:
        lab = _require(b, "label", int)
        flags = _require(b, "flags", list)
        if lab in by_label:
            raise FormatError(f"boundary label {lab} repeated")
        if not all(isinstance(f, str) for f in flags):
            raise FormatError("flag ids must be strings")
        by_label[lab] = tuple(flags)
    if sorted(by_label) != list(range(len(by_label))):
        raise FormatError("boundary labels must be 0..n")
    boundaries = tuple(by_label[k] for k in range(len(by_label)))
    arcs = []
    for a in _require(obj, "arcs", list):
        if not isinstance(a, list) or len(a) != 2:
            raise FormatError(f"arc {a!r} must be a pair of flag ids")
        arcs.append(tuple(a))
    regions = []
    for r in _require(obj, "regions", list):
        genus = _require(r, "genus", int)
        cycles = tuple(tuple(_side_from_json(s) for s in cyc)
                       for cyc in _require(r, "cycles", list))
        regions.append(Region(genus, cycles))
    marks = None
    if "angle_marks" in obj:
        am = obj["angle_marks"]
        if not isinstance(am, dict):
            raise FormatError("angle_marks must be an object")
        marks = tuple((f, m) for f, m in am.items())
        if any(not isinstance(m, int) for _, m in marks):
            raise FormatError("angle marks must be integers")
    io = None
    if "io" in obj:
        raw = obj["io"]
        if not isinstance(raw, dict):
            raise FormatError("io must be an object")
        try:
            io = tuple(raw[str(lab)] for lab in range(len(boundaries)))
        except KeyError as exc:
            raise FormatError("io must mark every boundary") from exc
    if "genus" in obj:
        genus = _require(obj, "genus", int)
    else:
        chi = sum(2 - 2 * r.genus - len(r.cycles) for r in regions) - len(arcs)
        twice = 2 - len(boundaries) - chi
        if twice % 2 or twice < 0:
            raise FormatError("genus cannot be solved from the regions")
        genus = twice // 2
    return ArcGraph(boundaries, tuple(arcs), tuple(regions), genus, marks, io)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2) + "\n"


def loads(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc


def graph_to_json(g: ArcGraph) -> str:
    return dumps(graph_to_dict(g))


def graph_from_json(text: str) -> ArcGraph:
    return graph_from_dict(loads(text))


def load_graph(path: str) -> ArcGraph:
    with open(path, encoding="utf-8") as fh:
        return graph_from_json(fh.read())


# ----- ribbon graphs -----------------------------------------------------

def ribbon_to_dict(gamma: MarkedRibbonGraph) -> dict:
    out: dict[str, Any] = {
        "vertices": [list(v) for v in gamma.vertices],
        "edges": [list(e) for e in gamma.edges],
        "marks": list(gamma.marks),
        "role": gamma.role,
    }
    if gamma.angle_marks is not None:
        out["angle_marks"] = {f: m for f, m in gamma.angle_marks}
    return out


def ribbon_from_dict(obj: dict) -> MarkedRibbonGraph:
    verts = tuple(tuple(v) for v in _require(obj, "vertices", list))
    edges = tuple(tuple(e) for e in _require(obj, "edges", list))
    marks = tuple(_require(obj, "marks", list))
    am = obj.get("angle_marks")
    am = None if am is None else tuple(am.items())
    return MarkedRibbonGraph(verts, edges, marks, am, obj.get("role", "marked"))


# ----- formal sums -------------------------------------------------------

def formal_sum_to_dict(terms, weight_cap=None) -> dict:
    """`terms` iterates (PartitionedArcGraph or ArcGraph, coeff)."""
    rows = []
    for obj, c in terms:
        g = getattr(obj, "graph", obj)
        mult = getattr(obj, "mult", None)
        if mult is None:
            mult = (1,) * g.n_arcs
        rows.append({"coeff": int(c), "graph": graph_to_dict(g),
                     "mult": {str(i): int(n) for i, n in enumerate(mult)}})
    return {"schema_version": SCHEMA_VERSION, "weight_cap": weight_cap, "terms": rows}


# ----- algebras ----------------------------------------------------------

def algebra_to_dict(alg) -> dict:
    out: dict[str, Any] = {
        "basis": [{"name": n, "degree": d} for n, d in zip(alg.names, alg.degrees)],
        "unit": alg.unit_index,
        "mul": [[i, j, k, rational_to_str(v)] for (i, j, k), v in sorted(alg.sparse_mul().items())],
        "integral": [rational_to_str(v) for v in alg.integral],
    }
    if alg.d is not None:
        out["d"] = [[i, j, rational_to_str(v)] for (i, j), v in sorted(alg.sparse_d().items())]
    return out


def algebra_from_dict(obj: dict):
    from .frobenius import GradedAlgebra
    basis = _require(obj, "basis", list)
    names = [_require(b, "name", str) for b in basis]
    degrees = [_require(b, "degree", int) for b in basis]
    unit = _require(obj, "unit", int)
    mul = {}
    for row in _require(obj, "mul", list):
        if not isinstance(row, list) or len(row) != 4:
            raise FormatError("mul entries are [i, j, k, rational]")
        i, j, k, v = row
        mul[(int(i), int(j), int(k))] = parse_rational(v)
    integral = [parse_rational(v) for v in _require(obj, "integral", list)]
    d = None
    if "d" in obj:
        d = {}
        for row in obj["d"]:
            if not isinstance(row, list) or len(row) != 3:
                raise FormatError("d entries are [i, j, rational]")
            i, j, v = row
            d[(int(i), int(j))] = parse_rational(v)
    try:
        return GradedAlgebra.from_sparse(names, degrees, unit, mul, integral, d)
    except (IndexError, ValueError) as exc:
        raise FormatError(str(exc)) from exc


def load_algebra(path: str):
    with open(path, encoding="utf-8") as fh:
        return algebra_from_dict(loads(fh.read()))


__all__ = [
    "FormatError", "SCHEMA_VERSION", "StructuralError",
    "graph_to_dict", "graph_from_dict", "graph_to_json", "graph_from_json",
    "load_graph", "ribbon_to_dict", "ribbon_from_dict", "formal_sum_to_dict",
    "algebra_to_dict", "algebra_from_dict", "load_algebra",
    "rational_to_str", "parse_rational", "dumps", "loads",
]
