"""JSON interchange: configuration documents and graph/hypergraph documents.

Coordinates are strings (``"3/7"`` or ``"42 mod 10007"``), never floats.
Parse errors carry a JSON path such as ``$.lines[2].direction[0]``.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .algebra import Field, field_from_descriptor
from .combinatorics import ColoredGraph, UniformHypergraph
from .configs import (
    FlatJointsConfiguration,
    JointsConfiguration,
    MultijointsConfiguration,
    detect_joints,
    detect_multijoints,
)
from .errors import ConfigParseError
from .geometry import Flat, Line, Point

SCHEMA = "jointslab.config"
VERSION = 1
KINDS = ("joints", "multijoints", "flatjoints")


def _vec_out(F: Field, v) -> list:
    return [F.format(x) for x in v]


def _line_out(F: Field, line: Line) -> dict:
    return {"base": _vec_out(F, line.base), "direction": _vec_out(F, line.direction)}


def config_to_document(cfg) -> dict:
    F = cfg.field
    doc = {"schema": SCHEMA, "version": VERSION, "field": F.descriptor, "d": cfg.d}
    if isinstance(cfg, JointsConfiguration):
        doc["kind"] = "joints"
        doc["lines"] = [_line_out(F, x) for x in cfg.lines]
        doc["joints"] = [{"point": _vec_out(F, p.coords), "lines": list(r)}
                         for p, r in zip(cfg.joints, cfg.incidence)]
    elif isinstance(cfg, MultijointsConfiguration):
        doc["kind"] = "multijoints"
        doc["families"] = [[_line_out(F, x) for x in fam] for fam in cfg.families]
        doc["joints"] = [{"point": _vec_out(F, p.coords), "lines": list(r)}
                         for p, r in zip(cfg.joints, cfg.incidence)]
    elif isinstance(cfg, FlatJointsConfiguration):
        doc["kind"] = "flatjoints"
        doc["m"] = cfg.m
        doc["lines"] = [_line_out(F, x) for x in cfg.lines]
        doc["flats"] = [{"base": _vec_out(F, f.base), "basis": [_vec_out(F, v) for v in f.basis]}
                        for f in cfg.flats]
        doc["joints"] = [{"point": _vec_out(F, p.coords), "lines": list(r), "flat": f}
                         for p, r, f in zip(cfg.joints, cfg.line_incidence, cfg.flat_incidence)]
    else:
        raise TypeError(f"cannot serialize {type(cfg).__name__}")
    return doc


class _Reader:
    def __init__(self, source: str):
        self.source = source

    def fail(self, path: str, msg: str):
        raise ConfigParseError(self.source, f"{path}: {msg}")

    def get(self, obj, key, path, kind=None):
        if not isinstance(obj, dict):
            self.fail(path, "expected an object")
        if key not in obj:
            self.fail(path, f"missing key {key!r}")
        val = obj[key]
        if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind is int:
            self.fail(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
        return val

    def scalar(self, F: Field, x, path):
        if not isinstance(x, (str, int)) or isinstance(x, bool):
            self.fail(path, "coordinates must be strings or integers")
        try:
            return F.parse(str(x))
        except (ValueError, ZeroDivisionError) as exc:
            self.fail(path, f"bad scalar {x!r}: {exc}")

    def vector(self, F: Field, v, d, path):
        if not isinstance(v, list) or len(v) != d:
            self.fail(path, f"expected a list of {d} coordinates")
        return tuple(self.scalar(F, x, f"{path}[{i}]") for i, x in enumerate(v))

    def line(self, F, obj, d, path):
        base = self.vector(F, self.get(obj, "base", path), d, f"{path}.base")
        direction = self.vector(F, self.get(obj, "direction", path), d, f"{path}.direction")
        try:
            return Line.through(F, base, direction)
        except ValueError as exc:
            self.fail(path, str(exc))

    def index(self, x, bound, path):
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < bound:
            self.fail(path, f"expected an index below {bound}")
        return x


def document_to_config(doc, source: str = "<document>"):
    """Parse a configuration document; joints are detected when omitted
    (joints and multijoints kinds only)."""
    r = _Reader(source)
    if not isinstance(doc, dict):
        r.fail("$", "expected an object")
    if doc.get("schema", SCHEMA) != SCHEMA:
        r.fail("$.schema", f"expected {SCHEMA!r}")
    if doc.get("version", VERSION) != VERSION:
        r.fail("$.version", f"unsupported version {doc.get('version')!r}")
    try:
        F = field_from_descriptor(r.get(doc, "field", "$", str))
    except ValueError as exc:
        r.fail("$.field", str(exc))
    d = r.get(doc, "d", "$", int)
    if d < 1:
        r.fail("$.d", "dimension must be positive")
    kind = r.get(doc, "kind", "$", str)
    if kind not in KINDS:
        r.fail("$.kind", f"expected one of {KINDS}")
    joints = doc.get("joints")
    if joints is not None and not isinstance(joints, list):
        r.fail("$.joints", "expected a list")

    def points_and_rows(nlines, key="lines", width=d):
        pts, rows = [], []
        for i, j in enumerate(joints):
            path = f"$.joints[{i}]"
            pts.append(Point(r.vector(F, r.get(j, "point", path), d, f"{path}.point"), F))
            row = r.get(j, key, path, list)
            if len(row) != width:
                r.fail(f"{path}.{key}", f"expected {width} indices")
            bounds = nlines if isinstance(nlines, list) else [nlines] * width
            rows.append(tuple(r.index(x, b, f"{path}.{key}[{s}]") for s, (x, b) in enumerate(zip(row, bounds))))
        return tuple(pts), tuple(rows)

    try:
        if kind == "joints":
            lines = tuple(r.line(F, x, d, f"$.lines[{i}]") for i, x in enumerate(r.get(doc, "lines", "$", list)))
            if joints is None:
                return detect_joints(lines, d)
            pts, rows = points_and_rows(len(lines))
            cfg = JointsConfiguration(F, d, lines, pts, rows)
        elif kind == "multijoints":
            fams = r.get(doc, "families", "$", list)
            if len(fams) != d:
                r.fail("$.families", f"expected {d} families")
            families = tuple(
                tuple(r.line(F, x, d, f"$.families[{i}][{j}]") for j, x in enumerate(fam))
                for i, fam in enumerate(fams))
            if joints is None:
                return detect_multijoints(families)
            pts, rows = points_and_rows([len(f) for f in families])
            cfg = MultijointsConfiguration(F, d, families, pts, rows)
        else:
            m = r.get(doc, "m", "$", int)
            if not 1 <= m < d:
                r.fail("$.m", "need 1 <= m < d")
            lines = tuple(r.line(F, x, d, f"$.lines[{i}]") for i, x in enumerate(r.get(doc, "lines", "$", list)))
            flats = []
            for i, f in enumerate(r.get(doc, "flats", "$", list)):
                path = f"$.flats[{i}]"
                base = r.vector(F, r.get(f, "base", path), d, f"{path}.base")
                basis = [r.vector(F, v, d, f"{path}.basis[{k}]")
                         for k, v in enumerate(r.get(f, "basis", path, list))]
                try:
                    flats.append(Flat.through(F, base, basis))
                except ValueError as exc:
                    r.fail(path, str(exc))
            if joints is None:
                r.fail("$", "flatjoints documents must list their joints")
            pts, rows = points_and_rows(len(lines), width=m)
            fi = tuple(r.index(r.get(j, "flat", f"$.joints[{i}]"), len(flats), f"$.joints[{i}].flat")
                       for i, j in enumerate(joints))
            cfg = FlatJointsConfiguration(F, d, m, lines, tuple(flats), pts, rows, fi)
        cfg.validate()
    except ValueError as exc:
        if isinstance(exc, ConfigParseError):
            raise
        r.fail("$", str(exc))
    return cfg


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()


def _load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigParseError(str(path), f"cannot read: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(str(path), f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_config(path):
    return document_to_config(_load_json(path), str(path))


def load_document(path) -> dict:
    return _load_json(path)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def dump_config(cfg, path) -> None:
    dump_json(config_to_document(cfg), path)


# -- graphs --------------------------------------------------------------------


def graph_to_document(g) -> dict:
    if isinstance(g, ColoredGraph):
        return {"kind": "colored-graph", "vertices": g.vertices,
                "colors": [[list(e) for e in c] for c in g.colors]}
    if isinstance(g, UniformHypergraph):
        return {"kind": "hypergraph", "vertices": g.vertices, "arity": g.arity,
                "edges": [list(e) for e in g.edges]}
    raise TypeError(f"cannot serialize {type(g).__name__}")


def document_to_graph(doc, source: str = "<document>"):
    r = _Reader(source)
    kind = r.get(doc, "kind", "$", str)
    n = r.get(doc, "vertices", "$", int)
    try:
        if kind == "colored-graph":
            colors = r.get(doc, "colors", "$", list)
            return ColoredGraph(n, tuple(tuple(tuple(e) for e in c) for c in colors))
        if kind == "hypergraph":
            return UniformHypergraph(n, r.get(doc, "arity", "$", int),
                                     tuple(tuple(e) for e in r.get(doc, "edges", "$", list)))
    except (TypeError, ValueError) as exc:
        r.fail("$", str(exc))
    r.fail("$.kind", "expected 'colored-graph' or 'hypergraph'")


def load_graph(path):
    return document_to_graph(_load_json(path), str(path))
