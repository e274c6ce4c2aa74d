"""Joints, multijoints and flat-joints configurations.

A configuration stores, for every joint, the ordered tuple of incident
objects it *uses* (``incidence``).  Everything downstream (weights, orders,
constraint rows) is indexed by ``(joint, slot)`` where ``slot`` is the
position in that tuple.  When more than ``d`` lines pass through a point,
detection keeps the lexicographically smallest independent ``d``-subset
in canonical-key order.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

import networkx as nx

from .algebra import Field, default_field
from .errors import DegenerateConstruction
from .geometry import (
    Flat,
    Line,
    Point,
    directions_independent,
    intersect_hyperplanes,
    intersect_lines,
    point_on,
)


@dataclass(frozen=True)
class JointsConfiguration:
    field: Field
    d: int
    lines: tuple
    joints: tuple
    incidence: tuple

    def __post_init__(self):
        if len(self.incidence) != len(self.joints):
            raise ValueError("one incidence tuple per joint required")
        for p, row in enumerate(self.incidence):
            if len(row) != self.d:
                raise ValueError(f"joint {p} uses {len(row)} lines, expected {self.d}")
            if len(set(row)) != self.d:
                raise ValueError(f"joint {p} repeats a line")

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    @cached_property
    def line_joints(self) -> tuple:
        """Per line, the ``(joint, slot)`` pairs that use it."""
        out = [[] for _ in self.lines]
        for p, row in enumerate(self.incidence):
            for slot, l in enumerate(row):
                out[l].append((p, slot))
        return tuple(tuple(x) for x in out)

    @cached_property
    def used_lines(self) -> tuple:
        return tuple(l for l, js in enumerate(self.line_joints) if js)

    def directions_at(self, p: int) -> tuple:
        return tuple(self.lines[l].direction for l in self.incidence[p])

    def validate(self) -> None:
        if len(set(self.joints)) != len(self.joints):
            raise ValueError("joints are not distinct")
        for p, (pt, row) in enumerate(zip(self.joints, self.incidence)):
            for l in row:
                if not point_on(pt, self.lines[l]):
                    raise ValueError(f"joint {p} is not on its line {l}")
            if not directions_independent(self.field, self.directions_at(p)):
                raise ValueError(f"joint {p}: chosen directions are dependent")

    def restrict(self, joint_ids: Iterable[int]) -> "JointsConfiguration":
        """Sub-configuration on ``joint_ids`` keeping only the lines they use."""
        joint_ids = sorted(joint_ids)
        keep = sorted({l for p in joint_ids for l in self.incidence[p]})
        remap = {l: i for i, l in enumerate(keep)}
        return JointsConfiguration(
            self.field, self.d,
            tuple(self.lines[l] for l in keep),
            tuple(self.joints[p] for p in joint_ids),
            tuple(tuple(remap[l] for l in self.incidence[p]) for p in joint_ids),
        )

    def counts(self) -> dict:
        return {"J": self.num_joints, "L": self.num_lines}


@dataclass(frozen=True)
class MultijointsConfiguration:
    field: Field
    d: int
    families: tuple
    joints: tuple
    incidence: tuple

    def __post_init__(self):
        if len(self.families) != self.d:
            raise ValueError(f"need {self.d} line families, got {len(self.families)}")
        if len(self.incidence) != len(self.joints):
            raise ValueError("one incidence tuple per joint required")

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @property
    def family_sizes(self) -> tuple:
        return tuple(len(f) for f in self.families)

    def validate(self) -> None:
        if len(set(self.joints)) != len(self.joints):
            raise ValueError("joints are not distinct")
        for p, (pt, row) in enumerate(zip(self.joints, self.incidence)):
            lines = [self.families[i][l] for i, l in enumerate(row)]
            if not all(point_on(pt, line) for line in lines):
                raise ValueError(f"joint {p} is not on its chosen lines")
            if not directions_independent(self.field, [x.direction for x in lines]):
                raise ValueError(f"joint {p}: chosen directions are dependent")

    def as_joints_configuration(self) -> tuple:
        """Flatten the families into one line list.

        Returns ``(config, family_of_line)``; a line present in two families
        appears twice, once per family, so slot ``i`` of every joint is the
        line from family ``i``.
        """
        lines, family_of, offset = [], [], []
        for i, fam in enumerate(self.families):
            offset.append(len(lines))
            lines.extend(fam)
            family_of.extend([i] * len(fam))
        incidence = tuple(tuple(offset[i] + l for i, l in enumerate(row)) for row in self.incidence)
        cfg = JointsConfiguration(self.field, self.d, tuple(lines), self.joints, incidence)
        return cfg, tuple(family_of)

    def counts(self) -> dict:
        out = {"J": self.num_joints}
        out.update({f"L{i + 1}": n for i, n in enumerate(self.family_sizes)})
        return out


@dataclass(frozen=True)
class FlatJointsConfiguration:
    """Joints each using ``m`` lines and one ``(d - m)``-flat."""

    field: Field
    d: int
    m: int
    lines: tuple
    flats: tuple
    joints: tuple
    line_incidence: tuple
    flat_incidence: tuple

    def __post_init__(self):
        if not 1 <= self.m < self.d:
            raise ValueError("need 1 <= m < d")
        if not (len(self.joints) == len(self.line_incidence) == len(self.flat_incidence)):
            raise ValueError("one incidence record per joint required")
        for p, row in enumerate(self.line_incidence):
            if len(row) != self.m or len(set(row)) != self.m:
                raise ValueError(f"joint {p} must use {self.m} distinct lines")
        for f in self.flats:
            if f.dim != self.d - self.m:
                raise ValueError(f"flats must have dimension {self.d - self.m}")

    @property
    def num_joints(self) -> int:
        return len(self.joints)

    @cached_property
    def line_joints(self) -> tuple:
        out = [[] for _ in self.lines]
        for p, row in enumerate(self.line_incidence):
            for slot, l in enumerate(row):
                out[l].append((p, slot))
        return tuple(tuple(x) for x in out)

    @cached_property
    def flat_joints(self) -> tuple:
        out = [[] for _ in self.flats]
        for p, f in enumerate(self.flat_incidence):
            out[f].append(p)
        return tuple(tuple(x) for x in out)

    def validate(self) -> None:
        if len(set(self.joints)) != len(self.joints):
            raise ValueError("joints are not distinct")
        for p, pt in enumerate(self.joints):
            flat = self.flats[self.flat_incidence[p]]
            lines = [self.lines[l] for l in self.line_incidence[p]]
            if not point_on(pt, flat) or not all(point_on(pt, x) for x in lines):
                raise ValueError(f"joint {p} is not on its chosen line or flat")
            if not directions_independent(self.field, [x.direction for x in lines] + list(flat.basis)):
                raise ValueError(f"joint {p}: lines and flat do not span the space")

    def restrict(self, joint_ids: Iterable[int]) -> "FlatJointsConfiguration":
        """Sub-configuration on ``joint_ids``; lines shrink, flats are kept."""
        joint_ids = sorted(joint_ids)
        keep = sorted({l for p in joint_ids for l in self.line_incidence[p]})
        remap = {l: i for i, l in enumerate(keep)}
        return FlatJointsConfiguration(
            self.field, self.d, self.m,
            tuple(self.lines[l] for l in keep), self.flats,
            tuple(self.joints[p] for p in joint_ids),
            tuple(tuple(remap[l] for l in self.line_incidence[p]) for p in joint_ids),
            tuple(self.flat_incidence[p] for p in joint_ids),
        )

    def counts(self) -> dict:
        return {"J": self.num_joints, "L": len(self.lines), "F": len(self.flats)}


# -- detection ---------------------------------------------------------------


def _dedupe_lines(lines: Iterable[Line]) -> tuple:
    return tuple(sorted(set(lines), key=lambda x: x.key))


def _incident_lines(lines: Sequence[Line]) -> dict:
    """Map every pairwise intersection point to the indices of lines through it."""
    through: dict = {}
    for i, j in itertools.combinations(range(len(lines)), 2):
        pt = intersect_lines(lines[i], lines[j])
        if pt is not None:
            s = through.setdefault(pt, set())
            s.add(i)
            s.add(j)
    return through


def choose_independent(field: Field, candidates: Sequence[int], directions, d: int):
    """Greedy scan: the lexicographically first independent ``d``-subset.

    ``candidates`` must already be in canonical-key order; by the matroid
    exchange property the greedy choice is the lexicographic minimum.
    """
    chosen = []
    for c in candidates:
        if directions_independent(field, [directions[x] for x in chosen] + [directions[c]]):
            chosen.append(c)
            if len(chosen) == d:
                return tuple(chosen)
    return None


def detect_joints(lines: Iterable[Line], d: int | None = None) -> JointsConfiguration:
    lines = _dedupe_lines(lines)
    if not lines:
        raise ValueError("no lines given")
    field = lines[0].field
    d = d if d is not None else lines[0].dim
    directions = [x.direction for x in lines]
    found = []
    for pt, idx in _incident_lines(lines).items():
        if len(idx) < d:
            continue
        chosen = choose_independent(field, sorted(idx), directions, d)
        if chosen is not None:
            found.append((pt, chosen))
    found.sort(key=lambda x: x[0].coords)
    return JointsConfiguration(field, d, lines, tuple(x[0] for x in found),
                               tuple(x[1] for x in found))


def _choose_one_per_family(field, candidates, families):
    """First combination (in product order) of one line per family with
    independent directions, or ``None``."""
    for combo in itertools.product(*candidates):
        dirs = [families[i][l].direction for i, l in enumerate(combo)]
        if directions_independent(field, dirs):
            return combo
    return None


def detect_multijoints(families: Sequence[Iterable[Line]], strict: bool = False) -> MultijointsConfiguration:
    """Points using one line from each family, in independent directions.

    With ``strict=True`` a point meeting some family in two or more lines is
    rejected outright.
    """
    families = tuple(_dedupe_lines(f) for f in families)
    d = len(families)
    everything = [(i, l) for i, fam in enumerate(families) for l in range(len(fam))]
    flat = [families[i][l] for i, l in everything]
    if not flat:
        raise ValueError("no lines given")
    field = flat[0].field
    pooled: dict = {}
    for i, j in itertools.combinations(range(len(flat)), 2):
        if flat[i] == flat[j]:
            continue
        pt = intersect_lines(flat[i], flat[j])
        if pt is not None:
            pooled.setdefault(pt, set()).update((i, j))
    found = []
    for pt, idx in pooled.items():
        candidates = [[] for _ in range(d)]
        for x in idx:
            fam, l = everything[x]
            candidates[fam].append(l)
        candidates = [sorted(set(c)) for c in candidates]
        if strict and any(len(c) != 1 for c in candidates):
            continue
        chosen = _choose_one_per_family(field, candidates, families)
        if chosen is not None:
            found.append((pt, chosen))
    found.sort(key=lambda x: x[0].coords)
    return MultijointsConfiguration(field, d, families, tuple(x[0] for x in found),
                                    tuple(x[1] for x in found))


# -- generic hyperplane constructions ----------------------------------------


def moment_hyperplanes(field: Field, d: int, params: Sequence) -> list:
    """Hyperplane ``i``: normal ``(1, t_i, ..., t_i^(d-1))``, offset ``t_i^d``."""
    out = []
    for t in params:
        t = field.coerce(t)
        powers = [field.one]
        for _ in range(d):
            powers.append(field.mul(powers[-1], t))
        out.append((tuple(powers[:d]), powers[d]))
    return out


class GenericArrangement:
    """``k`` hyperplanes in general position, with checked intersections.

    ``line(S)`` / ``point(T)`` / ``flat(U)`` return the intersection of the
    hyperplanes indexed by ``S``/``T``/``U`` and raise
    :class:`DegenerateConstruction` when its dimension is not the generic one.
    """

    def __init__(self, k: int, d: int, field: Field | None = None, seed: int | None = None):
        if k < 1 or d < 2:
            raise ValueError("need k >= 1 and d >= 2")
        self.k, self.d = k, d
        self.field = field if field is not None else default_field()
        if seed is None:
            self.params = list(range(1, k + 1))
        else:
            rng = random.Random(seed)
            bound = getattr(self.field, "p", 10**9)
            self.params = rng.sample(range(1, bound), k)
        if len({self.field.coerce(t) for t in self.params}) != k:
            raise DegenerateConstruction(f"{k} distinct parameters do not fit in {self.field!r}")
        self.hyperplanes = moment_hyperplanes(self.field, d, self.params)
        self._cache: dict = {}

    def _meet(self, subset) -> object:
        subset = tuple(sorted(subset))
        if subset not in self._cache:
            self._cache[subset] = intersect_hyperplanes(self.field, [self.hyperplanes[i] for i in subset])
        return self._cache[subset]

    def flat(self, subset) -> Flat:
        res = self._meet(subset)
        want = self.d - len(subset)
        if not isinstance(res, Flat) or res.dim != want:
            raise DegenerateConstruction(f"hyperplanes {sorted(subset)} do not meet in a {want}-flat")
        return res

    def line(self, subset) -> Line:
        if len(subset) != self.d - 1:
            raise ValueError("a line needs d-1 hyperplanes")
        return self.flat(subset).to_line()

    def point(self, subset) -> Point:
        res = self._meet(subset)
        if not isinstance(res, Point):
            raise DegenerateConstruction(f"hyperplanes {sorted(subset)} do not meet in a point")
        return res

    def hyperplanes_through(self, pt: Point) -> list:
        F = self.field
        out = []
        for i, (normal, off) in enumerate(self.hyperplanes):
            acc = F.zero
            for a, x in zip(normal, pt.coords):
                acc = F.add(acc, F.mul(a, x))
            if acc == off:
                out.append(i)
        return out

    def check_point(self, subset) -> Point:
        """``point(subset)`` after checking no other hyperplane passes through it."""
        pt = self.point(subset)
        if self.hyperplanes_through(pt) != sorted(subset):
            raise DegenerateConstruction(f"extra hyperplane through the point {sorted(subset)}")
        return pt


def _with_retries(build, field, seed, attempts=8):
    try:
        return build(None)
    except DegenerateConstruction:
        if field is not None and not hasattr(field, "p"):
            raise
    last = None
    for i in range(attempts):
        try:
            return build(seed + i + 1)
        except DegenerateConstruction as exc:
            last = exc
    raise last


def generate_from_hypergraph(k: int, edges: Iterable[Sequence[int]], d: int,
                             field: Field | None = None, seed: int = 0) -> JointsConfiguration:
    """Generically induced configuration from a ``(d-1)``-uniform hypergraph.

    Edge ``S`` becomes the line cut out by the hyperplanes in ``S``; every
    ``d``-set all of whose ``(d-1)``-subsets are edges becomes a joint.
    """
    edges = sorted({tuple(sorted(e)) for e in edges})
    for e in edges:
        if len(e) != d - 1 or len(set(e)) != d - 1 or not all(0 <= v < k for v in e):
            raise ValueError(f"bad edge {e} for d={d}, k={k}")
    edge_set = set(edges)

    def build(s):
        arr = GenericArrangement(k, d, field, s)
        by_edge = {e: arr.line(e) for e in edges}
        lines = _dedupe_lines(by_edge.values())
        if len(lines) != len(edges):
            raise DegenerateConstruction("two edges produced the same line")
        index = {x: i for i, x in enumerate(lines)}
        found = []
        for T in itertools.combinations(range(k), d):
            faces = list(itertools.combinations(T, d - 1))
            if all(f in edge_set for f in faces):
                pt = arr.check_point(T)
                row = tuple(sorted(index[by_edge[f]] for f in faces))
                found.append((pt, row))
        found.sort(key=lambda x: x[0].coords)
        cfg = JointsConfiguration(arr.field, d, lines, tuple(x[0] for x in found),
                                  tuple(x[1] for x in found))
        if len(set(cfg.joints)) != len(found):
            raise DegenerateConstruction("two joints coincide")
        for p in range(cfg.num_joints):
            if not directions_independent(arr.field, cfg.directions_at(p)):
                raise DegenerateConstruction(f"joint {p} has dependent directions")
        return cfg

    return _with_retries(build, field, seed)


def generate_generic_hyperplane_config(k: int, d: int, field: Field | None = None,
                                       seed: int = 0) -> JointsConfiguration:
    """``k`` generic hyperplanes: ``C(k, d-1)`` lines, ``C(k, d)`` joints."""
    if k < d:
        raise ValueError("need k >= d")
    cfg = generate_from_hypergraph(k, itertools.combinations(range(k), d - 1), d, field, seed)
    if cfg.num_lines != comb(k, d - 1) or cfg.num_joints != comb(k, d):
        raise DegenerateConstruction("generic counts not reached")
    return cfg


def generate_from_colored_graph(k: int, color_edges: Sequence[Iterable[Sequence[int]]],
                                field: Field | None = None, seed: int = 0) -> MultijointsConfiguration:
    """Generically induced multijoints in F^3 from a 3-edge-colored graph.

    ``color_edges[i]`` lists the edges carrying color ``i``; an edge may
    carry several colors.  Every triangle whose edges admit distinct colors
    is a multijoint.
    """
    d = 3
    if len(color_edges) != 3:
        raise ValueError("need exactly three color classes")
    classes = [sorted({tuple(sorted(e)) for e in c}) for c in color_edges]
    for c in classes:
        for e in c:
            if len(e) != 2 or e[0] == e[1] or not all(0 <= v < k for v in e):
                raise ValueError(f"bad edge {e}")

    def build(s):
        arr = GenericArrangement(k, d, field, s)
        families, lookup = [], []
        for c in classes:
            by_edge = {e: arr.line(e) for e in c}
            fam = _dedupe_lines(by_edge.values())
            if len(fam) != len(c):
                raise DegenerateConstruction("two edges produced the same line")
            index = {x: i for i, x in enumerate(fam)}
            families.append(fam)
            lookup.append({e: index[x] for e, x in by_edge.items()})
        found = []
        for T in itertools.combinations(range(k), 3):
            faces = list(itertools.combinations(T, 2))
            candidates = [sorted(lookup[i][f] for f in faces if f in lookup[i]) for i in range(3)]
            if not all(candidates):
                continue
            chosen = _choose_one_per_family(arr.field, candidates, families)
            if chosen is not None:
                found.append((arr.check_point(T), chosen))
        found.sort(key=lambda x: x[0].coords)
        return MultijointsConfiguration(arr.field, d, tuple(families),
                                        tuple(x[0] for x in found), tuple(x[1] for x in found))

    return _with_retries(build, field, seed)


def generate_from_colored_hypergraph(k: int, edges, field: Field | None = None, d: int | None = None):
    """Dispatch: plain ``(d-1)``-subsets give joints, three color classes of
    pairs give ``F^3`` multijoints."""
    from .combinatorics import ColoredGraph, UniformHypergraph

    if isinstance(edges, ColoredGraph):
        return generate_from_colored_graph(k, edges.colors, field)
    if isinstance(edges, UniformHypergraph):
        return generate_from_hypergraph(k, edges.edges, edges.arity + 1, field)
    edges = list(edges)
    if d is None:
        raise ValueError("d is required for plain edge lists")
    return generate_from_hypergraph(k, edges, d, field)


def generate_k4_blowup_multijoints(k: int, field: Field | None = None) -> MultijointsConfiguration:
    """Blow-up of the 3-matching coloring of K4: ``2k^2`` lines per color,
    ``4k^3`` multijoints."""
    from .combinatorics import k4_blowup_coloring

    g = k4_blowup_coloring(k)
    return generate_from_colored_graph(g.vertices, g.colors, field)


def generate_generic_flat_config(k: int, d: int, m: int, field: Field | None = None,
                                 joints: Sequence | None = None, seed: int | None = None,
                                 ) -> FlatJointsConfiguration:
    """Flat-joints from ``k`` generic hyperplanes.

    ``joints`` lists ``(T, U)`` pairs: ``T`` a ``d``-set of hyperplanes (the
    joint), ``U`` an ``m``-subset of ``T`` (the flat is their intersection,
    the lines are ``T - {j}`` for ``j`` in ``U``).  By default every
    ``d``-set is a joint with ``U`` its ``m`` smallest members, or a random
    ``m``-subset when ``seed`` is given.
    """
    if joints is None:
        rng = random.Random(seed)
        joints = []
        for T in itertools.combinations(range(k), d):
            U = tuple(sorted(rng.sample(T, m))) if seed is not None else T[:m]
            joints.append((T, U))
    joints = [(tuple(sorted(T)), tuple(sorted(U))) for T, U in joints]
    for T, U in joints:
        if len(T) != d or len(U) != m or not set(U) <= set(T):
            raise ValueError(f"bad joint entry {(T, U)}")

    def build(s):
        arr = GenericArrangement(k, d, field, s)
        lines, flats = {}, {}
        records = []
        for T, U in joints:
            pt = arr.check_point(T)
            ls = [arr.line(tuple(x for x in T if x != j)) for j in U]
            fl = arr.flat(U)
            for x in ls:
                lines.setdefault(x, len(lines))
            flats.setdefault(fl, len(flats))
            records.append((pt, ls, fl))
        line_list = _dedupe_lines(lines)
        flat_list = tuple(sorted(flats, key=lambda f: f.key))
        li = {x: i for i, x in enumerate(line_list)}
        fi = {x: i for i, x in enumerate(flat_list)}
        records.sort(key=lambda r: r[0].coords)
        cfg = FlatJointsConfiguration(
            arr.field, d, m, line_list, flat_list,
            tuple(r[0] for r in records),
            tuple(tuple(li[x] for x in r[1]) for r in records),
            tuple(fi[r[2]] for r in records),
        )
        if len(set(cfg.joints)) != len(records):
            raise DegenerateConstruction("two joints coincide")
        cfg.validate()
        return cfg

    return _with_retries(build, field, 0)


# -- structure ----------------------------------------------------------------


def incidence_graph(cfg: JointsConfiguration) -> nx.Graph:
    """Joints adjacent when some line is chosen by both."""
    g = nx.Graph()
    g.add_nodes_from(range(cfg.num_joints))
    for js in cfg.line_joints:
        ps = sorted({p for p, _ in js})
        g.add_edges_from(itertools.combinations(ps, 2))
    return g


def is_connected(cfg: JointsConfiguration) -> bool:
    return cfg.num_joints > 0 and nx.is_connected(incidence_graph(cfg))


def connected_components(cfg: JointsConfiguration) -> list:
    """Sub-configurations per component, ordered by smallest joint index."""
    comps = sorted((sorted(c) for c in nx.connected_components(incidence_graph(cfg))),
                   key=lambda c: c[0])
    return [cfg.restrict(c) for c in comps]


@dataclass(frozen=True)
class AugmentedConfiguration:
    """Result of adding flat lines: the joints configuration, the indices of
    the new lines, and the order put on them."""

    config: JointsConfiguration
    new_lines: tuple
    n: int | None


def augment_with_flat_lines(cfg: FlatJointsConfiguration, n: int | None = None) -> AugmentedConfiguration:
    """Replace each joint's flat by ``d - m`` lines inside it through the joint.

    New line directions are flat basis vectors taken greedily to complete
    the joint's ``m`` line directions to a basis.  Each new line is its own
    entry (used by exactly one joint) even if it coincides geometrically
    with another line.
    """
    F = cfg.field
    lines = list(cfg.lines)
    incidence = []
    new_lines = []
    for p, pt in enumerate(cfg.joints):
        row = list(cfg.line_incidence[p])
        dirs = [cfg.lines[l].direction for l in row]
        for v in cfg.flats[cfg.flat_incidence[p]].basis:
            if directions_independent(F, dirs + [v]):
                dirs.append(v)
                new_lines.append(len(lines))
                row.append(len(lines))
                lines.append(Line.through(F, pt.coords, v))
        if len(row) != cfg.d:
            raise DegenerateConstruction(f"joint {p}: flat does not complete its lines")
        incidence.append(tuple(row))
    out = JointsConfiguration(F, cfg.d, tuple(lines), cfg.joints, tuple(incidence))
    out.validate()
    return AugmentedConfiguration(out, tuple(new_lines), n)
