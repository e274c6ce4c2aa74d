"""Rainbow triangles, hypergraph simplices and the matching count bound."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Sequence

from . import _kernels


@dataclass(frozen=True)
class ColoredGraph:
    """Simple graph whose edges carry any subset of three colors."""

    vertices: int
    colors: tuple

    def __post_init__(self):
        norm = []
        for cls in self.colors:
            edges = set()
            for e in cls:
                u, v = sorted(e)
                if u == v or not (0 <= u and v < self.vertices):
                    raise ValueError(f"bad edge {tuple(e)} on {self.vertices} vertices")
                edges.add((u, v))
            norm.append(tuple(sorted(edges)))
        object.__setattr__(self, "colors", tuple(norm))

    @property
    def num_colors(self) -> int:
        return len(self.colors)

    def masks(self) -> list:
        """``n x n`` matrix of color bitmasks (bit ``i`` for color ``i``)."""
        n = self.vertices
        out = [[0] * n for _ in range(n)]
        for i, cls in enumerate(self.colors):
            for u, v in cls:
                out[u][v] |= 1 << i
                out[v][u] |= 1 << i
        return out


@dataclass(frozen=True)
class UniformHypergraph:
    vertices: int
    arity: int
    edges: tuple

    def __post_init__(self):
        edges = set()
        for e in self.edges:
            e = tuple(sorted(e))
            if len(e) != self.arity or len(set(e)) != self.arity:
                raise ValueError(f"edge {e} does not have {self.arity} distinct vertices")
            if e[0] < 0 or e[-1] >= self.vertices:
                raise ValueError(f"edge {e} out of range")
            edges.add(e)
        object.__setattr__(self, "edges", tuple(sorted(edges)))

    @classmethod
    def complete(cls, vertices: int, arity: int) -> "UniformHypergraph":
        return cls(vertices, arity, tuple(itertools.combinations(range(vertices), arity)))


def k4_blowup_coloring(k: int) -> ColoredGraph:
    """Complete 4-partite graph with parts of size ``k``, each color class a
    blown-up perfect matching of K4."""
    if k < 1:
        raise ValueError("k must be positive")
    matchings = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
    part = [range(g * k, (g + 1) * k) for g in range(4)]
    colors = []
    for pairs in matchings:
        colors.append([(u, v) for g, h in pairs for u in part[g] for v in part[h]])
    return ColoredGraph(4 * k, tuple(colors))


def count_rainbow_triangles(g: ColoredGraph) -> int:
    if g.num_colors != 3:
        raise ValueError("rainbow triangles need exactly three colors")
    return _kernels.rainbow_triangles(g.masks())


def count_simplices(h: UniformHypergraph, d: int | None = None) -> int:
    """Number of ``(arity + 1)``-sets all of whose ``arity``-subsets are edges."""
    if d is not None and d != h.arity + 1:
        raise ValueError(f"a {h.arity}-uniform hypergraph has simplices of size {h.arity + 1}")
    if h.arity == 0:
        return h.vertices if h.edges else 0
    edges = set(h.edges)
    # each simplex is seen once: from the facet missing its largest vertex
    total = 0
    for e in h.edges:
        for v in range(e[-1] + 1, h.vertices):
            if all(f in edges for f in itertools.combinations(e + (v,), h.arity) if f != e):
                total += 1
    return total


def brute_force_rainbow(g: ColoredGraph) -> int:
    """Reference count: try every triple and every color permutation."""
    sets = [set(c) for c in g.colors]
    total = 0
    for tri in itertools.combinations(range(g.vertices), 3):
        edges = list(itertools.combinations(tri, 2))
        if any(all(e in sets[c] for e, c in zip(edges, perm))
               for perm in itertools.permutations(range(3))):
            total += 1
    return total


def brute_force_simplices(h: UniformHypergraph) -> int:
    edges = set(h.edges)
    return sum(1 for s in itertools.combinations(range(h.vertices), h.arity + 1)
               if all(f in edges for f in itertools.combinations(s, h.arity)))


def check_kruskal_katona_bound(L: int, d: int, simplices: int | None = None, k: int | None = None):
    """Main-bound certificate for ``simplices`` simplices on ``L`` edges.

    When ``simplices`` is omitted the best known count is used: ``C(k, d)``
    if ``L = C(k, d-1)`` for some ``k`` (pass ``k`` or it is searched for),
    otherwise the bound is evaluated at its own real maximum's floor.
    """
    from .variational import certify_bound, main_bound_max_joints

    if L < 0:
        raise ValueError("L must be nonnegative")
    if simplices is None:
        if k is None:
            k = next((x for x in range(d - 1, L + d + 1) if comb(x, d - 1) == L), None)
        if k is not None and comb(k, d - 1) == L:
            simplices = comb(k, d)
        else:
            simplices = main_bound_max_joints(L, d)
    cert = certify_bound("main", J=simplices, L=L, d=d)
    return cert


def random_colored_graph(rng, n: int, density: float = 0.5) -> ColoredGraph:
    colors = [[] for _ in range(3)]
    for e in itertools.combinations(range(n), 2):
        for c in range(3):
            if rng.random() < density:
                colors[c].append(e)
    return ColoredGraph(n, tuple(colors))


def random_hypergraph(rng, n: int, arity: int, density: float = 0.5) -> UniformHypergraph:
    return UniformHypergraph(n, arity, tuple(e for e in itertools.combinations(range(n), arity)
                                             if rng.random() < density))


def hypergraph_from_edges(edges: Iterable[Sequence[int]], vertices: int | None = None) -> UniformHypergraph:
    edges = [tuple(e) for e in edges]
    if not edges:
        raise ValueError("cannot infer arity from an empty edge list")
    if vertices is None:
        vertices = 1 + max(max(e) for e in edges)
    return UniformHypergraph(vertices, len(edges[0]), tuple(edges))
