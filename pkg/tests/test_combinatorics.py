import itertools
import random
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointslab.combinatorics import (
    ColoredGraph,
    UniformHypergraph,
    brute_force_rainbow,
    brute_force_simplices,
    check_kruskal_katona_bound,
    count_rainbow_triangles,
    count_simplices,
    hypergraph_from_edges,
    k4_blowup_coloring,
    random_colored_graph,
    random_hypergraph,
)

MATCHINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def test_rainbow_examples():
    k4 = ColoredGraph(4, MATCHINGS)
    assert count_rainbow_triangles(k4) == 4
    assert count_rainbow_triangles(k4_blowup_coloring(2)) == 32
    mono = ColoredGraph(4, (tuple(itertools.combinations(range(4), 2)), (), ()))
    assert count_rainbow_triangles(mono) == 0


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_blowup_counts(k):
    g = k4_blowup_coloring(k)
    assert all(len(c) == 2 * k * k for c in g.colors)
    assert count_rainbow_triangles(g) == 4 * k ** 3


def test_simplex_examples():
    h = UniformHypergraph(4, 2, ((0, 1), (0, 2), (1, 2), (2, 3)))
    assert count_simplices(h) == 1
    assert count_simplices(UniformHypergraph(5, 2, ())) == 0
    for k in range(1, 13):
        for d in range(2, 6):
            if k >= d - 1:
                assert count_simplices(UniformHypergraph.complete(k, d - 1), d) == comb(k, d)


def test_bound_examples():
    cert = check_kruskal_katona_bound(10, 3)
    assert cert.counts["J"] == 10 and (cert.lhs, cert.rhs) == (900, 2000)
    assert check_kruskal_katona_bound(0, 3).counts["J"] == 0
    assert check_kruskal_katona_bound(0, 3).holds


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(3, 15), st.floats(0.1, 0.95))
def test_rainbow_matches_brute_force(seed, n, density):
    g = random_colored_graph(random.Random(seed), n, density)
    assert count_rainbow_triangles(g) == brute_force_rainbow(g)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(2, 12), st.integers(1, 4), st.floats(0.1, 0.95))
def test_simplices_match_brute_force(seed, n, arity, density):
    h = random_hypergraph(random.Random(seed), n, arity, density)
    got = count_simplices(h)
    assert got == brute_force_simplices(h)
    assert check_kruskal_katona_bound(len(h.edges), arity + 1, got).holds


def test_bad_inputs():
    with pytest.raises(ValueError):
        ColoredGraph(3, (((0, 0),), (), ()))
    with pytest.raises(ValueError):
        UniformHypergraph(3, 2, ((0, 1, 2),))
    with pytest.raises(ValueError):
        count_rainbow_triangles(ColoredGraph(3, ((), ())))
    with pytest.raises(ValueError):
        hypergraph_from_edges([])
    assert hypergraph_from_edges([(0, 2), (1, 2)]).vertices == 3
