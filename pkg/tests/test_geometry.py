from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from jointslab.algebra import QQ, Matrix, PrimeField
from jointslab.configs import generate_generic_hyperplane_config
from jointslab.geometry import (
    AffineMap,
    Flat,
    Line,
    Point,
    directions_independent,
    flat_to_coordinates,
    intersect_hyperplanes,
    intersect_lines,
    point_on,
)

F7 = PrimeField(7)
P = PrimeField(10007)
E = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
Z_AXIS = Line.through(F7, (0, 0, 0), (0, 0, 1))


def test_intersect_hyperplanes_cases():
    got = intersect_hyperplanes(F7, [(E[0], 0), (E[1], 0)])
    assert isinstance(got, Flat) and got.dim == 1 and got.to_line() == Z_AXIS
    assert intersect_hyperplanes(F7, [(E[0], 0), (E[1], 0), (E[2], 0)]) == Point.of(F7, (0, 0, 0))
    assert intersect_hyperplanes(F7, [(E[0], 0), (E[0], 1)]) is None


def test_directions_independent_examples():
    assert directions_independent(QQ, E)
    assert not directions_independent(QQ, [E[0], E[1], (1, 1, 0)])
    cfg = generate_generic_hyperplane_config(4, 3)
    for p in range(cfg.num_joints):
        assert directions_independent(cfg.field, cfg.directions_at(p))


def test_point_on_examples():
    assert point_on(Point.of(F7, (0, 0, 0)), Z_AXIS)
    assert not point_on(Point.of(F7, (1, 0, 0)), Z_AXIS)
    plane = Flat.through(F7, (0, 0, 0), [(1, 6, 0), (0, 1, 6)])
    assert point_on(Point.of(F7, (1, 1, 5)), plane)
    assert not point_on(Point.of(F7, (1, 1, 1)), plane)


def test_flat_to_coordinates_examples():
    f = Flat.through(QQ, (0, 0), [(0, 1)])
    T = flat_to_coordinates(f, 1)
    assert T.matrix == Matrix.identity(QQ, 2) and T.translation == (0, 0)
    z = Flat.through(F7, (0, 0, 0), [(0, 0, 1)])
    T = flat_to_coordinates(z, 2)
    for t in (1, 4):
        assert T((0, 0, t)).coords[:2] == (0, 0)
    plane = Flat.through(F7, (0, 0, 0), [(1, 6, 0), (0, 1, 6)])
    T = flat_to_coordinates(plane, 1)
    for pt in [(0, 0, 0), (1, 6, 0), (0, 1, 6), (3, 2, 2)]:
        assert T(pt).coords[0] == 0
    assert T((1, 0, 0)).coords[0] != 0
    with pytest.raises(ValueError):
        flat_to_coordinates(plane, 2)


coord = st.integers(-5, 5)
vec3 = st.tuples(coord, coord, coord)


@given(vec3, vec3, st.integers(-5, 5), st.integers(1, 6))
def test_line_canonical_form_is_congruent(base, direction, t, scale):
    assume(any(direction))
    a = Line.through(QQ, base, direction)
    moved = tuple(b + t * x for b, x in zip(base, direction))
    b = Line.through(QQ, moved, tuple(Fraction(scale, 3) * x for x in direction))
    assert a == b and hash(a) == hash(b)
    assert point_on(Point.of(QQ, base), a)


@given(vec3, st.lists(vec3, min_size=1, max_size=2), vec3)
def test_flat_canonical_form(base, basis, shift):
    assume(directions_independent(QQ, basis))
    f = Flat.through(QQ, base, basis)
    combo = tuple(b + sum(s * v[i] for s, v in zip(shift, basis)) for i, b in enumerate(base))
    g = Flat.through(QQ, combo, list(reversed(basis)))
    assert f == g
    assert point_on(Point.of(QQ, combo), f)


@settings(max_examples=50)
@given(st.lists(st.lists(st.integers(0, 10006), min_size=3, max_size=3), min_size=3, max_size=3),
       st.tuples(st.integers(0, 10006), st.integers(0, 10006), st.integers(0, 10006)),
       st.tuples(st.integers(0, 10006), st.integers(0, 10006), st.integers(0, 10006)))
def test_affine_map_inverse_roundtrip(rows, shift, x):
    M = Matrix(P, rows)
    assume(directions_independent(P, rows))
    T = AffineMap(M, P.vec(shift))
    assert T.inverse()(T(x)) == Point.of(P, x)
    assert T.compose(T.inverse())(x) == Point.of(P, x)


@given(vec3, vec3, vec3)
def test_intersect_lines_contains_point(p, u, v):
    assume(any(u) and any(v) and directions_independent(QQ, [u, v]))
    a = Line.through(QQ, p, u)
    b = Line.through(QQ, p, v)
    q = intersect_lines(a, b)
    assert q == Point.of(QQ, p)
    assert point_on(q, a) and point_on(q, b)


def test_parallel_lines_do_not_meet():
    a = Line.through(QQ, (0, 0, 0), (1, 0, 0))
    b = Line.through(QQ, (0, 1, 0), (2, 0, 0))
    assert intersect_lines(a, b) is None
    with pytest.raises(ValueError):
        intersect_lines(a, a)
    with pytest.raises(ValueError):
        Line.through(QQ, (0, 0, 0), (0, 0, 0))
