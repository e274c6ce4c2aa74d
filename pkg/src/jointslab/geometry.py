"""Points, lines, flats and affine maps in F^d with exact canonical forms."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .algebra import Field, Matrix, inverse, kernel_basis, rank, rref, solve


def _sub(F: Field, u, v) -> tuple:
    return tuple(F.sub(x, y) for x, y in zip(u, v))


def _axpy(F: Field, alpha, x, y) -> tuple:
    """``alpha * x + y``"""
    return tuple(F.add(F.mul(alpha, a), b) for a, b in zip(x, y))


@dataclass(frozen=True, order=True)
class Point:
    coords: tuple
    field: Field = dc_field(compare=False)

    @classmethod
    def of(cls, field: Field, coords: Sequence) -> "Point":
        return cls(field.vec(coords), field)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __hash__(self):
        return hash(self.coords)

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords


@dataclass(frozen=True)
class Line:
    """An affine line; ``base`` and ``direction`` are always canonical.

    The direction is scaled so its first nonzero entry is 1 and the base is
    slid along the line until that coordinate is 0, so two parameterizations
    of the same line compare (and hash) equal.
    """

    base: tuple
    direction: tuple
    field: Field

    @classmethod
    def through(cls, field: Field, base: Sequence, direction: Sequence) -> "Line":
        base = field.vec(base)
        direction = field.vec(direction)
        if len(base) != len(direction):
            raise ValueError("base and direction have different dimensions")
        pivot = next((i for i, x in enumerate(direction) if not field.is_zero(x)), None)
        if pivot is None:
            raise ValueError("line direction must be nonzero")
        inv = field.inv(direction[pivot])
        direction = tuple(field.mul(inv, x) for x in direction)
        base = _axpy(field, field.neg(base[pivot]), direction, base)
        return cls(base, direction, field)

    @property
    def key(self) -> tuple:
        return (self.direction, self.base)

    @property
    def dim(self) -> int:
        return len(self.base)

    def point_at(self, t) -> Point:
        return Point(_axpy(self.field, self.field.coerce(t), self.direction, self.base), self.field)

    def __lt__(self, other: "Line"):
        return self.key < other.key

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        if not isinstance(other, Line):
            return NotImplemented
        return self.field == other.field and self.key == other.key

    def __repr__(self):
        return (f"Line(base=({', '.join(map(str, self.base))}), "
                f"dir=({', '.join(map(str, self.direction))}))")


@dataclass(frozen=True)
class Flat:
    """A k-dimensional affine subspace with RREF basis and reduced base."""

    base: tuple
    basis: tuple
    field: Field

    @classmethod
    def through(cls, field: Field, base: Sequence, basis: Sequence[Sequence]) -> "Flat":
        base = field.vec(base)
        d = len(base)
        if not basis:
            return cls(base, (), field)
        M = Matrix(field, [list(v) for v in basis], d)
        R, r, pivots = rref(M)
        if r != len(basis):
            raise ValueError("flat basis vectors are linearly dependent")
        rows = tuple(tuple(row) for row in R.rows[:r])
        for row, c in zip(rows, pivots):
            base = _axpy(field, field.neg(base[c]), row, base)
        return cls(base, rows, field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    @property
    def key(self) -> tuple:
        return (self.basis, self.base)

    def to_line(self) -> Line:
        if self.dim != 1:
            raise ValueError(f"{self.dim}-flat is not a line")
        return Line.through(self.field, self.base, self.basis[0])

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        if not isinstance(other, Flat):
            return NotImplemented
        return self.field == other.field and self.key == other.key

    def __lt__(self, other: "Flat"):
        return (self.dim, self.key) < (other.dim, other.key)


@dataclass(frozen=True)
class AffineMap:
    """``x -> matrix @ x + translation`` with an invertible matrix."""

    matrix: Matrix
    translation: tuple

    def __post_init__(self):
        if rank(self.matrix) != self.matrix.nrows or self.matrix.nrows != self.matrix.ncols:
            raise ValueError("affine map matrix is not invertible")

    @property
    def field(self) -> Field:
        return self.matrix.field

    def __call__(self, point) -> Point:
        coords = point.coords if isinstance(point, Point) else self.field.vec(point)
        F = self.field
        image = tuple(F.add(x, t) for x, t in zip(self.matrix.apply(coords), self.translation))
        return Point(image, F)

    def inverse(self) -> "AffineMap":
        inv = inverse(self.matrix)
        F = self.field
        return AffineMap(inv, tuple(F.neg(x) for x in inv.apply(self.translation)))

    def compose(self, other: "AffineMap") -> "AffineMap":
        """``self after other``"""
        F = self.field
        shift = tuple(F.add(x, t) for x, t in zip(self.matrix.apply(other.translation),
                                                   self.translation))
        return AffineMap(self.matrix @ other.matrix, shift)


def intersect_hyperplanes(field: Field, hyperplanes: Sequence):
    """Solve ``normal . x = offset`` for every ``(normal, offset)`` pair.

    Returns ``None`` for an empty intersection, a :class:`Point` when the
    solution is unique, and a :class:`Flat` otherwise.
    """
    if not hyperplanes:
        raise ValueError("need at least one hyperplane")
    d = len(hyperplanes[0][0])
    M = Matrix(field, [list(normal) for normal, _ in hyperplanes], d)
    sol = solve(M, [off for _, off in hyperplanes])
    if sol is None:
        return None
    particular, kernel = sol
    if not kernel:
        return Point(particular, field)
    return Flat.through(field, particular, kernel)


def directions_independent(field: Field, vectors: Sequence[Sequence]) -> bool:
    if not vectors:
        return True
    return rank(Matrix(field, [list(v) for v in vectors])) == len(vectors)


def point_on(p: Point, obj) -> bool:
    F = p.field
    if isinstance(obj, Line):
        diff = _sub(F, p.coords, obj.base)
        pivot = obj.direction.index(F.one)
        t = diff[pivot]
        return all(x == F.mul(t, y) for x, y in zip(diff, obj.direction))
    if isinstance(obj, Flat):
        diff = list(_sub(F, p.coords, obj.base))
        for row in obj.basis:
            c = next(i for i, x in enumerate(row) if not F.is_zero(x))
            diff = list(_axpy(F, F.neg(diff[c]), row, diff))
        return all(F.is_zero(x) for x in diff)
    raise TypeError(f"cannot test membership in {type(obj).__name__}")


def flat_directions(obj) -> tuple:
    if isinstance(obj, Line):
        return (obj.direction,)
    return obj.basis


def complete_basis(field: Field, vectors: Sequence[Sequence], d: int) -> list:
    """Standard basis vectors that extend ``vectors`` to a basis of F^d."""
    chosen = [tuple(v) for v in vectors]
    extra = []
    for i in range(d):
        if len(chosen) == d:
            break
        e = tuple(field.one if j == i else field.zero for j in range(d))
        if directions_independent(field, chosen + [e]):
            chosen.append(e)
            extra.append(e)
    if len(chosen) != d:
        raise ValueError("vectors are dependent")
    return extra


def flat_to_coordinates(f: Flat, m: int | None = None) -> AffineMap:
    """Invertible affine map taking ``f`` onto ``{x_1 = ... = x_m = 0}``.

    The flat's direction basis is completed by standard basis vectors
    ``u_1..u_m``; with ``B = [u_1..u_m | basis]`` the map is
    ``x -> B^{-1} (x - base)``.
    """
    F = f.field
    d = f.ambient_dim
    if m is not None and f.dim != d - m:
        raise ValueError(f"expected a {d - m}-flat, got a {f.dim}-flat")
    columns = complete_basis(F, f.basis, d) + list(f.basis)
    B = Matrix.raw(F, [[col[i] for col in columns] for i in range(d)], d)
    Binv = inverse(B)
    shift = tuple(F.neg(x) for x in Binv.apply(f.base))
    return AffineMap(Binv, shift)


def flat_frame(f: Flat) -> tuple:
    """Base point and full direction frame ``[u_1..u_m, basis]`` used by
    :func:`flat_to_coordinates` (``x = base + sum y_i frame_i``)."""
    F = f.field
    return f.base, tuple(complete_basis(F, f.basis, f.ambient_dim)) + f.basis


def intersect_lines(l1: Line, l2: Line):
    """Intersection point of two distinct lines, or ``None``."""
    if l1 == l2:
        raise ValueError("lines coincide")
    F = l1.field
    if l1.direction == l2.direction:
        return None
    d = l1.dim
    M = Matrix.raw(F, [[l1.direction[i], F.neg(l2.direction[i])] for i in range(d)], 2)
    sol = solve(M, _sub(F, l2.base, l1.base))
    if sol is None:
        return None
    (s, _), _ = sol
    return l1.point_at(s)


__all__ = [
    "AffineMap", "Flat", "Line", "Point", "complete_basis", "directions_independent",
    "flat_frame", "flat_to_coordinates", "intersect_hyperplanes", "intersect_lines",
    "kernel_basis", "point_on",
]
