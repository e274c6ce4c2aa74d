"""Exact scalars (rationals and prime fields) and dense exact linear algebra.

Field objects operate on *raw* values: ``Fraction`` for the rationals and
``int`` residues in ``[0, p)`` for prime fields.  Geometry and the
polynomial machinery work with raw tuples for speed; :class:`FieldElement`
wraps a raw value for callers that want operator syntax and field checks.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _kernels
from .errors import DivisionByZero, MixedFields

DEFAULT_PRIME = 10007

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    r, s = n - 1, 0
    while r % 2 == 0:
        r //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, r, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Common surface of :class:`RationalField` and :class:`PrimeField`."""

    descriptor: str

    def __call__(self, value) -> "FieldElement":
        return FieldElement(self.coerce(value), self)

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def vec(self, values: Iterable) -> tuple:
        return tuple(self.coerce(v) for v in values)


@dataclass(frozen=True)
class RationalField(Field):
    descriptor = "rational"

    def coerce(self, value) -> Fraction:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise MixedFields(f"{value.field.descriptor} element used in {self.descriptor}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, float):
            raise TypeError("floats are not exact field values")
        return Fraction(value)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def parse(self, text: str) -> Fraction:
        return Fraction(text.strip())

    def format(self, a) -> str:
        return str(a)

    def __repr__(self):
        return "QQ"


@dataclass(frozen=True)
class PrimeField(Field):
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"field characteristic {self.p!r} is not prime")

    @property
    def descriptor(self) -> str:
        return f"prime:{self.p}"

    def coerce(self, value) -> int:
        if isinstance(value, FieldElement):
            if value.field != self:
                raise MixedFields(f"{value.field.descriptor} element used in {self.descriptor}")
            return value.value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise DivisionByZero(f"{value} has no image mod {self.p}")
            return value.numerator * pow(value.denominator, -1, self.p) % self.p
        if isinstance(value, float):
            raise TypeError("floats are not exact field values")
        return int(value) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return a * b % self.p

    def neg(self, a):
        return -a % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise DivisionByZero(f"inverse of zero mod {self.p}")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a == 0

    def parse(self, text: str) -> int:
        text = text.strip()
        if " mod " in text:
            value, _, modulus = text.partition(" mod ")
            if int(modulus) != self.p:
                raise MixedFields(f"residue {text!r} read into {self.descriptor}")
            text = value
        if "/" in text:
            return self.coerce(Fraction(text))
        return int(text) % self.p

    def format(self, a) -> str:
        return f"{a} mod {self.p}"

    def __repr__(self):
        return f"GF({self.p})"


QQ = RationalField()


def field_from_descriptor(text: str) -> Field:
    if text == "rational":
        return QQ
    if text.startswith("prime:"):
        return PrimeField(int(text[len("prime:"):]))
    raise ValueError(f"unknown field descriptor {text!r}")


def default_field() -> PrimeField:
    """The verification field, ``F_p`` with ``p`` from ``JOINTSLAB_PRIME``."""
    return PrimeField(int(os.environ.get("JOINTSLAB_PRIME", DEFAULT_PRIME)))


class FieldElement:
    __slots__ = ("value", "field")

    def __init__(self, value, field: Field):
        self.value = value
        self.field = field

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MixedFields(f"{self.field.descriptor} vs {other.field.descriptor}")
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field.add(self.value, self._other(other)), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field.sub(self.value, self._other(other)), self.field)

    def __rsub__(self, other):
        return FieldElement(self.field.sub(self._other(other), self.value), self.field)

    def __mul__(self, other):
        return FieldElement(self.field.mul(self.value, self._other(other)), self.field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field.div(self.value, self._other(other)), self.field)

    def __rtruediv__(self, other):
        return FieldElement(self.field.div(self._other(other), self.value), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __repr__(self):
        return f"{self.field!r}({self.field.format(self.value)})"


# -- dense matrices ---------------------------------------------------------


@dataclass
class Matrix:
    field: Field
    rows: list
    ncols: int = -1

    def __post_init__(self):
        self.rows = [[self.field.coerce(x) for x in row] for row in self.rows]
        if self.ncols < 0:
            if not self.rows:
                raise ValueError("empty matrix needs an explicit column count")
            self.ncols = len(self.rows[0])
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def raw(cls, field: Field, rows: list, ncols: int) -> "Matrix":
        """Wrap already-coerced rows without copying."""
        m = cls.__new__(cls)
        m.field, m.rows, m.ncols = field, rows, ncols
        return m

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, [[0] * ncols for _ in range(nrows)], ncols)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple:
        return (self.nrows, self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.field == other.field and self.ncols == other.ncols and self.rows == other.rows

    def copy(self) -> "Matrix":
        return Matrix.raw(self.field, [list(r) for r in self.rows], self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix.raw(self.field, [list(c) for c in zip(*self.rows)] if self.rows else
                          [[] for _ in range(self.ncols)], self.nrows)

    def apply(self, vector: Sequence) -> tuple:
        F = self.field
        out = []
        for row in self.rows:
            acc = F.zero
            for x, y in zip(row, vector):
                if x and y:
                    acc = F.add(acc, F.mul(x, y))
            out.append(acc)
        return tuple(out)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if other.field != self.field:
            raise MixedFields("matrix product across fields")
        cols = other.transpose().rows
        return Matrix.raw(self.field, [list(Matrix.raw(self.field, cols, self.ncols).apply(r))
                                       for r in self.rows], other.ncols)


def _rref_generic(field: Field, rows: list, ncols: int):
    rows = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        k = next((i for i in range(r, len(rows)) if not field.is_zero(rows[i][c])), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = field.inv(rows[r][c])
        rows[r] = [field.mul(x, inv) for x in rows[r]]
        pivot_row = rows[r]
        for i in range(len(rows)):
            if i != r and not field.is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(rows[i], pivot_row)]
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(M: Matrix):
    """Reduced row-echelon form.

    Returns ``(R, rank, pivot_columns)`` where ``R`` has the same shape as
    ``M`` (zero rows kept at the bottom).
    """
    F = M.field
    if isinstance(F, PrimeField) and F.p < _kernels.MAX_KERNEL_PRIME:
        rows, pivots = _kernels.rref_mod_p(M.rows, M.ncols, F.p)
    else:
        rows, pivots = _rref_generic(F, M.rows, M.ncols)
    return Matrix.raw(F, rows, M.ncols), len(pivots), pivots


def rank(M: Matrix) -> int:
    return rref(M)[1]


def kernel_basis(M: Matrix) -> list:
    """Basis of the right null space as raw tuples; empty iff trivial."""
    F = M.field
    R, r, pivots = rref(M)
    pivot_set = set(pivots)
    basis = []
    for f in range(M.ncols):
        if f in pivot_set:
            continue
        v = [F.zero] * M.ncols
        v[f] = F.one
        for i, c in enumerate(pivots):
            v[c] = F.neg(R.rows[i][f])
        basis.append(tuple(v))
    return basis


def solve(M: Matrix, rhs: Sequence):
    """Solve ``M x = rhs``.

    Returns ``(particular, kernel)`` or ``None`` when the system is
    inconsistent.
    """
    F = M.field
    aug = Matrix.raw(F, [list(row) + [F.coerce(b)] for row, b in zip(M.rows, rhs)], M.ncols + 1)
    R, _, pivots = rref(aug)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [F.zero] * M.ncols
    for i, c in enumerate(pivots):
        x[c] = R.rows[i][M.ncols]
    return tuple(x), kernel_basis(M)


def inverse(M: Matrix) -> Matrix:
    n = M.nrows
    if n != M.ncols:
        raise ValueError("inverse of a non-square matrix")
    F = M.field
    aug = Matrix.raw(F, [list(row) + [F.one if i == j else F.zero for j in range(n)]
                         for i, row in enumerate(M.rows)], 2 * n)
    R, _, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return Matrix.raw(F, [row[n:] for row in R.rows], n)
