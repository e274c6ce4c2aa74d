"""Sparse polynomials, vanishing-order constraint systems and their certificates.

Vanishing is coefficient based: after recentering at a joint and
re-coordinatizing along its chosen directions, the coefficients of the
prescribed monomials must be zero.  No derivatives, hence no division by
factorials, so every characteristic is handled uniformly.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod
from typing import Callable, Sequence

from .algebra import Field, Matrix, PrimeField, kernel_basis, rref
from .configs import AugmentedConfiguration, FlatJointsConfiguration, JointsConfiguration
from .errors import DependentDirections, HypothesesViolated, InvalidOrders
from .geometry import directions_independent, flat_frame

DEFAULT_COLUMN_BUDGET = comb(14, 3)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomials_below(d: int, n: int) -> tuple:
    """Exponent vectors of total degree ``< n``, by degree then descending lex."""
    return tuple(mu for deg in range(max(n, 0)) for mu in _compositions(deg, d))


def max_degree_for_budget(d: int, budget: int = DEFAULT_COLUMN_BUDGET) -> int:
    """Largest ``n`` with ``C(n + d - 1, d) <= budget``."""
    n = 0
    while comb(n + d, d) <= budget:
        n += 1
    return n


class Polynomial:
    """Sparse polynomial: exponent tuple -> nonzero raw field value."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        clean = {}
        for mu, c in (terms or {}).items():
            mu = tuple(mu)
            if len(mu) != nvars or any(e < 0 for e in mu):
                raise ValueError(f"bad exponent {mu}")
            c = field.coerce(c)
            if not field.is_zero(c):
                clean[mu] = c
        self.terms = clean

    @classmethod
    def constant(cls, field: Field, nvars: int, c) -> "Polynomial":
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, field: Field, nvars: int, i: int) -> "Polynomial":
        return cls(field, nvars, {tuple(int(j == i) for j in range(nvars)): 1})

    @classmethod
    def from_vector(cls, field: Field, nvars: int, monomials: Sequence, vector: Sequence) -> "Polynomial":
        return cls(field, nvars, dict(zip(monomials, vector)))

    def to_vector(self, monomials: Sequence) -> list:
        missing = set(self.terms) - set(monomials)
        if missing:
            raise ValueError(f"monomials {sorted(missing)} outside the basis")
        return [self.terms.get(mu, self.field.zero) for mu in monomials]

    @property
    def degree(self):
        """Total degree; ``-inf`` for the zero polynomial."""
        return max((sum(mu) for mu in self.terms), default=float("-inf"))

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mu) -> object:
        return self.terms.get(tuple(mu), self.field.zero)

    def _check(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.field, self.nvars, other)
        if other.field != self.field or other.nvars != self.nvars:
            raise ValueError("polynomials live in different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        F = self.field
        out = dict(self.terms)
        for mu, c in other.terms.items():
            out[mu] = F.add(out.get(mu, F.zero), c)
        return Polynomial(F, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.field, self.nvars, {mu: self.field.neg(c) for mu, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        return Polynomial(self.field, self.nvars, _mul_terms(self.field, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.field, self.nvars, 1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.field == other.field and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def evaluate(self, point: Sequence):
        F = self.field
        point = [F.coerce(x) for x in point]
        acc = F.zero
        for mu, c in self.terms.items():
            term = c
            for x, e in zip(point, mu):
                for _ in range(e):
                    term = F.mul(term, x)
            acc = F.add(acc, term)
        return acc

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mu in sorted(self.terms, key=lambda m: (-sum(m), tuple(-e for e in m))):
            mono = "*".join(f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(mu) if e)
            c = str(self.terms[mu])
            parts.append(f"{c}*{mono}" if mono else c)
        return " + ".join(parts)


def _mul_terms(F: Field, a: dict, b: dict, keep: Callable | None = None) -> dict:
    if isinstance(F, PrimeField):
        # plain integer accumulation, one reduction at the end
        acc: dict = {}
        for mu, c in a.items():
            for nu, e in b.items():
                w = tuple(x + y for x, y in zip(mu, nu))
                if keep is None or keep(w):
                    acc[w] = acc.get(w, 0) + c * e
        p = F.p
        return {w: c % p for w, c in acc.items() if c % p}
    out: dict = {}
    for mu, c in a.items():
        for nu, e in b.items():
            w = tuple(x + y for x, y in zip(mu, nu))
            if keep is not None and not keep(w):
                continue
            out[w] = F.add(out.get(w, F.zero), F.mul(c, e))
    return {w: c for w, c in out.items() if not F.is_zero(c)}


class _LocalExpander:
    """Expansions of ``x^mu`` under ``x = point + sum_j y_j dirs[j]``.

    Terms outside the down-closed exponent set ``keep`` are dropped as soon
    as they appear, which is exact because products of dropped terms can
    never land back inside a down-closed set.
    """

    def __init__(self, field: Field, point: Sequence, dirs: Sequence[Sequence], keep=None):
        self.F = field
        self.keep = keep
        d = len(point)
        self.linear = []
        for i in range(d):
            terms = {(0,) * d: point[i]}
            for j, v in enumerate(dirs):
                terms[tuple(int(k == j) for k in range(d))] = v[i]
            self.linear.append({w: c for w, c in terms.items()
                                if not field.is_zero(c) and (keep is None or keep(w))})
        self.memo = {(0,) * d: {(0,) * d: field.one}}

    def __call__(self, mu: tuple) -> dict:
        got = self.memo.get(mu)
        if got is not None:
            return got
        i = next(k for k, e in enumerate(mu) if e)
        prev = mu[:i] + (mu[i] - 1,) + mu[i + 1:]
        got = _mul_terms(self.F, self(prev), self.linear[i], self.keep)
        self.memo[mu] = got
        return got


def _require_independent(field: Field, dirs) -> None:
    if len(dirs) != len(dirs[0]) or not directions_independent(field, dirs):
        raise DependentDirections("expansion directions must form a basis")


def expand_at(g: Polynomial, p, dirs: Sequence[Sequence]) -> Polynomial:
    """``g(p + y_1 dirs[0] + ... + y_d dirs[d-1])`` as a polynomial in ``y``."""
    F = g.field
    coords = p.coords if hasattr(p, "coords") else F.vec(p)
    dirs = [F.vec(v) for v in dirs]
    _require_independent(F, dirs)
    ex = _LocalExpander(F, coords, dirs)
    out: dict = {}
    for mu, c in g.terms.items():
        for w, e in ex(mu).items():
            out[w] = F.add(out.get(w, F.zero), F.mul(c, e))
    return Polynomial(F, g.nvars, out)


def _box(orders: Sequence[int]):
    return lambda w: all(x < b for x, b in zip(w, orders))


def vanishes_to_order(g: Polynomial, p, dirs: Sequence[Sequence], beta: Sequence[int]) -> bool:
    """All local coefficients ``y^w`` with ``w_i < beta_i`` vanish."""
    local = expand_at(g, p, dirs)
    inside = _box(beta)
    return not any(inside(w) for w in local.terms)


def vanishes_on_flat(g: Polynomial, flat, m: int, gamma: int) -> bool:
    """All coefficients with transverse exponent sum ``< gamma`` vanish in
    the flat's adapted coordinates."""
    base, frame = flat_frame(flat)
    local = expand_at(g, base, frame)
    return not any(sum(w[:m]) < gamma for w in local.terms)


# -- orders ------------------------------------------------------------------


@dataclass(frozen=True)
class VanishingOrders:
    """Integer orders: ``beta[p]`` is aligned with joint ``p``'s chosen lines;
    ``gamma`` (flat case) has one entry per flat."""

    n: int
    alpha: tuple
    beta: tuple
    gamma: tuple | None = None

    def __post_init__(self):
        if self.n < 0:
            raise InvalidOrders("n must be nonnegative")
        if len(self.alpha) != len(self.beta):
            raise InvalidOrders("alpha and beta must have one entry per joint")
        if any(b < 0 for row in self.beta for b in row):
            raise InvalidOrders("beta must be nonnegative")
        if self.gamma is not None and any(g < 0 for g in self.gamma):
            raise InvalidOrders("gamma must be nonnegative")

    @classmethod
    def uniform(cls, cfg, n: int, beta: int = 1) -> "VanishingOrders":
        """``alpha = 0`` and a constant ``beta`` (joints configurations)."""
        return cls(n, (0,) * cfg.num_joints, tuple((beta,) * len(r) for r in cfg.incidence))

    def to_json(self) -> dict:
        out = {"n": self.n, "alpha": list(self.alpha), "beta": [list(r) for r in self.beta]}
        if self.gamma is not None:
            out["gamma"] = list(self.gamma)
        return out


@dataclass(frozen=True)
class OrdersCheck:
    equality_form: bool


def _line_incidence(cfg):
    return cfg.incidence if isinstance(cfg, JointsConfiguration) else cfg.line_incidence


def _check_shape(cfg, ord: VanishingOrders) -> None:
    rows = _line_incidence(cfg)
    if len(ord.beta) != len(rows):
        raise InvalidOrders(f"orders cover {len(ord.beta)} joints, configuration has {len(rows)}")
    for p, (r, b) in enumerate(zip(rows, ord.beta)):
        if len(r) != len(b):
            raise InvalidOrders(f"joint {p}: {len(b)} orders for {len(r)} chosen lines")
    if isinstance(cfg, FlatJointsConfiguration):
        if ord.gamma is None or len(ord.gamma) != len(cfg.flats):
            raise InvalidOrders("flat configurations need one gamma per flat")


def validate_orders(cfg, ord: VanishingOrders) -> OrdersCheck:
    """Check hypotheses (a), (b) and, for flats, (c) exactly.

    Raises :class:`HypothesesViolated` naming the clause and the offending
    line, joints or flat.  Lines with no chosen joints carry no condition.
    Also reports whether (a) holds in equality form.
    """
    _check_shape(cfg, ord)
    equality = True
    for l, js in enumerate(cfg.line_joints):
        if not js:
            continue
        vals = [(ord.beta[p][s] - ord.alpha[p], p, ord.beta[p][s]) for p, s in js]
        lo = min(vals)
        pos = [v for v in vals if v[2] > 0]
        if pos:
            hi = max(pos)
            if lo[0] < hi[0]:
                raise HypothesesViolated(
                    "a", f"line {l}: beta-alpha at joint {lo[1]} is {lo[0]} "
                         f"< {hi[0]} at joint {hi[1]} (which has positive beta)")
            if any(v[0] != hi[0] for v in pos):
                equality = False
        total = sum(v[2] for v in vals)
        if total < ord.n:
            raise HypothesesViolated("b", f"line {l}: sum of beta is {total} < n = {ord.n}")
    if isinstance(cfg, FlatJointsConfiguration):
        for p, f in enumerate(cfg.flat_incidence):
            s = sum(ord.beta[p])
            if s > ord.gamma[f]:
                raise HypothesesViolated("c", f"joint {p}: sum of beta is {s} > gamma = {ord.gamma[f]} on flat {f}")
    return OrdersCheck(equality)


def lift_flat_orders(aug: AugmentedConfiguration, ord: VanishingOrders) -> VanishingOrders:
    """Orders on the augmented joints configuration: the new lines get ``n``."""
    new = set(aug.new_lines)
    beta = []
    for p, row in enumerate(aug.config.incidence):
        old = list(ord.beta[p])
        beta.append(tuple(old + [ord.n for l in row if l in new]))
    return VanishingOrders(ord.n, ord.alpha, tuple(beta))


# -- constraint systems --------------------------------------------------------


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows are raw field values over the monomials of degree ``< n``;
    ``tags[i]`` is ``("joint", p, w)`` or ``("flat", f, w)``."""

    field: Field
    d: int
    n: int
    monomials: tuple
    rows: tuple
    tags: tuple

    @property
    def ncols(self) -> int:
        return len(self.monomials)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def matrix(self) -> Matrix:
        return Matrix.raw(self.field, [list(r) for r in self.rows], self.ncols)


def _check_budget(d: int, n: int, budget: int | None) -> None:
    if budget is not None and comb(n + d - 1, d) > budget:
        raise InvalidOrders(f"n = {n} gives {comb(n + d - 1, d)} columns, over the budget of {budget}")


def _local_rows(field, monomials, point, dirs, exps):
    """Rows for the local exponents ``exps``, which must be down-closed."""
    ex = _LocalExpander(field, point, dirs, frozenset(exps).__contains__)
    cols = [ex(mu) for mu in monomials]
    return [[c.get(w, field.zero) for c in cols] for w in exps]


def _box_exponents(beta):
    if not beta:
        yield ()
        return
    for first in range(beta[0]):
        for rest in _box_exponents(beta[1:]):
            yield (first,) + rest


def assemble_joint_constraints(cfg: JointsConfiguration, ord: VanishingOrders,
                               budget: int | None = DEFAULT_COLUMN_BUDGET) -> ConstraintSystem:
    """One row per joint ``p`` and local exponent ``w`` in the box
    ``w_i < beta[p][i]``; zero rows (``|w| >= n``) are kept so the row count
    is exactly ``sum_p prod_i beta[p][i]``."""
    _check_shape(cfg, ord)
    _check_budget(cfg.d, ord.n, budget)
    F, d, n = cfg.field, cfg.d, ord.n
    monomials = monomials_below(d, n)
    rows, tags = [], []
    for p, pt in enumerate(cfg.joints):
        beta = ord.beta[p]
        if not all(beta):
            continue
        dirs = cfg.directions_at(p)
        exps = list(_box_exponents(beta))
        inside = [w for w in exps if sum(w) < n]
        local = dict(zip(inside, _local_rows(F, monomials, pt.coords, dirs, inside)))
        zero = [F.zero] * len(monomials)
        for w in exps:
            rows.append(tuple(local.get(w, zero)))
            tags.append(("joint", p, w))
    return ConstraintSystem(F, d, n, monomials, tuple(rows), tuple(tags))


def flat_row_bound(n: int, d: int, m: int, gamma: int) -> int:
    return comb(n + d - m - 1, d - m) * comb(gamma + m - 1, m)


def assemble_flat_constraints(cfg: FlatJointsConfiguration, ord: VanishingOrders,
                              budget: int | None = DEFAULT_COLUMN_BUDGET) -> ConstraintSystem:
    """Per flat, one row per local exponent ``w`` with ``|w| < n`` and
    ``w_1 + ... + w_m < gamma_f`` in the flat's adapted coordinates."""
    _check_shape(cfg, ord)
    _check_budget(cfg.d, ord.n, budget)
    F, d, m, n = cfg.field, cfg.d, cfg.m, ord.n
    monomials = monomials_below(d, n)
    rows, tags = [], []
    for f, flat in enumerate(cfg.flats):
        gamma = ord.gamma[f]
        keep = lambda w, gamma=gamma: sum(w) < n and sum(w[:m]) < gamma
        exps = [w for w in monomials if keep(w)]
        if not exps:
            continue
        base, frame = flat_frame(flat)
        for w, row in zip(exps, _local_rows(F, monomials, base, frame, exps)):
            rows.append(tuple(row))
            tags.append(("flat", f, w))
    return ConstraintSystem(F, d, n, monomials, tuple(rows), tuple(tags))


@dataclass(frozen=True)
class DegreeCertificate:
    kernel_trivial: bool
    rank: int
    nrows: int
    ncols: int
    witness: Polynomial | None = None


def certify_degree_bound(cs: ConstraintSystem) -> DegreeCertificate:
    """Trivial kernel means no nonzero polynomial of degree ``< n`` meets
    the constraints; otherwise a kernel vector is returned as a witness."""
    if cs.ncols == 0:
        return DegreeCertificate(True, 0, cs.nrows, 0)
    # zero rows change neither the rank nor the kernel
    M = Matrix.raw(cs.field, [list(r) for r in cs.rows if any(r)], cs.ncols)
    _, r, _ = rref(M)
    if r == cs.ncols:
        return DegreeCertificate(True, r, cs.nrows, cs.ncols)
    vec = kernel_basis(M)[0]
    witness = Polynomial.from_vector(cs.field, cs.d, cs.monomials, vec)
    return DegreeCertificate(False, r, cs.nrows, cs.ncols, witness)


@dataclass(frozen=True)
class CountingReport:
    lhs: int
    rhs: int
    holds: bool
    equality_form: bool


def check_counting_inequality(cfg, ord: VanishingOrders) -> CountingReport:
    """Exact evaluation of the dimension-counting inequality.

    The orders are validated first; a failure of the inequality for valid
    orders would contradict the degree bound and is raised as an
    ``AssertionError``.
    """
    check = validate_orders(cfg, ord)
    d, n = cfg.d, ord.n
    rhs = comb(n + d - 1, d)
    if isinstance(cfg, FlatJointsConfiguration):
        m = cfg.m
        lhs = comb(n + d - m - 1, d - m) * sum(comb(g + m - 1, m) for g in ord.gamma)
    else:
        lhs = sum(prod(b) for b in ord.beta)
    if lhs < rhs:
        raise AssertionError(f"counting inequality fails for validated orders: {lhs} < {rhs}")
    return CountingReport(lhs, rhs, True, check.equality_form)
