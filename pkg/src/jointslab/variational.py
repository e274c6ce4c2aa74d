"""Weight balancing, rounding to integer orders, and exact bound certificates.

Joints case
    Feasible weights with hypothesis (a) in equality form are exactly
    ``b[p, l] = t[l] + a[p]`` with ``t[l] = (1 - sum_{q on l} a[q]) / |l|``,
    so the solvers work over ``a`` alone.  Balancing all per-joint products
    is a graded descent on the maximizing joints followed by Newton's
    method on ``log W_p(a) = w``.

Flats case
    With (a) in inequality form the feasible weights on a line are
    ``max(0, t[l] + a[p])`` with ``t[l]`` fixed by the unit line sum, i.e.
    the Euclidean projection of ``a`` onto the simplex.  These are the
    gradients of a convex potential, so equal per-joint sums are the
    minimizers of ``potential(a) - s * sum(a)``; that function is bounded
    below exactly when no joint subset beats the global joints-per-line
    ratio, and such subsets are split off first by a min-cut.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb, factorial, prod

import networkx as nx
import numpy as np

from . import _kernels
from .configs import (
    FlatJointsConfiguration,
    JointsConfiguration,
    MultijointsConfiguration,
    is_connected,
)
from .errors import EmptyLine, InfeasibleInput, NoConvergence, NotConnected
from .polymethod import VanishingOrders, validate_orders

SPREAD_TOL = 1e-9
FEAS_TOL = 1e-12
MAX_ITER = 10**6


@dataclass(frozen=True)
class WeightAssignment:
    """Real weights; ``b[p]`` is aligned with joint ``p``'s chosen lines and
    ``levels[l]`` is the common value of ``b - a`` on line ``l``."""

    a: tuple
    b: tuple
    levels: tuple
    c: tuple | None = None

    @property
    def products(self) -> tuple:
        return tuple(prod(row) for row in self.b)

    @property
    def sums(self) -> tuple:
        return tuple(sum(row) for row in self.b)

    def spread(self, kind: str = "products") -> float:
        vals = self.products if kind == "products" else self.sums
        hi = max(vals)
        return (hi - min(vals)) / hi if hi > 0 else 0.0

    def to_json(self) -> dict:
        out = {"a": list(self.a), "b": [list(r) for r in self.b], "levels": list(self.levels)}
        if self.c is not None:
            out["c"] = list(self.c)
        return out


def _line_incidence(cfg):
    return cfg.line_incidence if isinstance(cfg, FlatJointsConfiguration) else cfg.incidence


def _require_nonempty_lines(cfg) -> None:
    for l, js in enumerate(cfg.line_joints):
        if not js:
            raise EmptyLine(f"line {l} has no chosen joints")


def feasibility_violations(cfg, w: WeightAssignment, form: str = "equality") -> dict:
    """Largest violation of each feasibility clause (0 means satisfied).

    ``form`` selects equality or inequality form for clause (a); clause (c)
    is only checked for flat configurations.
    """
    out = {"nonneg": 0.0, "a": 0.0, "b": 0.0}
    for row in w.b:
        for x in row:
            out["nonneg"] = max(out["nonneg"], -x)
    for js in cfg.line_joints:
        if not js:
            continue
        vals = [(w.b[p][s] - w.a[p], w.b[p][s]) for p, s in js]
        diffs = [v for v, _ in vals]
        pos = [v for v, x in vals if x > FEAS_TOL]
        if pos:
            if form == "equality":
                gap = max(diffs) - min(diffs)
            else:
                gap = max(pos) - min(diffs)
            out["a"] = max(out["a"], gap)
        out["b"] = max(out["b"], abs(sum(x for _, x in vals) - 1.0))
    if isinstance(cfg, FlatJointsConfiguration):
        out["c"] = 0.0
        for p, f in enumerate(cfg.flat_incidence):
            out["c"] = max(out["c"], sum(w.b[p]) - w.c[f])
    return out


def is_feasible(cfg, w: WeightAssignment, form: str = "equality", tol: float = 1e-9) -> bool:
    return all(v <= tol for v in feasibility_violations(cfg, w, form).values())


def initial_feasible(cfg) -> WeightAssignment:
    """Uniform weights ``b = 1 / |l|`` with ``a = 0``."""
    _require_nonempty_lines(cfg)
    levels = tuple(1.0 / len(js) for js in cfg.line_joints)
    inc = _line_incidence(cfg)
    b = tuple(tuple(levels[l] for l in row) for row in inc)
    a = (0.0,) * len(inc)
    c = None
    if isinstance(cfg, FlatJointsConfiguration):
        c = [0.0] * len(cfg.flats)
        for p, f in enumerate(cfg.flat_incidence):
            c[f] = max(c[f], sum(b[p]))
        c = tuple(c)
    return WeightAssignment(a, b, levels, c)


# -- products (joints case) ---------------------------------------------------


class _Products:
    def __init__(self, cfg: JointsConfiguration):
        self.inc = np.array(cfg.incidence, dtype=np.intp).reshape(cfg.num_joints, cfg.d)
        J, L = cfg.num_joints, cfg.num_lines
        S = np.zeros((L, J))
        for p, row in enumerate(cfg.incidence):
            S[list(row), p] += 1.0
        self.S = S
        self.cnt = S.sum(axis=1)
        self.R = S / self.cnt[:, None]

    def levels(self, a):
        return (1.0 - self.S @ a) / self.cnt

    def weights(self, a):
        t = self.levels(a)
        return t, t[self.inc] + a[:, None]

    def jacobian(self, B):
        inv = 1.0 / B
        Jac = -np.einsum("ps,psq->pq", inv, self.R[self.inc])
        Jac[np.diag_indices_from(Jac)] += inv.sum(axis=1)
        return Jac


def _spread_from_logs(lw) -> float:
    return max(0.0, float(-math.expm1(lw.min() - lw.max())))


def _newton_products(model: _Products, a, max_steps: int = 50, target: float = 1e-14):
    """Newton on ``log W_p(a) - w = 0`` with the gauge ``sum(delta a) = 0``.

    A step is taken only if all weights stay positive and the largest
    product does not grow; otherwise it is halved.
    """
    J = len(a)
    _, B = model.weights(a)
    lw = np.log(B).sum(axis=1)
    steps = 0
    for _ in range(max_steps):
        if _spread_from_logs(lw) <= target:
            break
        w = lw.mean()
        A = np.zeros((J + 1, J + 1))
        A[:J, :J] = model.jacobian(B)
        A[:J, J] = -1.0
        A[J, :J] = 1.0
        rhs = np.concatenate([-(lw - w), [0.0]])
        delta = np.linalg.lstsq(A, rhs, rcond=None)[0][:J]
        hi = lw.max()
        step = 1.0
        for _ in range(40):
            a2 = a + step * delta
            _, B2 = model.weights(a2)
            if (B2 > 0).all():
                lw2 = np.log(B2).sum(axis=1)
                if lw2.max() <= hi and _spread_from_logs(lw2) < _spread_from_logs(lw):
                    break
            step *= 0.5
        else:
            break
        a, B, lw = a2, B2, lw2
        steps += 1
    return a, steps, _spread_from_logs(lw)


@dataclass(frozen=True)
class BalanceResult:
    weights: WeightAssignment
    spread: float
    iterations: int
    newton_steps: int

    @property
    def common_value(self) -> float:
        vals = self.weights.products
        return sum(vals) / len(vals)


def balance_products(cfg: JointsConfiguration, tol: float = SPREAD_TOL,
                     max_iter: int = MAX_ITER) -> BalanceResult:
    """Feasible weights (equality form) whose per-joint products agree to
    relative spread ``tol``."""
    if cfg.num_joints == 0:
        raise ValueError("configuration has no joints")
    if not is_connected(cfg):
        raise NotConnected("balance each connected component separately")
    _require_nonempty_lines(cfg)
    model = _Products(cfg)
    a = np.zeros(cfg.num_joints)
    used = newton = 0
    # coarse descent, Newton polish, and more descent if Newton stalls
    for coarse in (max(tol, 1e-4), tol):
        budget = max_iter - used
        if budget <= 0:
            break
        a_list, it, spread = _kernels.products_descent(model.inc.tolist(), cfg.num_lines,
                                                       a.tolist(), coarse, budget)
        a = np.array(a_list)
        used += it
        a, steps, spread = _newton_products(model, a)
        newton += steps
        if spread <= tol:
            break
    if spread > tol:
        raise NoConvergence(f"product spread {spread:.3g} above {tol:.3g}", spread, used + newton)
    a -= a.mean()
    t, B = model.weights(a)
    w = WeightAssignment(tuple(a.tolist()), tuple(tuple(r) for r in B.tolist()), tuple(t.tolist()))
    return BalanceResult(w, spread, used, newton)


# -- sums (flats case) --------------------------------------------------------


def densest_subconfiguration(num_joints: int, line_joints) -> tuple:
    """Joint subset ``U`` maximizing ``|U| / |N(U)|``, ``N(U)`` its lines.

    Repeated min-cuts: given the current ratio ``J / L`` a cut finds ``U``
    maximizing ``L|U| - J|N(U)|``; a positive gain means a strictly denser
    subset, which becomes current.  Returns ``(joints, lines, rounds)``.
    """
    lines_of = [[] for _ in range(num_joints)]
    for l, js in enumerate(line_joints):
        for p in js:
            lines_of[p].append(l)
    U = list(range(num_joints))
    N = sorted({l for p in U for l in lines_of[p]})
    rounds = 0
    while True:
        Jc, Lc = len(U), len(N)
        g = nx.DiGraph()
        for p in U:
            g.add_edge("s", ("j", p), capacity=Lc)
            for l in lines_of[p]:
                g.add_edge(("j", p), ("l", l))
        for l in N:
            g.add_edge(("l", l), "t", capacity=Jc)
        cut, (side, _) = nx.minimum_cut(g, "s", "t")
        if Lc * Jc - cut <= 0:
            return tuple(U), tuple(N), rounds
        U = sorted(x[1] for x in side if isinstance(x, tuple) and x[0] == "j")
        N = sorted({l for p in U for l in lines_of[p]})
        rounds += 1


def _sum_hessian(weights, line_joints, J):
    H = np.zeros((J, J))
    for ws, js in zip(weights, line_joints):
        act = [p for p, x in zip(js, ws) if x > 0.0]
        if act:
            idx = np.array(act)
            H[idx[:, None], idx] -= 1.0 / len(act)
            H[idx, idx] += 1.0
    return H


def _balance_sums(line_joints, J: int, s: float, tol: float, max_iter: int):
    """Minimize ``potential(a) - s * sum(a)``; returns ``(a, weights, sums, iters)``."""
    a = np.zeros(J)

    def evaluate(x):
        ws, sums, phi = _kernels.waterfill_weights(line_joints, J, x.tolist())
        return ws, np.array(sums), phi - s * x.sum()

    ws, sums, val = evaluate(a)
    it = 0
    while it < max_iter:
        g = sums - s
        if np.abs(g).max() <= tol * s:
            break
        H = _sum_hessian(ws, line_joints, J)
        cands = [np.linalg.lstsq(H, -g, rcond=None)[0], -g]
        for d in cands:
            slope = float(g @ d)
            if slope >= 0:
                continue
            step = 1.0
            for _ in range(60):
                x = a + step * d
                ws2, sums2, val2 = evaluate(x)
                if val2 <= val + 1e-4 * step * slope:
                    break
                step *= 0.5
            else:
                continue
            a, ws, sums, val = x, ws2, sums2, val2
            break
        else:
            break
        it += 1
    return a, ws, sums, it


@dataclass(frozen=True)
class SubsetBalanceResult:
    """``config`` is the sub-configuration on ``joint_ids`` / ``line_ids``
    (indices into the input); ``weights`` live on it."""

    config: FlatJointsConfiguration
    joint_ids: tuple
    line_ids: tuple
    weights: WeightAssignment
    s: float
    iterations: int
    extractions: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(len(self.joint_ids), len(self.line_ids))


def balance_sums_with_subsets(cfg: FlatJointsConfiguration, tol: float = SPREAD_TOL,
                              max_iter: int = 1000) -> SubsetBalanceResult:
    """Densest joint subset plus weights with equal per-joint line sums ``s``.

    The subset maximizes joints per line, so ``|J'|/|L'| >= |J|/|L|``; on it
    the weights satisfy (a) in inequality form, unit line sums, and
    ``c_f = s = |L'|/|J'|`` for every flat.
    """
    if cfg.num_joints == 0:
        raise ValueError("configuration has no joints")
    plain = [[p for p, _ in js] for js in cfg.line_joints]
    U, N, rounds = densest_subconfiguration(cfg.num_joints, plain)
    sub = cfg.restrict(U)
    lj = [[p for p, _ in js] for js in sub.line_joints]
    J, L = sub.num_joints, len(sub.lines)
    s = L / J
    a, ws, sums, it = _balance_sums(lj, J, s, tol / 10, max_iter)
    spread = float((sums.max() - sums.min()) / sums.max())
    if spread > tol:
        raise NoConvergence(f"sum spread {spread:.3g} above {tol:.3g}", spread, it)
    b = [[0.0] * sub.m for _ in range(J)]
    levels = []
    for js, x in zip(sub.line_joints, ws):
        for (p, slot), v in zip(js, x):
            b[p][slot] = v
        levels.append(_kernels.waterfill([a[p] for p, _ in js]))
    w = WeightAssignment(tuple(a.tolist()), tuple(tuple(r) for r in b), tuple(levels),
                         (s,) * len(sub.flats))
    line_ids = tuple(sorted({l for p in U for l in cfg.line_incidence[p]}))
    return SubsetBalanceResult(sub, tuple(U), line_ids, w, s, it, rounds)


# -- rounding ------------------------------------------------------------------


def _ceil(x: float, snap: float = 1e-9) -> int:
    r = round(x)
    return int(r) if abs(x - r) <= snap else math.ceil(x)


def round_to_orders(cfg: JointsConfiguration, w: WeightAssignment, n: int) -> VanishingOrders:
    """``alpha = ceil(a n)``, ``beta = ceil(t n) + alpha`` along each line.

    Values within ``1e-9`` of an integer are snapped to it; if a line sum
    then falls short of ``n`` its ``ceil(t n)`` is raised.  The result is
    re-validated exactly.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not is_feasible(cfg, w, "equality", 1e-9):
        raise InfeasibleInput(f"weights are not feasible: {feasibility_violations(cfg, w)}")
    alpha = [_ceil(x * n) for x in w.a]
    level = [_ceil(t * n) for t in w.levels]
    for l, js in enumerate(cfg.line_joints):
        while js and sum(max(0, level[l] + alpha[p]) for p, _ in js) < n:
            level[l] += 1
    beta = tuple(tuple(max(0, level[l] + alpha[p]) for l in row) for p, row in enumerate(cfg.incidence))
    ord = VanishingOrders(n, tuple(alpha), beta)
    validate_orders(cfg, ord)
    return ord


def round_flat_orders(cfg: FlatJointsConfiguration, w: WeightAssignment, n: int) -> VanishingOrders:
    """``beta = max(0, ceil(t n) + alpha)`` and ``gamma_f`` the largest
    per-joint sum of ``beta`` over joints on ``f``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not is_feasible(cfg, w, "inequality", 1e-9):
        raise InfeasibleInput(f"weights are not feasible: {feasibility_violations(cfg, w, 'inequality')}")
    alpha = [_ceil(x * n) for x in w.a]
    level = [_ceil(t * n) for t in w.levels]
    for l, js in enumerate(cfg.line_joints):
        while js and sum(max(0, level[l] + alpha[p]) for p, _ in js) < n:
            level[l] += 1
    beta = tuple(tuple(max(0, level[l] + alpha[p]) for l in row)
                 for p, row in enumerate(cfg.line_incidence))
    gamma = [0] * len(cfg.flats)
    for p, f in enumerate(cfg.flat_incidence):
        gamma[f] = max(gamma[f], sum(beta[p]))
    ord = VanishingOrders(n, tuple(alpha), beta, tuple(gamma))
    validate_orders(cfg, ord)
    return ord


# -- bounds ----------------------------------------------------------------------

THEOREMS = ("main", "multijoints", "flats", "conj34")


@dataclass(frozen=True)
class BoundCertificate:
    """Exact integer comparison ``lhs <= rhs`` plus ``J / bound`` as a float."""

    theorem: str
    counts: dict
    lhs: int
    rhs: int
    holds: bool
    ratio: float
    equality: bool = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "equality", self.lhs == self.rhs)

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "counts": self.counts, "lhs": str(self.lhs),
                "rhs": str(self.rhs), "holds": self.holds, "equality": self.equality,
                "ratio": self.ratio}


def _ratio(J: int, log_bound: float) -> float:
    if J == 0:
        return 0.0
    if log_bound == -math.inf:
        return math.inf
    return math.exp(math.log(J) - log_bound)


def _log(x: int) -> float:
    return math.log(x) if x > 0 else -math.inf


def certify_bound(theorem: str, J: int, L=None, d: int | None = None, m: int | None = None,
                  F: int | None = None) -> BoundCertificate:
    """Integer form of each bound (both sides raised to a power):

    * ``main``: ``d^(d-1) J^(d-1) <= (d-1)! L^d``
    * ``multijoints``: ``J^(d-1) <= d! L_1 ... L_d`` (``L`` a list)
    * ``flats``: ``J^m <= C(d, m) L^m F``
    * ``conj34``: ``J^2 <= 2 L_1 L_2 L_3``
    """
    if J < 0:
        raise ValueError("J must be nonnegative")
    if theorem == "main":
        if d is None or d < 2 or L is None or L < 0:
            raise ValueError("main bound needs d >= 2 and L >= 0")
        lhs = d ** (d - 1) * J ** (d - 1)
        rhs = factorial(d - 1) * L ** d
        log_bound = math.lgamma(d) / (d - 1) - math.log(d) + d / (d - 1) * _log(L)
        counts = {"J": J, "L": L, "d": d}
    elif theorem in ("multijoints", "conj34"):
        Ls = list(L)
        if theorem == "conj34":
            if d not in (None, 3) or len(Ls) != 3:
                raise ValueError("conj34 is the d = 3 case with three families")
            d = 3
            lhs, rhs = J ** 2, 2 * prod(Ls)
            log_bound = 0.5 * math.log(2) + 0.5 * sum(_log(x) for x in Ls)
        else:
            d = len(Ls) if d is None else d
            if d < 2 or len(Ls) != d:
                raise ValueError("multijoints bound needs d >= 2 families")
            lhs, rhs = J ** (d - 1), factorial(d) * prod(Ls)
            log_bound = (math.lgamma(d + 1) + sum(_log(x) for x in Ls)) / (d - 1)
        if any(x < 0 for x in Ls):
            raise ValueError("family sizes must be nonnegative")
        counts = {"J": J, "L": Ls, "d": d}
    elif theorem == "flats":
        if None in (d, m, L, F) or not 1 <= m < d:
            raise ValueError("flats bound needs d, m (1 <= m < d), L and F")
        lhs = J ** m
        rhs = comb(d, m) * L ** m * F
        log_bound = math.log(comb(d, m)) / m + _log(L) + _log(F) / m
        counts = {"J": J, "L": L, "F": F, "d": d, "m": m}
    else:
        raise ValueError(f"unknown theorem {theorem!r}; choose from {THEOREMS}")
    return BoundCertificate(theorem, counts, lhs, rhs, lhs <= rhs, _ratio(J, log_bound))


def main_bound_max_joints(L: int, d: int) -> int:
    """Largest ``J`` allowed by the main bound for ``L`` lines."""
    if L == 0:
        return 0
    J = int(math.exp(math.lgamma(d) / (d - 1) - math.log(d) + d / (d - 1) * math.log(L)))
    while not certify_bound("main", J, L, d).holds:
        J -= 1
    while certify_bound("main", J + 1, L, d).holds:
        J += 1
    return J


def main_bound_ratio(J: int, L: int, d: int) -> float:
    return certify_bound("main", J, L, d).ratio


# -- the AM-GM chain ---------------------------------------------------------------


@dataclass(frozen=True)
class ChainLink:
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class ChainReport:
    links: tuple
    W: float

    def holds(self, tol: float = 1e-9) -> bool:
        return all(x.slack >= -tol for x in self.links)

    @property
    def min_slack(self) -> float:
        return min(x.slack for x in self.links)


def verify_amgm_chain(cfg, w: WeightAssignment, families: tuple | None = None) -> ChainReport:
    """Each step from balanced weights to the bound, numerically.

    ``families`` (one family index per line) switches to the per-family
    normalization used for multijoints; a :class:`MultijointsConfiguration`
    may be passed directly.
    """
    if isinstance(cfg, MultijointsConfiguration):
        cfg, families = cfg.as_joints_configuration()
    if not is_feasible(cfg, w, "equality", 1e-9):
        raise InfeasibleInput(f"weights are not feasible: {feasibility_violations(cfg, w)}")
    d, J = cfg.d, cfg.num_joints
    W_p = w.products
    W = sum(W_p) / J
    links = []
    if families is None:
        L = cfg.num_lines
        total = sum(sum(r) for r in w.b)
        links.append(ChainLink("AM-GM", sum(d * x ** (1 / d) for x in W_p), total))
        links.append(ChainLink("line sums", total, L))
        links.append(ChainLink("W <= L^d/(d^d J^d)", W, L ** d / (d ** d * J ** d)))
        links.append(ChainLink("1/d! <= J W", 1 / factorial(d), J * W))
        links.append(ChainLink("J W <= L^d/(d^d J^(d-1))", J * W, L ** d / (d ** d * J ** (d - 1))))
    else:
        sizes = [0] * d
        for f in families:
            sizes[f] += 1
        by_slot = [[families[l] for l in row] for row in cfg.incidence]
        norm = [[x / sizes[f] for x, f in zip(r, fs)] for r, fs in zip(w.b, by_slot)]
        PL = prod(sizes)
        links.append(ChainLink("AM-GM", sum(d * prod(r) ** (1 / d) for r in norm),
                               sum(sum(r) for r in norm)))
        links.append(ChainLink("family sums", sum(sum(r) for r in norm), d))
        links.append(ChainLink("W <= L_1...L_d/J^d", W, PL / J ** d))
        links.append(ChainLink("1/d! <= J W", 1 / factorial(d), J * W))
        links.append(ChainLink("J W <= L_1...L_d/J^(d-1)", J * W, PL / J ** (d - 1)))
    return ChainReport(tuple(links), W)


def verify_flat_chain(cfg: FlatJointsConfiguration, res: SubsetBalanceResult) -> ChainReport:
    """``s J' = L'``, ``s <= L/J`` and ``1/C(d,m) <= sum c_f^m = F s^m <= F L^m / J^m``."""
    d, m = cfg.d, cfg.m
    J, L, F = cfg.num_joints, len(cfg.lines), len(cfg.flats)
    Jp, Lp = len(res.joint_ids), len(res.line_ids)
    s = res.s
    csum = sum(x ** m for x in res.weights.c)
    links = (
        ChainLink("s J' = L' (<=)", s * Jp, Lp),
        ChainLink("s J' = L' (>=)", Lp, s * Jp),
        ChainLink("s <= L/J", s, L / J),
        ChainLink("1/C(d,m) <= sum c_f^m", 1 / comb(d, m), csum),
        ChainLink("sum c_f^m <= F L^m / J^m", csum, F * L ** m / J ** m),
    )
    return ChainReport(links, s)
