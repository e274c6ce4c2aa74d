import itertools
import math
import random
from math import comb, factorial, prod

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointslab import _kernels
from jointslab.configs import (
    FlatJointsConfiguration,
    connected_components,
    detect_joints,
    generate_generic_flat_config,
    generate_generic_hyperplane_config,
    generate_k4_blowup_multijoints,
)
from jointslab.algebra import QQ
from jointslab.errors import EmptyLine, InfeasibleInput, NotConnected
from jointslab.geometry import Flat, Line, Point
from jointslab.polymethod import check_counting_inequality, validate_orders
from jointslab.variational import (
    WeightAssignment,
    balance_products,
    balance_sums_with_subsets,
    certify_bound,
    densest_subconfiguration,
    feasibility_violations,
    initial_feasible,
    is_feasible,
    main_bound_max_joints,
    round_flat_orders,
    round_to_orders,
    verify_amgm_chain,
    verify_flat_chain,
)

AXES = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def single_joint():
    return detect_joints([Line.through(QQ, (0, 0, 0), v) for v in AXES])


def random_component(seed):
    rng = random.Random(seed)
    cfg = generate_generic_hyperplane_config(rng.randint(4, 7), 3)
    keep = rng.sample(range(cfg.num_joints), rng.randint(1, cfg.num_joints))
    return connected_components(cfg.restrict(keep))[0]


def test_initial_feasible_examples():
    cfg = generate_generic_hyperplane_config(4, 3)
    w = initial_feasible(cfg)
    assert set(w.a) == {0.0}
    assert {x for r in w.b for x in r} == {0.5}
    assert is_feasible(cfg, w)
    one = initial_feasible(single_joint())
    assert one.b == ((1.0, 1.0, 1.0),)


def test_empty_line_is_rejected():
    cfg = generate_generic_hyperplane_config(4, 3)
    wider = type(cfg)(cfg.field, 3, cfg.lines, cfg.joints[:1], cfg.incidence[:1])
    with pytest.raises(EmptyLine):
        initial_feasible(wider)


def test_balance_examples():
    res = balance_products(generate_generic_hyperplane_config(4, 3))
    assert all(abs(x - 0.125) < 1e-12 for x in res.weights.products)
    chain = verify_amgm_chain(generate_generic_hyperplane_config(4, 3), res.weights)
    assert chain.holds() and abs(chain.min_slack) < 1e-9
    one = balance_products(single_joint())
    assert one.weights.products == pytest.approx((1.0,))
    five = generate_generic_hyperplane_config(5, 3)
    res = balance_products(five)
    assert sum(res.weights.products) >= 1 / 6 - 1e-9
    assert verify_amgm_chain(five, res.weights).holds()


def test_disconnected_input_rejected():
    cfg = generate_generic_hyperplane_config(6, 3)
    comps = connected_components(cfg.restrict([0, 19]))
    assert len(comps) == 2
    with pytest.raises(NotConnected):
        balance_products(cfg.restrict([0, 19]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_balanced_weights_are_feasible(seed):
    cfg = random_component(seed)
    res = balance_products(cfg)
    assert res.spread <= 1e-9
    assert is_feasible(cfg, res.weights, "equality", 1e-12)
    assert sum(res.weights.products) >= 1 / 6 - 1e-9
    assert verify_amgm_chain(cfg, res.weights).holds(1e-9)


@pytest.mark.parametrize("seed", range(8))
def test_descent_never_raises_the_maximum(seed):
    cfg = random_component(seed)
    inc = [list(r) for r in cfg.incidence]
    start = [0.0] * cfg.num_joints
    maxima = []
    for budget in range(0, 40):
        a, _, _ = _kernels.products_descent(inc, cfg.num_lines, start, 0.0, budget)
        t = [(1 - sum(a[p] for p, _ in js)) / len(js) for js in cfg.line_joints]
        maxima.append(max(prod(t[l] + a[p] for l in row) for p, row in enumerate(cfg.incidence)))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(maxima, maxima[1:]))
    final = balance_products(cfg).weights.products
    assert max(final) <= maxima[0] * (1 + 1e-12)


def test_rounding_examples():
    cfg = generate_generic_hyperplane_config(4, 3)
    w = initial_feasible(cfg)
    ord = round_to_orders(cfg, w, 10)
    assert {x for r in ord.beta for x in r} == {5}
    assert all(sum(ord.beta[p][s] for p, s in js) == 10 for js in cfg.line_joints)
    zero = round_to_orders(cfg, w, 0)
    assert {x for r in zero.beta for x in r} == {0}
    bad = WeightAssignment(w.a, tuple((0.9, 0.9, 0.9) for _ in w.b), w.levels)
    with pytest.raises(InfeasibleInput):
        round_to_orders(cfg, bad, 3)
    assert feasibility_violations(cfg, bad)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rounding_validates_for_every_n(seed):
    cfg = random_component(seed)
    w = balance_products(cfg).weights
    for n in range(1, 60):
        validate_orders(cfg, round_to_orders(cfg, w, n))
    assert check_counting_inequality(cfg, round_to_orders(cfg, w, 100)).holds


def test_bound_examples():
    c = certify_bound("main", 4, 6, 3)
    assert (c.lhs, c.rhs, c.holds) == (144, 432, True)
    assert c.ratio == pytest.approx(4 / (math.sqrt(2) / 3 * 6 ** 1.5), rel=1e-12)
    c = certify_bound("conj34", 4, [2, 2, 2])
    assert (c.lhs, c.rhs, c.equality) == (16, 16, True)
    c = certify_bound("main", 1, 2, 2)
    assert (c.lhs, c.rhs, c.holds) == (2, 4, True)
    assert certify_bound("main", 0, 0, 3).holds
    assert certify_bound("flats", 5, 10, 4, 2, 5).holds
    with pytest.raises(ValueError):
        certify_bound("flats", 5, 10, 4, 4, 5)
    with pytest.raises(ValueError):
        certify_bound("nope", 1, 1, 3)


def test_max_joints_is_sharp():
    for d in (2, 3, 4, 5):
        for L in range(0, 60):
            J = main_bound_max_joints(L, d)
            assert certify_bound("main", J, L, d).holds
            assert not certify_bound("main", J + 1, L, d).holds


def test_integer_forms_match_high_precision():
    rng = random.Random(0)
    mpmath.mp.dps = 60
    for _ in range(10 ** 4):
        d = rng.randint(2, 6)
        L = rng.randint(0, 400)
        cap = int(mpmath.floor(mpmath.factorial(d - 1) ** (mpmath.mpf(1) / (d - 1)) / d
                               * mpmath.mpf(L) ** (mpmath.mpf(d) / (d - 1))))
        J = max(0, cap + rng.randint(-2, 2))
        bound = mpmath.factorial(d - 1) ** (mpmath.mpf(1) / (d - 1)) / d * mpmath.mpf(L) ** (mpmath.mpf(d) / (d - 1))
        real = mpmath.mpf(J) <= bound
        cert = certify_bound("main", J, L, d)
        assert cert.holds == bool(real), (J, L, d)
        if J and L:
            assert cert.ratio == pytest.approx(float(J / bound), rel=1e-9)


def test_multijoint_and_flat_forms_match_high_precision():
    rng = random.Random(1)
    mpmath.mp.dps = 60
    for _ in range(2000):
        Ls = [rng.randint(1, 40) for _ in range(3)]
        J = rng.randint(0, 400)
        real = mpmath.mpf(J) <= mpmath.sqrt(2 * prod(Ls))
        assert certify_bound("conj34", J, Ls).holds == bool(real)
        real = mpmath.mpf(J) <= mpmath.sqrt(6 * prod(Ls))
        assert certify_bound("multijoints", J, Ls).holds == bool(real)
        L, F, m = rng.randint(1, 30), rng.randint(1, 30), rng.choice((1, 2, 3))
        real = mpmath.mpf(J) <= mpmath.mpf(comb(4, m)) ** (mpmath.mpf(1) / m) * L * mpmath.mpf(F) ** (mpmath.mpf(1) / m)
        assert certify_bound("flats", J, L, 4, m, F).holds == bool(real)


def test_multijoint_chain():
    mj = generate_k4_blowup_multijoints(2)
    cfg, fam = mj.as_joints_configuration()
    res = balance_products(cfg)
    chain = verify_amgm_chain(mj, res.weights)
    assert chain.holds()
    assert chain.W * mj.num_joints >= 1 / factorial(3) - 1e-9


def test_densest_subset_on_small_graph():
    # joints 0,1 share two lines, joint 2 hangs off its own two lines
    U, N, _ = densest_subconfiguration(3, [[0, 1], [0, 1], [2], [2]])
    assert (len(U), len(N)) == (2, 2)


def test_sums_symmetric_and_single():
    cfg = generate_generic_flat_config(5, 4, 2)
    res = balance_sums_with_subsets(cfg)
    assert res.ratio >= cfg.num_joints / len(cfg.lines) - 1e-12
    assert res.s * len(res.joint_ids) == pytest.approx(len(res.line_ids), abs=1e-6)
    assert verify_flat_chain(cfg, res).holds()
    line1 = Line.through(QQ, (0, 0, 0), (1, 0, 0))
    line2 = Line.through(QQ, (0, 0, 0), (0, 1, 0))
    flat = Flat.through(QQ, (0, 0, 0), [(0, 0, 1)])
    one = FlatJointsConfiguration(QQ, 3, 2, (line1, line2), (flat,), (Point.of(QQ, (0, 0, 0)),),
                                  ((0, 1),), (0,))
    res = balance_sums_with_subsets(one)
    assert res.s == pytest.approx(2) and res.weights.c == pytest.approx((2.0,))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_sums_solver_properties(seed):
    rng = random.Random(seed)
    specs = [((a, b, c, e), tuple(sorted(rng.sample((a, b, c, e), 2))))
             for a, b, c, e in rng.sample(list(itertools.combinations(range(6), 4)),
                                          rng.randint(2, 12))]
    cfg = generate_generic_flat_config(6, 4, 2, joints=specs)
    res = balance_sums_with_subsets(cfg)
    J, L = cfg.num_joints, len(cfg.lines)
    assert len(res.joint_ids) * L >= J * len(res.line_ids)
    assert abs(res.s * len(res.joint_ids) - len(res.line_ids)) <= 1e-6
    assert is_feasible(res.config, res.weights, "inequality", 1e-9)
    assert sum(c ** 2 for c in res.weights.c) >= 1 / comb(4, 2) - 1e-9
    for n in (1, 3, 7):
        validate_orders(res.config, round_flat_orders(res.config, res.weights, n))
