"""End-to-end acceptance checks, one test per criterion.

Each test records a single PASS/FAIL line; the lines are repeated in the
terminal summary of the pytest run.
"""
import itertools
import math
import random
import time
from math import comb, factorial

import pytest

from jointslab.combinatorics import (
    UniformHypergraph,
    brute_force_rainbow,
    brute_force_simplices,
    count_rainbow_triangles,
    count_simplices,
    random_colored_graph,
    random_hypergraph,
)
from jointslab.configs import (
    augment_with_flat_lines,
    connected_components,
    detect_joints,
    detect_multijoints,
    generate_from_colored_graph,
    generate_from_hypergraph,
    generate_generic_flat_config,
    generate_generic_hyperplane_config,
    generate_k4_blowup_multijoints,
)
from jointslab.geometry import point_on
from jointslab.polymethod import (
    VanishingOrders,
    assemble_flat_constraints,
    assemble_joint_constraints,
    certify_degree_bound,
    check_counting_inequality,
    lift_flat_orders,
    validate_orders,
)
from jointslab.variational import (
    balance_products,
    balance_sums_with_subsets,
    certify_bound,
    round_flat_orders,
    round_to_orders,
    verify_amgm_chain,
)

SIZES = [(4, 3), (5, 3), (6, 3), (5, 4), (6, 4)]


def _ratio_oracle(k):
    return comb(k, 3) / (math.sqrt(2) / 3 * comb(k, 2) ** 1.5)


def _sub_configs(count, seed):
    """Connected sub-configurations of generic d=3 arrangements (k <= 6)."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        k = rng.randint(4, 6)
        cfg = generate_generic_hyperplane_config(k, 3)
        keep = rng.sample(range(cfg.num_joints), rng.randint(1, cfg.num_joints))
        out.extend(connected_components(cfg.restrict(keep))[:1])
    return out


def test_criterion_1_construction_counts(criterion):
    problems = []
    worst = 0.0
    for k, d in SIZES:
        t = time.perf_counter()
        cfg = generate_generic_hyperplane_config(k, d)
        found = detect_joints(cfg.lines, d)
        elapsed = time.perf_counter() - t
        worst = max(worst, elapsed)
        if len(set(cfg.lines)) != comb(k, d - 1) or cfg.num_lines != comb(k, d - 1):
            problems.append(f"({k},{d}) lines {cfg.num_lines}")
        if found.num_joints != comb(k, d) or cfg.num_joints != comb(k, d):
            problems.append(f"({k},{d}) joints {found.num_joints}")
        for line in cfg.lines:
            on = sum(point_on(p, line) for p in found.joints)
            if on != k - d + 1:
                problems.append(f"({k},{d}) line with {on} joints")
                break
        if elapsed >= 5:
            problems.append(f"({k},{d}) took {elapsed:.2f}s")
    ok = not problems
    criterion(1, ok, f"5 sizes, max {worst:.2f}s" if ok else "; ".join(problems))
    assert ok, problems


def test_criterion_2_main_bound(criterion):
    problems = []
    configs = [generate_generic_hyperplane_config(k, d) for k, d in SIZES]
    configs += [generate_generic_hyperplane_config(k, 3) for k in range(3, 13)]
    rng = random.Random(2)
    subs = []
    for _ in range(100):
        base = rng.choice(configs)
        keep = rng.sample(range(base.num_joints), rng.randint(0, base.num_joints))
        subs.append(base.restrict(keep))
    for cfg in configs + subs:
        cert = certify_bound("main", cfg.num_joints, cfg.num_lines, cfg.d)
        if not cert.holds:
            problems.append(f"bound fails J={cfg.num_joints} L={cfg.num_lines} d={cfg.d}")
    ratios = []
    for k in range(4, 21):
        J, L = comb(k, 3), comb(k, 2)
        cert = certify_bound("main", J, L, 3)
        if not math.isclose(cert.ratio, _ratio_oracle(k), rel_tol=1e-12):
            problems.append(f"k={k} ratio {cert.ratio} vs oracle {_ratio_oracle(k)}")
        ratios.append(cert.ratio)
    cfg20 = generate_generic_hyperplane_config(20, 3)
    r20 = certify_bound("main", cfg20.num_joints, cfg20.num_lines, 3).ratio
    if r20 < 0.90:
        problems.append(f"ratio at k=20 is {r20:.4f}")
    if any(b <= a for a, b in zip(ratios, ratios[1:])):
        problems.append("ratio not increasing in k")
    ok = not problems
    criterion(2, ok, f"{len(configs)} configs + 100 subconfigs, ratio(k=20)={r20:.4f}"
              if ok else "; ".join(problems))
    assert ok, problems


def _degree_instances():
    cfgs = [generate_generic_hyperplane_config(k, 3) for k in (3, 4, 5, 6)]
    cfgs += _sub_configs(8, seed=3)
    out = []
    for cfg in cfgs:
        w = balance_products(cfg).weights
        for n in range(1, 9):
            out.append((cfg, round_to_orders(cfg, w, n)))
        n_min = min(len(js) for js in cfg.line_joints if js)
        out.append((cfg, VanishingOrders.uniform(cfg, n_min)))
    return out


@pytest.fixture(scope="module")
def degree_instances():
    return _degree_instances()


def test_criterion_3_degree_certification(criterion, degree_instances):
    problems = []
    worst = 0.0
    for cfg, ord in degree_instances:
        t = time.perf_counter()
        cs = assemble_joint_constraints(cfg, ord)
        cert = certify_degree_bound(cs)
        elapsed = time.perf_counter() - t
        worst = max(worst, elapsed)
        if not cert.kernel_trivial:
            problems.append(f"J={cfg.num_joints} n={ord.n}: nontrivial kernel")
        if cs.ncols > comb(10, 3):
            problems.append(f"n={ord.n}: {cs.ncols} columns")
        if elapsed >= 2:
            problems.append(f"J={cfg.num_joints} n={ord.n}: {elapsed:.2f}s")
    ok = not problems
    criterion(3, ok, f"{len(degree_instances)} systems, max {worst:.2f}s"
              if ok else "; ".join(problems[:5]))
    assert ok, problems


def test_criterion_4_counting_inequality(criterion, degree_instances):
    problems = []
    for cfg, ord in degree_instances:
        try:
            rep = check_counting_inequality(cfg, ord)
        except AssertionError as exc:
            problems.append(str(exc))
            continue
        if not rep.lhs >= rep.rhs:
            problems.append(f"{rep.lhs} < {rep.rhs}")
    cfg = generate_generic_hyperplane_config(4, 3)
    rep = check_counting_inequality(cfg, VanishingOrders.uniform(cfg, 2))
    if (rep.lhs, rep.rhs) != (4, 4):
        problems.append(f"k=4 beta=1 n=2 gives {rep.lhs} vs {rep.rhs}")
    ok = not problems
    criterion(4, ok, f"{len(degree_instances)} instances, k=4 equality {rep.lhs}={rep.rhs}"
              if ok else "; ".join(problems[:5]))
    assert ok, problems


def test_criterion_5_balancing(criterion):
    problems = []
    instances = [generate_generic_hyperplane_config(k, d) for k, d in SIZES]
    instances += [generate_k4_blowup_multijoints(k).as_joints_configuration()[0] for k in (1, 2)]
    instances += _sub_configs(30, seed=5)
    instances += connected_components(generate_generic_hyperplane_config(8, 3).restrict(range(50)))
    worst = 0.0
    for cfg in instances:
        assert cfg.num_joints <= 50
        res = balance_products(cfg)
        worst = max(worst, res.spread)
        if res.spread > 1e-9 or res.iterations > 10 ** 6:
            problems.append(f"J={cfg.num_joints}: spread {res.spread:.2e} after {res.iterations}")
        total = sum(res.weights.products)
        if total < 1 / factorial(cfg.d) - 1e-9:
            problems.append(f"J={cfg.num_joints}: sum W = {total}")
        chain = verify_amgm_chain(cfg, res.weights)
        if chain.min_slack < -1e-9:
            problems.append(f"J={cfg.num_joints}: chain slack {chain.min_slack:.2e}")
    res4 = balance_products(generate_generic_hyperplane_config(4, 3))
    W = res4.weights.products
    if any(abs(x - 0.125) > 1e-9 for x in W):
        problems.append(f"k=4 products {W}")
    ok = not problems
    criterion(5, ok, f"{len(instances)} instances, worst spread {worst:.1e}, k=4 W={W[0]:.12f}"
              if ok else "; ".join(problems[:5]))
    assert ok, problems


def test_criterion_6_multijoints(criterion):
    problems = []
    for k in (1, 2, 3):
        mj = generate_k4_blowup_multijoints(k)
        if mj.family_sizes != (2 * k * k,) * 3 or mj.num_joints != 4 * k ** 3:
            problems.append(f"k={k}: sizes {mj.family_sizes} J={mj.num_joints}")
        found = detect_multijoints(mj.families)
        if found.num_joints != 4 * k ** 3:
            problems.append(f"k={k}: detected {found.num_joints}")
        L = list(mj.family_sizes)
        if not certify_bound("multijoints", mj.num_joints, L).holds:
            problems.append(f"k={k}: multijoints bound fails")
        c = certify_bound("conj34", mj.num_joints, L)
        if not (c.holds and c.equality):
            problems.append(f"k={k}: conj34 {c.lhs} vs {c.rhs}")
    ok = not problems
    criterion(6, ok, "k=1,2,3 counts exact, conj34 equality" if ok else "; ".join(problems))
    assert ok, problems


def _flat_instances():
    out = [generate_generic_flat_config(5, 4, 2), generate_generic_flat_config(5, 4, 2, seed=1)]
    rng = random.Random(7)
    for _ in range(8):
        T = rng.sample(list(itertools.combinations(range(6), 4)), rng.randint(3, 10))
        entries = [(t, tuple(sorted(rng.sample(t, 2)))) for t in T]
        out.append(generate_generic_flat_config(6, 4, 2, joints=entries))
    return out


def test_criterion_7_flats(criterion):
    problems = []
    instances = _flat_instances()
    for i, cfg in enumerate(instances):
        assert cfg.num_joints <= 10
        J, L, F = cfg.num_joints, len(cfg.lines), len(cfg.flats)
        aug = augment_with_flat_lines(cfg)
        aug.config.validate()
        if any(len(r) != 4 for r in aug.config.incidence):
            problems.append(f"#{i}: augmented incidence is not d-wide")
        if not certify_bound("flats", J, L, 4, 2, F).holds:
            problems.append(f"#{i}: flats bound fails")
        res = balance_sums_with_subsets(cfg)
        Jp, Lp = len(res.joint_ids), len(res.line_ids)
        if Jp * L < J * Lp:
            problems.append(f"#{i}: subset ratio {Jp}/{Lp} < {J}/{L}")
        if abs(res.s * Jp - Lp) > 1e-6:
            problems.append(f"#{i}: s J' = {res.s * Jp} vs L' = {Lp}")
        sub = res.config
        for n in (4, 6):
            ord = round_flat_orders(sub, res.weights, n)
            rep = check_counting_inequality(sub, ord)
            if rep.lhs < rep.rhs:
                problems.append(f"#{i} n={n}: counting {rep.lhs} < {rep.rhs}")
            if not certify_degree_bound(assemble_flat_constraints(sub, ord)).kernel_trivial:
                problems.append(f"#{i} n={n}: flat kernel nontrivial")
            sub_aug = augment_with_flat_lines(sub, n)
            lifted = lift_flat_orders(sub_aug, ord)
            validate_orders(sub_aug.config, lifted)
    ok = not problems
    criterion(7, ok, f"{len(instances)} flat instances (d=4, m=2)" if ok else "; ".join(problems[:5]))
    assert ok, problems


def test_criterion_8_combinatorial_oracles(criterion):
    problems = []
    rng = random.Random(8)
    for i in range(100):
        n = rng.randint(3, 15)
        dens = rng.uniform(0.2, 0.9)
        if i % 2 == 0:
            g = random_colored_graph(rng, n, dens)
            if count_rainbow_triangles(g) != brute_force_rainbow(g):
                problems.append(f"rainbow #{i}")
        else:
            h = random_hypergraph(rng, n, rng.choice((1, 2, 3)), dens)
            if count_simplices(h) != brute_force_simplices(h):
                problems.append(f"simplices #{i}")
    for k in range(1, 13):
        for d in range(2, 6):
            if k < d - 1:
                continue
            if count_simplices(UniformHypergraph.complete(k, d - 1)) != comb(k, d):
                problems.append(f"complete k={k} d={d}")
    cross = 0
    for i in range(20):
        n = rng.randint(4, 10)
        if i % 2 == 0:
            h = random_hypergraph(rng, n, 2, rng.uniform(0.3, 0.9))
            cfg = generate_from_hypergraph(n, h.edges, 3)
            want = count_simplices(h)
            built, got = cfg.num_joints, detect_joints(cfg.lines, 3).num_joints
        else:
            g = random_colored_graph(rng, n, rng.uniform(0.2, 0.6))
            mj = generate_from_colored_graph(n, g.colors)
            want = count_rainbow_triangles(g)
            built, got = mj.num_joints, detect_multijoints(mj.families).num_joints
        cross += 1
        if built != want or got != want:
            problems.append(f"cross #{i}: want {want}, got {got}")
    ok = not problems
    criterion(8, ok, f"100 oracle instances, complete k<=12 d<=5, {cross} cross-module"
              if ok else "; ".join(problems[:5]))
    assert ok, problems
