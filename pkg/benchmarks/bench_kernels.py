"""Time the compiled kernels against the pure-Python fallback.

Run with ``python3 benchmarks/bench_kernels.py``; pass ``--repeat N`` to
change the number of timed runs per kernel (best of N is reported).
"""
import argparse
import random
import time

from jointslab import _purepy
from jointslab.combinatorics import k4_blowup_coloring
from jointslab.configs import connected_components, generate_generic_hyperplane_config

try:
    from jointslab import _speedups
except ImportError:
    _speedups = None


def _cases():
    rng = random.Random(0)
    p = 10007
    mat = [[rng.randrange(p) for _ in range(220)] for _ in range(300)]
    masks = k4_blowup_coloring(15).masks()
    cfg = generate_generic_hyperplane_config(9, 3)
    comp = connected_components(cfg.restrict(rng.sample(range(cfg.num_joints), 50)))[0]
    inc = [list(r) for r in comp.incidence]
    lj = [[q for q, _ in js] for js in comp.line_joints]
    a = [rng.uniform(-0.1, 0.1) for _ in range(comp.num_joints)]
    return {
        "rref_mod_p 300x220": lambda m: m.rref_mod_p(mat, 220, p),
        "rainbow_triangles K4x15": lambda m: m.rainbow_triangles(masks),
        "products_descent": lambda m: m.products_descent(inc, comp.num_lines, [0.0] * len(inc), 1e-6, 5000),
        "waterfill_weights": lambda m: [m.waterfill_weights(lj, comp.num_joints, a) for _ in range(50)],
    }


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':<26}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for name, run in _cases().items():
        py = _best(lambda: run(_purepy), args.repeat)
        if _speedups is None:
            print(f"{name:<26}{py:>12.4f}{'n/a':>12}{'':>10}")
            continue
        cy = _best(lambda: run(_speedups), args.repeat)
        print(f"{name:<26}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
