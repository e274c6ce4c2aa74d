"""Pure-Python hot kernels.

Reference implementations of everything in ``_speedups.pyx``; the compiled
module must agree with these exactly (integer kernels) or to rounding
(floating-point kernels).
"""
from math import exp, log


def rref_mod_p(rows, ncols, p):
    rows = [[x % p for x in r] for r in rows]
    n = len(rows)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == n:
            break
        k = r
        while k < n and rows[k][c] == 0:
            k += 1
        if k == n:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = pow(rows[r][c], -1, p)
        prow = [x * inv % p for x in rows[r]]
        rows[r] = prow
        for i in range(n):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], prow)]
        pivots.append(c)
        r += 1
    return rows, pivots


def _rainbow_table():
    perms = ((1, 2, 4), (1, 4, 2), (2, 1, 4), (2, 4, 1), (4, 1, 2), (4, 2, 1))
    table = [False] * 512
    for m1 in range(8):
        for m2 in range(8):
            for m3 in range(8):
                table[m1 * 64 + m2 * 8 + m3] = any(
                    m1 & c1 and m2 & c2 and m3 & c3 for c1, c2, c3 in perms)
    return table


RAINBOW = _rainbow_table()


def rainbow_triangles(masks):
    """Count triples whose three edge color-masks admit distinct colors."""
    n = len(masks)
    up = [[v for v in range(u + 1, n) if masks[u][v]] for u in range(n)]
    total = 0
    for u in range(n):
        mu = masks[u]
        for v in up[u]:
            muv = mu[v] * 64
            mv = masks[v]
            for w in up[v]:
                if mu[w] and RAINBOW[muv + mv[w] * 8 + mu[w]]:
                    total += 1
    return total


def _log_products(inc, cnt, a):
    sa = [0.0] * len(cnt)
    for p, row in enumerate(inc):
        ap = a[p]
        for l in row:
            sa[l] += ap
    t = [(1.0 - s) / c for s, c in zip(sa, cnt)]
    out = []
    for p, row in enumerate(inc):
        acc = 0.0
        for l in row:
            b = t[l] + a[p]
            if b <= 0.0:
                return None
            acc += log(b)
        out.append(acc)
    return out


def products_descent(inc, nlines, a, tol, max_iter):
    """Graded perturbation for equal per-joint products.

    Each accepted step lowers ``a_p`` by ``eps * (log W_p - min log W)``,
    so the maximizing joints move most and the minimizing ones not at all.
    Steps are halved until every weight stays positive and the maximum
    product does not increase.  Returns ``(a, iterations, spread)``.
    """
    cnt = [0] * nlines
    for row in inc:
        for l in row:
            cnt[l] += 1
    a = list(a)
    lw = _log_products(inc, cnt, a)
    if lw is None:
        raise ValueError("starting point is infeasible")
    eps = 1.0
    it = 0
    while True:
        hi = max(lw)
        lo = min(lw)
        spread = 1.0 - exp(lo - hi)
        if spread <= tol or it >= max_iter:
            return a, it, spread
        g = [x - lo for x in lw]
        e = eps
        while True:
            a2 = [x - e * y for x, y in zip(a, g)]
            lw2 = _log_products(inc, cnt, a2)
            if lw2 is not None and max(lw2) <= hi:
                break
            e *= 0.5
            if e < 1e-300:
                return a, it, spread
        a, lw = a2, lw2
        eps = min(2.0 * e, 1e3)
        it += 1


def waterfill(values):
    """Shift ``t`` with ``sum(max(0, t + v)) == 1`` (simplex projection)."""
    order = sorted(values, reverse=True)
    acc = 0.0
    t = 0.0
    for i, v in enumerate(order):
        acc += v
        t = (1.0 - acc) / (i + 1)
        if i + 1 == len(order) or t + order[i + 1] <= 0.0:
            break
    return t


def waterfill_weights(line_joints, njoints, a):
    """Water-filled weights for every line.

    ``line_joints[l]`` lists the joints chosen on line ``l``.  Returns
    ``(weights, sums, potential)``: per-line weight lists aligned with
    ``line_joints``, per-joint weight sums, and the convex potential
    ``sum_l max_x (<a, x> - |x|^2 / 2)`` whose gradient is ``sums``.
    """
    sums = [0.0] * njoints
    weights = []
    phi = 0.0
    for js in line_joints:
        vals = [a[p] for p in js]
        t = waterfill(vals)
        x = [max(0.0, t + v) for v in vals]
        for p, w in zip(js, x):
            sums[p] += w
            phi += w * a[p] - 0.5 * w * w
        weights.append(x)
    return weights, sums, phi
