"""Independent reference computations shared by the test modules.

These use only index arithmetic on dyadic two-bin grids over ``[0, 1]`` and
left Riemann sums, so they share no code path with the package solvers.
"""

import numpy as np


def rb_dense(c, delta, s, d, K, tol=1e-12, g=None, max_iter=10_000):
    """RB fixed point on the ``K + 1`` nodes of ``[0, 1]`` split at ``1/2``.

    Node ``i`` of bin ``j`` has pre-image node ``2 i - j K``, so the operator
    needs no interpolation.
    """
    i = np.arange(K + 1)
    j = (i >= K // 2).astype(int)
    src = 2 * i - j * K
    u = src / K
    cj = np.asarray(c, dtype=float)[j]
    dj = np.asarray(d, dtype=float)[j]
    scale = np.array([delta[jj](uu) for jj, uu in zip(j, u)], dtype=float)
    g = np.zeros(K + 1) if g is None else g
    for _ in range(max_iter):
        nxt = cj * u + scale * s(g[src]) + dj
        if np.max(np.abs(nxt - g)) <= tol:
            return nxt
        g = nxt
    raise AssertionError("oracle RB iteration did not converge")


def left_riemann(values, a_idx, b_idx, h):
    return float(np.sum(values[a_idx:b_idx]) * h)


def histopolation_dense(y, c, delta_const, s, K=2 ** 16, tol=1e-10):
    """Alternate RB solves and offset updates on ``[0, 1]`` with constant deltas.

    Returns ``(d, f_values, I_j)`` where ``I_j`` is the left Riemann sum of
    ``s(f)`` over ``[0, 1]``.
    """
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    dl = np.asarray(delta_const, dtype=float)
    delta = [lambda u, v=v: v for v in dl]
    d = (2 * y - c) / 2
    g = None
    for _ in range(200):
        g = rb_dense(c, delta, s, d, K, tol=1e-12, g=g)
        integral = left_riemann(s(g), 0, K, 1.0 / K)
        d_new = (2 * y - c - 2 * dl * integral) / 2
        if np.max(np.abs(d_new - d)) <= tol:
            d = d_new
            break
        d = d_new
    else:
        raise AssertionError("oracle alternation did not converge")
    g = rb_dense(c, delta, s, d, K, tol=1e-12, g=g)
    return d, g, left_riemann(s(g), 0, K, 1.0 / K)
