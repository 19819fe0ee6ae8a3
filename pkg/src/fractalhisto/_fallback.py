"""Pure-Python/numpy versions of the compiled kernels, with identical results."""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

POLE_GUARD = 1e-9
_CHUNK = 16384


def _contract(code, p, x):
    if code == 0:
        return p * x
    if code == 1:
        return p * math.sin(x)
    if code == 3:
        return p * math.tanh(x)
    return 1.0 / (p + x)


def chaos_orbit(a, b, c, d, s_code, s_par, dl_code, dl_par, choices, t, x, burn_in):
    a, b, c, d = (list(map(float, v)) for v in (a, b, c, d))
    s_code, dl_code = list(map(int, s_code)), list(map(int, dl_code))
    s_par, dl_par = list(map(float, s_par)), list(map(float, dl_par))
    total = len(choices)
    out = np.empty((max(total - burn_in, 0), 2))
    t, x = float(t), float(x)
    for i, j in enumerate(choices.tolist()):
        if s_code[j] == 2 and abs(s_par[j] + x) < POLE_GUARD:
            return out, i
        scale = dl_par[j] if dl_code[j] == 0 else dl_par[j] * t
        tn = a[j] * t + b[j]
        x = c[j] * t + scale * _contract(s_code[j], s_par[j], x) + d[j]
        t = tn
        if i >= burn_in:
            out[i - burn_in, 0] = t
            out[i - burn_in, 1] = x
    return out, -1


def _sweep(t, x, idx, bt, bx, eta, best, step):
    """One side of the outward walk; ``step`` is +1 (right) or -1 (left)."""
    m = len(bt)
    pos = idx if step > 0 else idx - 1
    live = np.nonzero((pos >= 0) & (pos < m))[0]
    width = 8
    while len(live):
        offs = np.arange(width) * step
        cand = pos[live, None] + offs[None, :]
        valid = (cand >= 0) & (cand < m)
        cand = np.clip(cand, 0, m - 1)
        dt = np.abs(t[live, None] - bt[cand])
        dist = dt + eta * np.abs(x[live, None] - bx[cand])
        dist[~valid] = np.inf
        best[live] = np.minimum(best[live], dist.min(axis=1))
        pos[live] += width * step
        nxt = pos[live]
        inside = (nxt >= 0) & (nxt < m)
        gap = np.abs(t[live] - bt[np.clip(nxt, 0, m - 1)])
        live = live[inside & (gap < best[live])]
        width = min(2 * width, 1024)


def min_deta(pts, bt, bx, eta, threads=1):
    """Minimum of ``|t - t'| + eta |x - x'|`` over the target, per row of ``pts``.

    ``bt`` must be sorted.  Like the compiled kernel this walks outward from
    the insertion point (here in vectorized windows over all queries) and
    stops once the abscissa gap reaches the best distance, so the result is
    the exhaustive minimum.  ``threads`` splits the queries into chunks.
    """
    pts = np.ascontiguousarray(pts, dtype=float)
    bt = np.asarray(bt, dtype=float)
    bx = np.asarray(bx, dtype=float)
    out = np.empty(len(pts))

    def work(start):
        blk = pts[start:start + _CHUNK]
        t, x = blk[:, 0], blk[:, 1]
        idx = np.searchsorted(bt, t, side="left")
        best = np.full(len(blk), np.inf)
        _sweep(t, x, idx.copy(), bt, bx, eta, best, 1)
        _sweep(t, x, idx.copy(), bt, bx, eta, best, -1)
        out[start:start + len(blk)] = best

    starts = range(0, len(pts), _CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, starts))
    else:
        for s in starts:
            work(s)
    return out
