"""Oscillation decay on word intervals and Riemann-sum evidence.

A word ``(j_1, ..., j_p)`` (0-based symbols) names the interval
``l_{j_1} o ... o l_{j_p}(I)``.  On such intervals the oscillation of the
fixed point is bounded by

    delta^p w_f(I) + C |I| sum_{i<p} alpha^i delta^(p-1-i)

which is split into three closed-form cases depending on how ``alpha`` and
``delta`` compare.  Word intervals are read half-open, ``[lo, hi)``, except
when ``hi = t_N``, matching the left-closed subinterval convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core_model import FractalSystem, Partition, derive_affine_maps
from .errors import AdmissibilityError, ValidationError
from .histopolation import integrate
from .rb_solver import NEAREST_LEFT, SampledFunction, fixed_point, make_sampled

EQUAL_TOL = 1e-12
DEDUP_TOL = 1e-12
GRID_SLACK = 1e-12


def check_word(p: Partition, word) -> tuple:
    word = tuple(int(s) for s in word)
    for s in word:
        if not 0 <= s < p.N:
            raise ValidationError(f"word symbol {s} outside 0..{p.N - 1}")
    return word


def word_interval(p: Partition, word) -> tuple:
    word = check_word(p, word)
    maps = derive_affine_maps(p)
    lo, hi = p.t0, p.tN
    for s in reversed(word):
        lo, hi = maps[s].forward(lo), maps[s].forward(hi)
    return (lo, hi)


def words(N: int, length: int):
    return itertools.product(range(N), repeat=length)


def discontinuity_points(p: Partition, depth: int) -> list:
    """Images ``l_w(t_k)`` of interior knots under all words with ``|w| <= depth``."""
    if depth < 0:
        raise ValidationError("depth must be >= 0")
    maps = derive_affine_maps(p)
    current = np.array(p.knots[1:-1])
    found = [current]
    for _ in range(depth):
        current = np.concatenate([m.forward(current) for m in maps])
        found.append(current)
    pts = np.sort(np.concatenate(found))
    keep = np.concatenate([[True], np.diff(pts) > DEDUP_TOL])
    return pts[keep].tolist()


def oscillation(h: SampledFunction, J, closed: bool = True) -> float:
    """Max minus min of ``h`` over the grid nodes in ``J = (lo, hi)``.

    With ``closed=False`` the right end is excluded.
    """
    lo, hi = J
    grid = h.grid
    eps = GRID_SLACK * (1.0 + abs(hi))
    i0 = int(np.searchsorted(grid, lo - eps, side="left"))
    if closed:
        i1 = int(np.searchsorted(grid, hi + eps, side="right"))
    else:
        i1 = int(np.searchsorted(grid, hi - eps, side="left"))
    if i1 <= i0:
        raise ValidationError(f"interval [{lo!r}, {hi!r}] contains no grid point")
    seg = h.values[i0:i1]
    return float(seg.max() - seg.min())


def oscillation_bound(sys: FractalSystem, p: int, wI: float, lenI: float) -> float:
    if p < 1:
        raise ValidationError("p must be >= 1")
    delta, alpha, C = sys.delta_max, sys.alpha, sys.C
    if not delta < 1.0:
        raise AdmissibilityError(
            f"oscillation bound needs delta_max < 1 (got {delta!r}); "
            "with delta >= 1 the factor delta^p does not decay",
            delta, sys.beta, "delta_max < 1",
        )
    return bound_value(alpha, delta, C, p, wI, lenI)


def bound_value(alpha, delta, C, p, wI, lenI) -> float:
    if abs(alpha - delta) <= EQUAL_TOL:
        return alpha ** p * wI + C * lenI * p * alpha ** (p - 1)
    if delta < alpha:
        return delta ** p * wI + C * lenI * (alpha ** p - delta ** p) / (alpha - delta)
    return delta ** p * wI + C * lenI * (delta ** p - alpha ** p) / (delta - alpha)


@dataclass(frozen=True)
class OscillationRow:
    word: tuple
    lo: float
    hi: float
    measured: float | None  # None when no grid node falls in the interval
    bound: float

    @property
    def exceeded(self) -> bool:
        if self.measured is None:
            return False
        return self.measured > self.bound + GRID_SLACK * (1.0 + abs(self.bound))


def oscillation_vs_bound(sys: FractalSystem, f: SampledFunction, max_p: int = 8) -> list:
    """Measured oscillation on every word interval of length ``1..max_p`` vs. its bound.

    Intervals narrower than the grid spacing may hold no node; their rows
    carry ``measured=None``.
    """
    t0, tN = sys.interval
    wI = oscillation(f, (t0, tN))
    lenI = tN - t0
    rows = []
    for p in range(1, max_p + 1):
        bound = oscillation_bound(sys, p, wI, lenI)
        for w in words(sys.N, p):
            lo, hi = word_interval(sys.partition, w)
            try:
                measured = oscillation(f, (lo, hi), closed=(hi >= tN))
            except ValidationError:
                measured = None
            rows.append(OscillationRow(w, lo, hi, measured, bound))
    return rows


def riemann_convergence(sys: FractalSystem, K_list, tol: float = 1e-10, init: float = 0.0,
                        interp: str = NEAREST_LEFT) -> list:
    """``int_I f`` of the fixed point re-solved on each grid, with successive differences.

    Rows are ``(K, integral, |difference from previous row|)``.
    """
    K_list = list(K_list)
    if any(b <= a for a, b in zip(K_list, K_list[1:])):
        raise ValidationError("K_list must be increasing")
    t0, tN = sys.interval
    rows = []
    prev = None
    for K in K_list:
        f, _ = fixed_point(sys, make_sampled(sys.interval, K, init, interp), tol)
        val = integrate(f, t0, tN)
        rows.append((K, val, None if prev is None else abs(val - prev)))
        prev = val
    return rows


DEFAULT_K_LIST = tuple(2 ** k for k in range(10, 17))
