"""Area-preserving fractal functions.

Given bin frequencies ``y_j`` the fixed point ``f`` has bin areas
``y_j * |I_j|`` exactly when every offset satisfies

    d_j = [2 y_j L - c_j (t_N^2 - t_0^2) - 2 int_I delta_j(t) s_j(f(t)) dt] / (2 L)

with ``L = t_N - t_0``.  The offsets and ``f`` depend on each other, so
:func:`solve` alternates an inner RB fixed point with the offset update and
certifies the result afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_model import (
    HISTOPOLATION,
    FractalSystem,
    Histogram,
    Partition,
    assemble_system,
    check_admissible,
)
from .errors import NonConvergenceError, ValidationError
from .rb_solver import (
    DEFAULT_K,
    NEAREST_LEFT,
    RBPlan,
    SampledFunction,
    evaluate,
    fixed_point,
    make_sampled,
)

AREA_TOL = 1e-3


@dataclass(frozen=True)
class HistopolationProblem:
    partition: Partition
    histogram: Histogram
    c: tuple
    delta: tuple
    s: tuple
    K: int = DEFAULT_K
    tol_inner: float = 1e-10
    tol_outer: float = 1e-8
    max_outer: int = 200
    max_inner: int = 10_000
    interp: str = NEAREST_LEFT

    def __post_init__(self):
        self.histogram.check_against(self.partition)
        for name in ("c", "delta", "s"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        # raises on length mismatch, mixed moduli or delta_max >= 1
        self.system(np.zeros(self.partition.N))

    def system(self, d) -> FractalSystem:
        return assemble_system(self.partition, self.c, d, self.delta, self.s, HISTOPOLATION)


@dataclass
class HistopolationSolution:
    system: FractalSystem
    f: SampledFunction
    outer_trace: list = field(default_factory=list)
    area_residuals: list = field(default_factory=list)
    inner_iterations: list = field(default_factory=list)

    @property
    def d(self) -> tuple:
        return self.system.d


def _cell(h, t):
    k, frac = h.locate(t)
    return int(k), float(frac)


def integrate(h: SampledFunction, a: float, b: float) -> float:
    """Composite trapezoid of ``h`` over ``[a, b]``.

    In ``nearest-left`` mode samples are right-continuous at nodes
    (subintervals are closed on the left), so the value used at an upper
    limit ``b < t_N`` that falls on a node is the left limit, estimated by
    linear extrapolation from the two preceding nodes.  In ``linear`` mode the
    interpolant is integrated exactly.  Partial end cells are read through
    the interpolation mode.
    """
    if b < a:
        raise ValidationError(f"reversed integration bounds [{a!r}, {b!r}]")
    if b == a:
        return 0.0
    ka, fa = _cell(h, a)
    kb, fb = _cell(h, b)
    if (ka, fa) == (kb, fb):  # both ends snapped onto the same node
        return 0.0
    v = h.values
    first = ka if fa == 0.0 else ka + 1  # first node >= a
    last = kb - 1 if fb == 0.0 else kb  # last node < b
    ts, vs = [], []
    if fa != 0.0:
        ts.append(a)
        vs.append(evaluate(h, a))
    if last >= first:
        ts.extend(h.grid[first:last + 1])
        vs.extend(v[first:last + 1])
    if fb != 0.0 or kb == h.K or h.interp != NEAREST_LEFT:
        end_value = evaluate(h, b)
    elif last - 1 >= first:
        end_value = 2.0 * v[last] - v[last - 1]
    else:
        end_value = vs[-1]
    ts.append(b)
    vs.append(end_value)
    ts = np.asarray(ts, dtype=float)
    ts[0] = a
    return float(np.trapezoid(np.asarray(vs, dtype=float), ts))


def _affine_terms(p: Partition, histogram: Histogram, c):
    L = p.length
    y = np.asarray(histogram.frequencies)
    c = np.asarray(c, dtype=float)
    return 2.0 * y * L - c * (p.tN ** 2 - p.t0 ** 2), 2.0 * L


def initial_offsets(prob: HistopolationProblem) -> np.ndarray:
    num, den = _affine_terms(prob.partition, prob.histogram, prob.c)
    return num / den


def self_reference_integrals(sys: FractalSystem, f: SampledFunction) -> np.ndarray:
    """``int_I delta_j(t) s_j(f(t)) dt`` for every ``j``."""
    t0, tN = sys.interval
    grid = f.grid
    out = np.empty(sys.N)
    for j in range(sys.N):
        sj = sys.s[j]
        integrand = f.replace(sys.delta[j](grid) * sj(f.values))
        out[j] = integrate(integrand, t0, tN)
    return out


def offset_update(sys: FractalSystem, f: SampledFunction, hist: Histogram) -> np.ndarray:
    num, den = _affine_terms(sys.partition, hist, sys.c)
    return (num - 2.0 * self_reference_integrals(sys, f)) / den


def offset_residual(sys: FractalSystem, f: SampledFunction, hist: Histogram) -> list:
    """``d_j`` minus the offset formula evaluated with ``f``; zero iff areas match."""
    return list(np.asarray(sys.d) - offset_update(sys, f, hist))


def verify_areas(f: SampledFunction, prob) -> list:
    """``int_{I_j} f - y_j |I_j|`` per bin.  ``prob`` needs ``partition`` and ``histogram``."""
    p = prob.partition
    knots = p.knots
    return [
        integrate(f, knots[j], knots[j + 1]) - y * (knots[j + 1] - knots[j])
        for j, y in enumerate(prob.histogram.frequencies)
    ]


def solve(prob: HistopolationProblem, init: SampledFunction | None = None) -> HistopolationSolution:
    """Block iteration between the RB fixed point and the offset update."""
    check_admissible(max(dj.sup_abs(prob.partition.interval) for dj in prob.delta),
                     prob.s[0].modulus.beta, HISTOPOLATION)
    d = initial_offsets(prob)
    f = init or make_sampled(prob.partition.interval, prob.K, 0.0, prob.interp)
    plan = None
    outer = []
    inner_iters = []
    for _ in range(prob.max_outer):
        sys = prob.system(d)
        if plan is None:
            plan = RBPlan(sys, f.t0, f.tN, f.K, f.interp)
        else:
            plan.sys = sys
        f, tr = fixed_point(sys, f, prob.tol_inner, prob.max_inner, plan)
        inner_iters.append(tr.iterations)
        d_new = offset_update(sys, f, prob.histogram)
        change = float(np.max(np.abs(d_new - d)))
        outer.append((tuple(float(v) for v in d_new), change))
        d = d_new
        if change <= prob.tol_outer:
            break
    else:
        raise NonConvergenceError(
            f"offset iteration did not reach tol_outer={prob.tol_outer:g} "
            f"in {prob.max_outer} steps (last change {outer[-1][1]:.3e})",
            trace=outer, last=d,
        )
    sys = prob.system(d)
    plan.sys = sys
    f, tr = fixed_point(sys, f, prob.tol_inner, prob.max_inner, plan)
    inner_iters.append(tr.iterations)
    return HistopolationSolution(sys, f, outer, verify_areas(f, prob), inner_iters)
