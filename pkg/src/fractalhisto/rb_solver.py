"""Sampled bounded functions and the Read-Bajraktarevic fixed point.

A bounded function on ``I`` is represented by its values on a uniform grid of
``K + 1`` points.  Between nodes it is read either as a left-continuous step
function (``nearest-left``, the default, which keeps jumps sharp) or by
linear interpolation.  The operator

    (T h)(t) = c_j u + delta_j(u) s_j(h(u)) + d_j,   u = l_j^{-1}(t), t in I_j

is evaluated at the grid nodes; everything that does not depend on ``h`` is
precomputed once per grid in an :class:`RBPlan`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core_model import FractalSystem
from .errors import DomainError, NonConvergenceError, PoleProximityError, ValidationError

NEAREST_LEFT = "nearest-left"
LINEAR = "linear"
INTERP_MODES = (NEAREST_LEFT, LINEAR)

MIN_K = 8
DEFAULT_K = 2 ** 14
NODE_SNAP = 1e-9  # fraction of a cell within which a point counts as a node
DOMAIN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class SampledFunction:
    t0: float
    tN: float
    values: np.ndarray
    interp: str = NEAREST_LEFT

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise ValidationError("values must be a 1-d array with at least 2 entries")
        if not np.all(np.isfinite(vals)):
            raise ValidationError("sampled values must be finite")
        if not self.tN > self.t0:
            raise ValidationError("grid must span a non-degenerate interval")
        if self.interp not in INTERP_MODES:
            raise ValidationError(f"unknown interpolation mode {self.interp!r}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "tN", float(self.tN))

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @property
    def h(self) -> float:
        return (self.tN - self.t0) / self.K

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.tN, self.K + 1)

    def replace(self, values) -> "SampledFunction":
        return SampledFunction(self.t0, self.tN, values, self.interp)

    def locate(self, t):
        """Cell coordinates of ``t``: node index ``k``, offset ``frac`` in [0, 1).

        Points within ``NODE_SNAP`` of a node snap onto it, so nodes are
        reproduced exactly.  Raises ``DomainError`` outside ``I`` beyond slack.
        """
        t = np.asarray(t, dtype=float)
        slack = DOMAIN_SLACK * (1.0 + max(abs(self.t0), abs(self.tN)))
        if np.any(t < self.t0 - slack) or np.any(t > self.tN + slack):
            bad = t[(t < self.t0 - slack) | (t > self.tN + slack)]
            raise DomainError(
                f"t={float(np.ravel(bad)[0])!r} outside [{self.t0!r}, {self.tN!r}]"
            )
        x = np.clip((t - self.t0) / self.h, 0.0, float(self.K))
        near = np.rint(x)
        snap = np.abs(x - near) < NODE_SNAP
        x = np.where(snap, near, x)
        k = np.minimum(np.floor(x), self.K).astype(np.int64)
        frac = np.where(snap, 0.0, x - k)
        return k, frac

    def __call__(self, t):
        return evaluate(self, t)


def make_sampled(interval, K: int, init=0.0, interp: str = NEAREST_LEFT) -> SampledFunction:
    if K < MIN_K:
        raise ValidationError(f"K must be >= {MIN_K}, got {K}")
    t0, tN = map(float, interval)
    grid = np.linspace(t0, tN, K + 1)
    if callable(init):
        values = np.asarray(init(grid), dtype=float) * np.ones_like(grid)
    else:
        values = np.full(K + 1, float(init))
    return SampledFunction(t0, tN, values, interp)


def evaluate(h: SampledFunction, t):
    k, frac = h.locate(t)
    v = h.values
    if h.interp == NEAREST_LEFT:
        out = v[k]
    else:
        k1 = np.minimum(k + 1, h.K)
        out = np.where(frac == 0.0, v[k], v[k] + frac * (v[k1] - v[k]))
    return out if np.ndim(out) else float(out)


@dataclass
class ConvergenceTrace:
    iterations: int = 0
    sup_deltas: list = field(default_factory=list)
    final_residual: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "sup_deltas": list(self.sup_deltas),
            "final_residual": self.final_residual,
        }


class RBPlan:
    """Operator data for one system on one grid.

    Holds, per subinterval ``j``, the grid nodes falling in ``I_j``, their
    pre-images ``u``, the affine part ``c_j u`` and scale ``delta_j(u)``, and
    the cell coordinates of ``u`` for reading ``h(u)``.
    """

    def __init__(self, sys: FractalSystem, t0: float, tN: float, K: int, interp: str):
        if (t0, tN) != sys.interval:
            raise DomainError(f"grid [{t0}, {tN}] does not span I={sys.interval}")
        self.sys = sys
        self.K = K
        self.interp = interp
        probe = SampledFunction(t0, tN, np.zeros(K + 1), interp)
        self.grid = probe.grid
        bins = sys.partition.locate(self.grid)
        self.blocks = []
        for j, m in enumerate(sys.maps):
            idx = np.nonzero(bins == j)[0]
            u = np.clip(m.inverse(self.grid[idx]), t0, tN)
            k, frac = probe.locate(u)
            base = sys.c[j] * u
            scale = sys.delta[j](u)
            self.blocks.append((j, idx, u, k, frac, base, scale))

    def _read(self, values, k, frac):
        if self.interp == NEAREST_LEFT:
            return values[k]
        k1 = np.minimum(k + 1, self.K)
        return values[k] + frac * (values[k1] - values[k])

    def apply(self, values: np.ndarray, d=None) -> np.ndarray:
        sys = self.sys
        d = sys.d if d is None else d
        out = np.empty(self.K + 1)
        for j, idx, u, k, frac, base, scale in self.blocks:
            hu = self._read(values, k, frac)
            sj = sys.s[j]
            pole = sj.pole_mask(hu)
            if pole.any():
                t_bad = float(self.grid[idx[np.argmax(pole)]])
                raise PoleProximityError(
                    f"s_{j} evaluated within 1e-9 of its pole at t={t_bad!r}", t=t_bad
                )
            out[idx] = base + scale * sj(hu) + d[j]
        return out


def apply_rb(sys: FractalSystem, h: SampledFunction) -> SampledFunction:
    plan = RBPlan(sys, h.t0, h.tN, h.K, h.interp)
    return h.replace(plan.apply(h.values))


def residual(sys: FractalSystem, h: SampledFunction, plan: RBPlan | None = None) -> float:
    """Sup over grid nodes of ``|h - T h|``."""
    plan = plan or RBPlan(sys, h.t0, h.tN, h.K, h.interp)
    return float(np.max(np.abs(h.values - plan.apply(h.values))))


def fixed_point(sys: FractalSystem, init: SampledFunction, tol: float = 1e-10,
                max_iter: int = 10_000, plan: RBPlan | None = None):
    """Iterate ``g <- T g`` from ``init`` until the sup-norm step is ``<= tol``.

    Returns ``(f, trace)``.  Raises ``NonConvergenceError`` carrying the trace
    when ``max_iter`` steps do not suffice.
    """
    if not tol > 0.0:
        raise ValidationError("tol must be > 0")
    plan = plan or RBPlan(sys, init.t0, init.tN, init.K, init.interp)
    trace = ConvergenceTrace()
    g = np.array(init.values)
    for n in range(1, max_iter + 1):
        nxt = plan.apply(g)
        step = float(np.max(np.abs(nxt - g)))
        trace.sup_deltas.append(step)
        trace.iterations = n
        g = nxt
        if step <= tol:
            trace.final_residual = float(np.max(np.abs(g - plan.apply(g))))
            return init.replace(g), trace
    trace.final_residual = float(np.max(np.abs(g - plan.apply(g))))
    raise NonConvergenceError(
        f"RB iteration did not reach tol={tol:g} in {max_iter} steps "
        f"(last step {trace.sup_deltas[-1]:.3e})",
        trace=trace, last=init.replace(g), residual=trace.final_residual,
    )


def solve_on_grid(sys: FractalSystem, K: int = DEFAULT_K, init: float | Callable = 0.0,
                  tol: float = 1e-10, interp: str = NEAREST_LEFT, max_iter: int = 10_000):
    """Convenience wrapper: fixed point on a fresh ``K``-cell grid over ``I``."""
    return fixed_point(sys, make_sampled(sys.interval, K, init, interp), tol, max_iter)
