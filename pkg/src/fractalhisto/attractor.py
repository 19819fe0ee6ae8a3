"""The product-space IFS ``w_j(t, x) = (l_j(t), F_j(t, x))`` and its attractor.

Geometry is measured in ``d_eta((t, x), (t', x')) = |t - t'| + eta |x - x'|``
with ``eta = (1 - alpha) / (2 (C + 1))``, the metric in which every ``w_j``
contracts.  The attractor is the closure of the graph of the RB fixed point,
which :func:`hausdorff_one_sided` lets us check numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .core_model import FractalSystem
from .errors import PoleProximityError, ResourceError, ValidationError
from .rb_solver import SampledFunction

CHAOS_GAME = "chaos-game"
DETERMINISTIC = "deterministic"
GRAPH_SAMPLES = "graph-samples"

DEFAULT_BURN_IN = 100
SIZE_CAP = 2 ** 20
T_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    provenance: str
    seed: int | None = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)

    @property
    def t(self):
        return self.points[:, 0]

    @property
    def x(self):
        return self.points[:, 1]

    def check_within(self, interval) -> None:
        t0, tN = interval
        if len(self) and (self.t.min() < t0 - T_SLACK or self.t.max() > tN + T_SLACK):
            raise ValidationError("point cloud abscissae leave I")


def graph_cloud(f: SampledFunction) -> PointCloud:
    return PointCloud(np.column_stack([f.grid, f.values]), GRAPH_SAMPLES)


def product_map(sys: FractalSystem, j: int, p):
    """``w_j`` applied to one point ``(t, x)`` or an ``(n, 2)`` array."""
    if not 0 <= j < sys.N:
        raise ValidationError(f"map index {j} outside 0..{sys.N - 1}")
    pts = np.asarray(p, dtype=float)
    t, x = pts[..., 0], pts[..., 1]
    pole = sys.s[j].pole_mask(x)
    if np.any(pole):
        bad = float(np.ravel(t)[np.argmax(np.ravel(pole))])
        raise PoleProximityError(f"s_{j} evaluated within 1e-9 of its pole at t={bad!r}", t=bad)
    out = np.stack([sys.maps[j].forward(t), sys.F(j, t, x)], axis=-1)
    return tuple(float(v) for v in out) if out.ndim == 1 else out


def eta(sys: FractalSystem) -> float:
    return (1.0 - sys.alpha) / (2.0 * (sys.C + 1.0))


def d_eta(p, q, eta_: float):
    if not eta_ > 0.0:
        raise ValidationError("eta must be > 0")
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    out = np.abs(p[..., 0] - q[..., 0]) + eta_ * np.abs(p[..., 1] - q[..., 1])
    return float(out) if np.ndim(out) == 0 else out


def contraction_factor(sys: FractalSystem, dist: float) -> float:
    """``max(alpha + eta C + eta, zeta(dist)/dist)``, the per-step shrink bound."""
    e = eta(sys)
    return max(sys.alpha + e * sys.C + e, float(sys.zeta(dist)) / dist)


def map_choices(N: int, count: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, N, size=count, dtype=np.int64)


def chaos_game(sys: FractalSystem, n: int, burn_in: int = DEFAULT_BURN_IN, seed: int = 0,
               backend=None) -> PointCloud:
    """Random iteration from ``(t_0, 0)`` with uniformly chosen maps.

    The first ``burn_in`` points are discarded.  ``backend`` selects a kernel
    module explicitly; by default the one picked at import is used.
    """
    if n < 1 or burn_in < 0:
        raise ValidationError("need n >= 1 and burn_in >= 0")
    choices = map_choices(sys.N, n + burn_in, seed)
    arr = sys.kernel_arrays()
    orbit = backend.chaos_orbit if backend is not None else kernels.chaos_orbit
    pts, bad = orbit(arr["a"], arr["b"], arr["c"], arr["d"], arr["s_code"], arr["s_par"],
                     arr["dl_code"], arr["dl_par"], choices, sys.interval[0], 0.0, burn_in)
    if bad >= 0:
        raise PoleProximityError(f"chaos game hit the reciprocal pole at step {bad}")
    return PointCloud(pts, CHAOS_GAME, seed)


def hutchinson(sys: FractalSystem, pts: np.ndarray) -> np.ndarray:
    """Union of the images of ``pts`` under every ``w_j``."""
    return np.concatenate([product_map(sys, j, pts) for j in range(sys.N)])


def deterministic_attractor(sys: FractalSystem, init: PointCloud, depth: int,
                            cap: int = SIZE_CAP, decimate: bool = False) -> PointCloud:
    """Apply the union-of-images operator ``depth`` times.

    When the next cloud would exceed ``cap`` points it is either thinned to
    ``cap`` evenly spaced points (``decimate=True``) or a ``ResourceError`` is
    raised.
    """
    if depth < 1:
        raise ValidationError("depth must be >= 1")
    pts = np.asarray(init.points)
    if len(pts) == 0:
        raise ValidationError("initial cloud is empty")
    for _ in range(depth):
        if len(pts) * sys.N > cap:
            if not decimate:
                raise ResourceError(
                    f"cloud would grow to {len(pts) * sys.N} points, above the cap {cap}"
                )
            keep = np.linspace(0, len(pts) - 1, cap // sys.N).round().astype(np.int64)
            pts = pts[keep]
        pts = hutchinson(sys, pts)
    return PointCloud(pts, DETERMINISTIC)


def _sorted_target(b: PointCloud):
    order = np.argsort(b.t, kind="stable")
    return np.ascontiguousarray(b.t[order]), np.ascontiguousarray(b.x[order])


def nearest_distances(a: PointCloud, b: PointCloud, eta_: float, backend=None) -> np.ndarray:
    """For each point of ``a`` its ``d_eta`` distance to the closest point of ``b``."""
    if len(a) == 0 or len(b) == 0:
        raise ValidationError("point clouds must be nonempty")
    bt, bx = _sorted_target(b)
    pts = np.ascontiguousarray(a.points)
    if backend is not None:
        return backend.min_deta(pts, bt, bx, float(eta_), kernels.thread_count())
    return kernels.min_deta(pts, bt, bx, float(eta_))


def hausdorff_one_sided(a: PointCloud, b: PointCloud, eta_: float, backend=None) -> float:
    """``max_{p in a} min_{q in b} d_eta(p, q)``."""
    return float(np.max(nearest_distances(a, b, eta_, backend)))


def hausdorff_pair(a: PointCloud, b: PointCloud, eta_: float) -> tuple:
    return hausdorff_one_sided(a, b, eta_), hausdorff_one_sided(b, a, eta_)
