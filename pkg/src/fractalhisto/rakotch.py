"""Sample-based checks of psi-contraction properties and scalar fixed points.

Functions accept catalog specs or plain callables, so ad-hoc comparison
functions can be checked the same way as catalog ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergenceError, ValidationError

TOLERANCE = 1e-12
MODULUS_RANGE = (0.0, 20.0)
DEFAULT_PAIRS = 10_000
MIN_GAP = 2.0 ** -26


@dataclass(frozen=True)
class ContractionReport:
    checked_pairs: int
    max_violation: float
    passed: bool
    witness: tuple | None = None
    tolerance: float = TOLERANCE

    def to_dict(self) -> dict:
        return {
            "checked_pairs": self.checked_pairs,
            "max_violation": self.max_violation,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "tolerance": self.tolerance,
        }


def _positive_samples(range_, n_samples):
    """Linear and geometric samples of ``(lo, hi]``, the latter crowding ``lo``."""
    lo, hi = float(range_[0]), float(range_[1])
    if not hi > lo or hi <= 0.0:
        raise DomainError(f"empty or non-positive range {range_!r}")
    if lo < 0.0:
        raise DomainError(f"modulus range must lie in (0, inf), got {range_!r}")
    if n_samples < 2:
        raise ValidationError("n_samples must be >= 2")
    floor = lo if lo > 0.0 else hi * 1e-12
    lin = np.linspace(lo, hi, n_samples)
    lin = lin[lin > 0.0]
    geo = np.geomspace(floor, hi, n_samples)
    return np.unique(np.concatenate([lin, geo]))


def verify_modulus(psi, range_=MODULUS_RANGE, n_samples=1000, tol=TOLERANCE) -> ContractionReport:
    """Check ``psi(t) < t`` and that ``psi(t)/t`` is non-increasing on samples."""
    ts = _positive_samples(range_, n_samples)
    vals = np.asarray(psi(ts), dtype=float)
    below = vals - ts
    ratio = vals / ts
    rise = np.diff(ratio)
    viol = np.concatenate([below, rise])
    k = int(np.argmax(viol))
    worst = float(viol[k])
    if k < len(ts):
        witness = (float(ts[k]),)
    else:
        i = k - len(ts)
        witness = (float(ts[i]), float(ts[i + 1]))
    passed = worst <= tol
    return ContractionReport(len(viol), worst, passed, None if passed else witness, tol)


def verify_contraction(s, range_=None, n_pairs=DEFAULT_PAIRS, seed=0, psi=None,
                       tol=TOLERANCE) -> ContractionReport:
    """Check ``|s(u) - s(v)| <= psi(|u - v|)`` over seeded random pairs."""
    if n_pairs < 1:
        raise ValidationError("n_pairs must be >= 1")
    if psi is None:
        psi = s.modulus
    if range_ is None:
        range_ = s.default_range()
    lo, hi = map(float, range_)
    if not hi > lo:
        raise DomainError(f"empty range {range_!r}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(lo, hi, n_pairs)
    v = rng.uniform(lo, hi, n_pairs)
    viol = np.abs(s(u) - s(v)) - psi(np.abs(u - v))
    k = int(np.argmax(viol))
    worst = float(viol[k])
    return ContractionReport(n_pairs, worst, worst <= tol, (float(u[k]), float(v[k])), tol)


def banach_witness(s, k, range_=(0.0, 1.0), n_samples=200):
    """Find ``(u, v)`` with ``|s(u) - s(v)| > k |u - v|``, or ``None``.

    Besides a uniform grid, the candidate set contains a geometric ladder
    toward the left endpoint, where the Lipschitz ratio of maps that are
    Rakotch but not Banach contractions approaches 1.  The returned pair is
    the one with the steepest difference quotient.
    """
    if not 0.0 <= k < 1.0:
        raise ValidationError(f"k must lie in [0, 1), got {k!r}")
    lo, hi = map(float, range_)
    if not hi > lo:
        raise DomainError(f"empty range {range_!r}")
    ladder = lo + (hi - lo) * np.exp2(-np.arange(1, 61, dtype=float))
    pts = np.unique(np.concatenate([np.linspace(lo, hi, n_samples), ladder]))
    vals = np.asarray(s(pts), dtype=float)
    iu, iv = np.triu_indices(len(pts), k=1)
    gap = pts[iv] - pts[iu]
    # gaps below sqrt(eps) would measure cancellation noise, not the map
    usable = gap >= MIN_GAP * (hi - lo)
    iu, iv, gap = iu[usable], iv[usable], gap[usable]
    ratio = np.abs(vals[iv] - vals[iu]) / gap
    best = int(np.argmax(ratio))
    if ratio[best] > k and abs(vals[iv[best]] - vals[iu[best]]) > k * gap[best]:
        return float(pts[iu[best]]), float(pts[iv[best]])
    return None


def scalar_fixed_point(s, x0, tol=1e-12, max_iter=10_000):
    """Iterate ``x <- s(x)`` until ``|s(x) - x| <= tol``; return ``(x, iterations)``."""
    if not tol > 0.0 or max_iter < 1:
        raise ValidationError("tol must be > 0 and max_iter >= 1")
    x = float(x0)
    for n in range(1, max_iter + 1):
        nxt = float(s(x))
        if abs(nxt - x) <= tol:
            return nxt, n
        x = nxt
    residual = abs(float(s(x)) - x)
    raise NonConvergenceError(
        f"scalar iteration did not converge in {max_iter} steps (residual {residual:.3e})",
        last=x, residual=residual,
    )


def estimate_beta(psi, range_=MODULUS_RANGE, n_samples=1000) -> float:
    """Numerical ``sup psi(t)/t`` over linear and geometric samples.

    For the linear catalog kind the ratio is ``k`` identically and ``k`` is
    returned as is, avoiding the last-bit noise of ``k t / t``.
    """
    if getattr(psi, "kind", None) == "linear":
        return float(psi.param)
    ts = _positive_samples(range_, n_samples)
    return float(np.max(np.asarray(psi(ts), dtype=float) / ts))

