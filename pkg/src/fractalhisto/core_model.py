"""Static data of a nonlinear fractal system.

The objects here are immutable and validated at construction: a partition
of ``I = [t_0, t_N]``, the affine maps ``l_j`` carrying ``I`` onto each
subinterval, and the per-map data ``(c_j, d_j, delta_j, s_j)`` that define

    F_j(t, x) = c_j * t + delta_j(t) * s_j(x) + d_j

together with the shared comparison function ``psi`` of the contractions
``s_j``.  Indices are 0-based throughout the Python API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AdmissibilityError, ArityError, ConfigurationError, ValidationError

POLE_GUARD = 1e-9
ENDPOINT_RTOL = 1e-12

CONSTRUCTION = "construction"
HISTOPOLATION = "histopolation"
MODES = (CONSTRUCTION, HISTOPOLATION)


# -- partition and affine maps ----------------------------------------------


@dataclass(frozen=True)
class Partition:
    knots: tuple

    def __post_init__(self):
        knots = tuple(float(k) for k in self.knots)
        if len(knots) < 3:
            raise ArityError(
                f"a partition needs at least 3 knots (N >= 2), got {len(knots)}"
            )
        for i in range(1, len(knots)):
            if not knots[i] > knots[i - 1]:
                raise ValidationError(
                    f"knots must be strictly increasing; violated at index {i} "
                    f"({knots[i - 1]!r} >= {knots[i]!r})"
                )
        if not all(math.isfinite(k) for k in knots):
            raise ValidationError("knots must be finite")
        object.__setattr__(self, "knots", knots)

    @property
    def N(self) -> int:
        return len(self.knots) - 1

    @property
    def t0(self) -> float:
        return self.knots[0]

    @property
    def tN(self) -> float:
        return self.knots[-1]

    @property
    def interval(self) -> tuple:
        return (self.t0, self.tN)

    @property
    def length(self) -> float:
        return self.tN - self.t0

    def locate(self, t):
        """Return the 0-based subinterval index of ``t``.

        Subintervals are left-closed, ``[t_{j-1}, t_j)``, except the last one
        which also contains ``t_N``.
        """
        idx = np.searchsorted(self.knots, t, side="right") - 1
        return np.clip(idx, 0, self.N - 1)


def build_partition(knots: Sequence[float]) -> Partition:
    return Partition(tuple(knots))


@dataclass(frozen=True)
class AffineMap:
    a: float
    b: float

    def forward(self, t):
        return self.a * t + self.b

    def inverse(self, t):
        return (t - self.b) / self.a


def map_forward(m: AffineMap, t):
    return m.forward(t)


def map_inverse(m: AffineMap, t):
    return m.inverse(t)


def derive_affine_maps(p: Partition) -> list:
    """Maps ``l_j(t) = a_j t + b_j`` with ``l_j(t_0) = t_{j-1}``, ``l_j(t_N) = t_j``."""
    t0, tN = p.t0, p.tN
    maps = []
    for j in range(1, p.N + 1):
        a = (p.knots[j] - p.knots[j - 1]) / (tN - t0)
        b = p.knots[j - 1] - a * t0
        maps.append(AffineMap(a, b))
    return maps


# -- catalog: moduli, contractions, scaling factors ---------------------------

MODULUS_KINDS = {"linear": "k", "hyperbolic": None}
CONTRACTION_KINDS = {
    "linear": "k",
    "scaled-sine": "a",
    "reciprocal": "c",
    "scaled-tanh": "a",
}
SCALING_KINDS = {"constant": "value", "linear-in-t": "m"}

# integer codes shared with the compiled kernels
CONTRACTION_CODES = {"linear": 0, "scaled-sine": 1, "reciprocal": 2, "scaled-tanh": 3}
SCALING_CODES = {"constant": 0, "linear-in-t": 1}


@dataclass(frozen=True)
class ModulusSpec:
    """Comparison function ``psi`` from the catalog.

    ``linear``: ``psi(t) = k t`` with ``k`` in (0, 1), ``beta = k``.
    ``hyperbolic``: ``psi(t) = t / (1 + t)``, ``beta = 1``.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in MODULUS_KINDS:
            raise ConfigurationError(
                f"unknown modulus kind {self.kind!r}; expected one of {sorted(MODULUS_KINDS)}"
            )
        if self.kind == "linear":
            if self.param is None or not 0.0 < float(self.param) < 1.0:
                raise ValidationError(f"linear modulus needs k in (0, 1), got {self.param!r}")
            object.__setattr__(self, "param", float(self.param))
        else:
            object.__setattr__(self, "param", None)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "linear":
            return self.param * t
        return t / (1.0 + t)

    @property
    def beta(self) -> float:
        return self.param if self.kind == "linear" else 1.0

    def to_dict(self) -> dict:
        name = MODULUS_KINDS[self.kind]
        return {"kind": self.kind, "params": {name: self.param} if name else {}}


@dataclass(frozen=True)
class ContractionSpec:
    kind: str
    param: float
    modulus: ModulusSpec = field(compare=True)

    def __post_init__(self):
        if self.kind not in CONTRACTION_KINDS:
            raise ConfigurationError(
                f"unknown contraction kind {self.kind!r}; "
                f"expected one of {sorted(CONTRACTION_KINDS)}"
            )
        if self.param is None or not math.isfinite(float(self.param)):
            raise ValidationError(f"contraction {self.kind!r} needs a finite parameter")
        object.__setattr__(self, "param", float(self.param))

    @property
    def code(self) -> int:
        return CONTRACTION_CODES[self.kind]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.param
        if self.kind == "linear":
            return p * x
        if self.kind == "scaled-sine":
            return p * np.sin(x)
        if self.kind == "scaled-tanh":
            return p * np.tanh(x)
        return 1.0 / (p + x)

    def pole_mask(self, x):
        """Boolean mask of arguments within ``POLE_GUARD`` of a pole."""
        x = np.asarray(x, dtype=float)
        if self.kind != "reciprocal":
            return np.zeros(x.shape, dtype=bool)
        return np.abs(self.param + x) < POLE_GUARD

    def default_range(self) -> tuple:
        # 1/(c+x) only contracts against t/(1+t) where c + x >= 1
        if self.kind == "reciprocal":
            lo = 1.0 - self.param
            return (lo, lo + 10.0)
        return (-10.0, 10.0)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": {CONTRACTION_KINDS[self.kind]: self.param}}


@dataclass(frozen=True)
class ScalingSpec:
    """Vertical scaling factor: constant, or ``delta(t) = m t``."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in SCALING_KINDS:
            raise ConfigurationError(
                f"unknown scaling kind {self.kind!r}; expected one of {sorted(SCALING_KINDS)}"
            )
        if not math.isfinite(float(self.value)):
            raise ValidationError("scaling parameter must be finite")
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def constant(cls, value: float) -> "ScalingSpec":
        return cls("constant", value)

    @classmethod
    def linear(cls, m: float) -> "ScalingSpec":
        return cls("linear-in-t", m)

    @property
    def code(self) -> int:
        return SCALING_CODES[self.kind]

    @property
    def is_constant(self) -> bool:
        return self.kind == "constant"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.value)
        return self.value * t

    def sup_abs(self, interval) -> float:
        t0, tN = interval
        if self.kind == "constant":
            return abs(self.value)
        return abs(self.value) * max(abs(t0), abs(tN))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": {SCALING_KINDS[self.kind]: self.value}}


# -- the assembled system -----------------------------------------------------


def _zeta_ratio_ok(delta_max: float, modulus: ModulusSpec) -> bool:
    ts = np.geomspace(1e-12, 1e6, 400)
    return bool(np.all(delta_max * modulus(ts) / ts < 1.0))


def check_admissible(delta_max: float, beta: float, mode: str) -> None:
    """Raise ``AdmissibilityError`` naming the violated bound, if any."""
    if mode == HISTOPOLATION and not delta_max < 1.0:
        raise AdmissibilityError(
            f"histopolation requires delta_max < 1 (delta_max={delta_max!r}, beta={beta!r})",
            delta_max, beta, "delta_max < 1",
        )
    if beta < 1.0:
        if not delta_max * beta < 1.0:
            raise AdmissibilityError(
                "construction requires delta_max*beta < 1 "
                f"(delta_max={delta_max!r}, beta={beta!r}, limit 1/beta={1.0 / beta!r})",
                delta_max, beta, "delta_max*beta < 1",
            )
    elif not delta_max < 1.0:
        raise AdmissibilityError(
            "construction requires delta_max < 1 when beta = 1 "
            f"(delta_max={delta_max!r}, beta={beta!r})",
            delta_max, beta, "delta_max < 1",
        )


@dataclass(frozen=True)
class FractalSystem:
    partition: Partition
    c: tuple
    d: tuple
    delta: tuple
    s: tuple
    mode: str = CONSTRUCTION
    maps: tuple = field(init=False)

    def __post_init__(self):
        N = self.partition.N
        for name in ("c", "d", "delta", "s"):
            seq = tuple(getattr(self, name))
            if len(seq) != N:
                raise ArityError(f"{name} has length {len(seq)}, expected N={N}")
            object.__setattr__(self, name, seq)
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "d", tuple(float(v) for v in self.d))
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        moduli = {sj.modulus for sj in self.s}
        if len(moduli) != 1:
            raise ConfigurationError(
                "all contractions s_j must share one modulus psi; got "
                + ", ".join(sorted(repr(m) for m in moduli))
            )
        object.__setattr__(self, "maps", tuple(derive_affine_maps(self.partition)))
        check_admissible(self.delta_max, self.beta, self.mode)
        if not _zeta_ratio_ok(self.delta_max, self.modulus):
            raise AdmissibilityError(
                "zeta(t)/t = delta_max*psi(t)/t must stay below 1",
                self.delta_max, self.beta, "zeta(t)/t < 1",
            )

    @property
    def N(self) -> int:
        return self.partition.N

    @property
    def interval(self) -> tuple:
        return self.partition.interval

    @property
    def modulus(self) -> ModulusSpec:
        return self.s[0].modulus

    @property
    def alpha(self) -> float:
        return max(abs(m.a) for m in self.maps)

    @property
    def C(self) -> float:
        return max(abs(v) for v in self.c)

    @property
    def delta_max(self) -> float:
        return max(dj.sup_abs(self.interval) for dj in self.delta)

    @property
    def beta(self) -> float:
        return self.modulus.beta

    def zeta(self, t):
        return self.delta_max * self.modulus(t)

    def F(self, j: int, t, x):
        """``F_j(t, x)`` evaluated at the pre-image abscissa ``t``."""
        return self.c[j] * t + self.delta[j](t) * self.s[j](x) + self.d[j]

    def with_offsets(self, d) -> "FractalSystem":
        return FractalSystem(self.partition, self.c, tuple(d), self.delta, self.s, self.mode)

    def with_mode(self, mode: str) -> "FractalSystem":
        return FractalSystem(self.partition, self.c, self.d, self.delta, self.s, mode)

    def kernel_arrays(self) -> dict:
        """Flat float/int arrays describing the maps, for the compiled kernels."""
        return {
            "a": np.array([m.a for m in self.maps]),
            "b": np.array([m.b for m in self.maps]),
            "c": np.array(self.c),
            "d": np.array(self.d),
            "s_code": np.array([sj.code for sj in self.s], dtype=np.int64),
            "s_par": np.array([sj.param for sj in self.s]),
            "dl_code": np.array([dj.code for dj in self.delta], dtype=np.int64),
            "dl_par": np.array([dj.value for dj in self.delta]),
        }


def assemble_system(p, c, d, delta, s, mode=CONSTRUCTION) -> FractalSystem:
    return FractalSystem(p, tuple(c), tuple(d), tuple(delta), tuple(s), mode)


@dataclass(frozen=True)
class Histogram:
    frequencies: tuple

    def __post_init__(self):
        object.__setattr__(self, "frequencies", tuple(float(y) for y in self.frequencies))

    def __len__(self):
        return len(self.frequencies)

    def check_against(self, p: Partition) -> None:
        if len(self) != p.N:
            raise ArityError(
                f"histogram has {len(self)} frequencies but the partition has N={p.N} bins"
            )
