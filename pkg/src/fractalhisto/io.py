"""Run configuration and file formats (JSON config and report, CSV, SVG).

Config documents are JSON with a top-level ``"schema": 1``::

    {
      "schema": 1,
      "mode": "solve",
      "partition": [0, 0.5, 1],
      "histogram": [5, 6],
      "modulus": {"kind": "hyperbolic", "params": {}},
      "maps": [
        {"c": 0.5, "delta": {"kind": "constant", "params": {"value": 0.5}},
         "s": {"kind": "reciprocal", "params": {"c": 1}}},
        ...
      ],
      "solver": {"K": 16384, "tol_inner": 1e-10, "tol_outer": 1e-8, "max_outer": 200},
      "outputs": [{"kind": "function-csv", "path": "f.csv"}],
      "seed": 0
    }

Maps may carry an offset ``"d"``; construction needs it, histopolation
solves for it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core_model import (
    CONSTRUCTION,
    CONTRACTION_KINDS,
    MODULUS_KINDS,
    SCALING_KINDS,
    ContractionSpec,
    FractalSystem,
    Histogram,
    ModulusSpec,
    Partition,
    ScalingSpec,
    assemble_system,
)
from .errors import ConfigurationError, FractalHistoError, ValidationError
from .histopolation import HistopolationProblem
from .rb_solver import DEFAULT_K, INTERP_MODES, NEAREST_LEFT, SampledFunction

SCHEMA_VERSION = 1
RUN_MODES = ("solve", "construct", "verify", "attractor", "diagnose", "check")
OUTPUT_KINDS = (
    "function-csv",
    "attractor-csv",
    "report-json",
    "plot-svg",
    "oscillation-csv",
    "riemann-csv",
)


@dataclass(frozen=True)
class MapConfig:
    c: float
    delta: ScalingSpec
    s: ContractionSpec
    d: float | None = None

    def to_dict(self) -> dict:
        out = {"c": self.c, "delta": self.delta.to_dict(), "s": self.s.to_dict()}
        if self.d is not None:
            out["d"] = self.d
        return out


@dataclass(frozen=True)
class SolverSettings:
    K: int = DEFAULT_K
    tol_inner: float = 1e-10
    tol_outer: float = 1e-8
    max_outer: int = 200
    max_inner: int = 10_000
    interp: str = NEAREST_LEFT


@dataclass(frozen=True)
class AttractorSettings:
    points: int = 100_000
    burn_in: int = 100


@dataclass(frozen=True)
class DiagnoseSettings:
    max_p: int = 8
    K_list: tuple = tuple(2 ** k for k in range(10, 15))
    discontinuity_depth: int = 6


@dataclass(frozen=True)
class CheckSettings:
    n_pairs: int = 10_000
    k_values: tuple = (0.5, 0.9, 0.99)
    range: tuple | None = None


@dataclass(frozen=True)
class OutputRequest:
    kind: str
    path: str


@dataclass(frozen=True)
class RunConfig:
    mode: str
    partition: Partition
    modulus: ModulusSpec
    maps: tuple
    histogram: Histogram | None = None
    solver: SolverSettings = field(default_factory=SolverSettings)
    attractor: AttractorSettings = field(default_factory=AttractorSettings)
    diagnose: DiagnoseSettings = field(default_factory=DiagnoseSettings)
    check: CheckSettings = field(default_factory=CheckSettings)
    outputs: tuple = ()
    seed: int = 0

    @property
    def has_offsets(self) -> bool:
        return all(m.d is not None for m in self.maps)

    def system(self, mode: str = CONSTRUCTION) -> FractalSystem:
        if not self.has_offsets:
            raise ConfigurationError("maps[*].d: every map needs an offset d for construction")
        return assemble_system(
            self.partition,
            [m.c for m in self.maps],
            [m.d for m in self.maps],
            [m.delta for m in self.maps],
            [m.s for m in self.maps],
            mode,
        )

    def problem(self) -> HistopolationProblem:
        if self.histogram is None:
            raise ConfigurationError("histogram: missing field (required for histopolation)")
        sv = self.solver
        return HistopolationProblem(
            self.partition, self.histogram,
            tuple(m.c for m in self.maps), tuple(m.delta for m in self.maps),
            tuple(m.s for m in self.maps),
            K=sv.K, tol_inner=sv.tol_inner, tol_outer=sv.tol_outer,
            max_outer=sv.max_outer, max_inner=sv.max_inner, interp=sv.interp,
        )

    def output_paths(self, kind: str) -> list:
        return [o.path for o in self.outputs if o.kind == kind]

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "mode": self.mode,
            "partition": list(self.partition.knots),
            "modulus": self.modulus.to_dict(),
            "maps": [m.to_dict() for m in self.maps],
            "solver": vars(self.solver).copy(),
            "attractor": vars(self.attractor).copy(),
            "diagnose": {**vars(self.diagnose), "K_list": list(self.diagnose.K_list)},
            "check": {
                "n_pairs": self.check.n_pairs,
                "k_values": list(self.check.k_values),
                "range": list(self.check.range) if self.check.range else None,
            },
            "outputs": [{"kind": o.kind, "path": o.path} for o in self.outputs],
            "seed": self.seed,
        }
        if self.histogram is not None:
            out["histogram"] = list(self.histogram.frequencies)
        return out


# -- parsing -----------------------------------------------------------------


def _qualify(path: str, exc: Exception) -> ConfigurationError:
    err = ConfigurationError(f"{path}: {exc}")
    err.__cause__ = exc
    return err


def _require(doc: dict, key: str, where: str = ""):
    if key not in doc:
        raise ConfigurationError(f"{where}{key}: missing field")
    return doc[key]


def _single_param(spec: dict, catalog: dict, where: str):
    kind = _require(spec, "kind", where)
    if kind not in catalog:
        raise ConfigurationError(
            f"{where}kind: unknown catalog kind {kind!r}; expected one of {sorted(catalog)}"
        )
    name = catalog[kind]
    params = spec.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ConfigurationError(f"{where}params: expected an object")
    if name is None:
        return kind, None
    if name not in params:
        raise ConfigurationError(f"{where}params.{name}: missing field")
    return kind, params[name]


def _build(where: str, factory, *args):
    try:
        return factory(*args)
    except FractalHistoError as exc:
        raise _qualify(where, exc) from exc
    except (TypeError, ValueError) as exc:
        raise _qualify(where, exc) from exc


def _settings(doc: dict, key: str, cls):
    raw = doc.get(key, {}) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{key}: expected an object")
    known = set(cls.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigurationError(f"{key}: unknown fields {sorted(unknown)}")
    vals = {}
    for name, value in raw.items():
        if isinstance(value, list):
            value = tuple(value)
        vals[name] = value
    return cls(**vals)


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and fully validate a config document.

    ``mode`` overrides the document's ``mode`` field.  Validation errors carry
    the path of the offending field.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"malformed JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigurationError("config must be a JSON object")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigurationError(f"schema: unsupported version {schema!r}")
    mode = mode or doc.get("mode", "solve")
    if mode not in RUN_MODES:
        raise ConfigurationError(f"mode: unknown mode {mode!r}; expected one of {RUN_MODES}")

    partition = _build("partition", Partition, tuple(_require(doc, "partition")))
    mod_kind, mod_param = _single_param(_require(doc, "modulus"), MODULUS_KINDS, "modulus.")
    modulus = _build("modulus", ModulusSpec, mod_kind, mod_param)

    raw_maps = _require(doc, "maps")
    if not isinstance(raw_maps, list) or len(raw_maps) != partition.N:
        raise ConfigurationError(
            f"maps: expected a list of N={partition.N} maps, got "
            f"{len(raw_maps) if isinstance(raw_maps, list) else type(raw_maps).__name__}"
        )
    maps = []
    for i, m in enumerate(raw_maps):
        where = f"maps[{i}]."
        dk, dv = _single_param(_require(m, "delta", where), SCALING_KINDS, where + "delta.")
        sk, sv = _single_param(_require(m, "s", where), CONTRACTION_KINDS, where + "s.")
        maps.append(MapConfig(
            c=_build(where + "c", float, _require(m, "c", where)),
            delta=_build(where + "delta", ScalingSpec, dk, dv),
            s=_build(where + "s", ContractionSpec, sk, sv, modulus),
            d=_build(where + "d", float, m["d"]) if m.get("d") is not None else None,
        ))

    histogram = None
    if doc.get("histogram") is not None:
        histogram = _build("histogram", Histogram, tuple(doc["histogram"]))
        if len(histogram) != partition.N:
            raise ConfigurationError(
                f"histogram: {len(histogram)} frequencies for N={partition.N} bins"
            )

    outputs = []
    for i, o in enumerate(doc.get("outputs", []) or []):
        kind = _require(o, "kind", f"outputs[{i}].")
        if kind not in OUTPUT_KINDS:
            raise ConfigurationError(
                f"outputs[{i}].kind: unknown artifact {kind!r}; expected one of {OUTPUT_KINDS}"
            )
        outputs.append(OutputRequest(kind, str(_require(o, "path", f"outputs[{i}]."))))

    solver = _settings(doc, "solver", SolverSettings)
    if solver.interp not in INTERP_MODES:
        raise ConfigurationError(f"solver.interp: unknown mode {solver.interp!r}")
    cfg = RunConfig(
        mode=mode,
        partition=partition,
        modulus=modulus,
        maps=tuple(maps),
        histogram=histogram,
        solver=solver,
        attractor=_settings(doc, "attractor", AttractorSettings),
        diagnose=_settings(doc, "diagnose", DiagnoseSettings),
        check=_settings(doc, "check", CheckSettings),
        outputs=tuple(outputs),
        seed=int(doc.get("seed", 0)),
    )
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    """Mode-specific admissibility, delegated to the core model."""
    needs_solve = cfg.mode in ("solve", "verify") or not cfg.has_offsets
    if cfg.mode == "check":
        return
    if needs_solve:
        if cfg.histogram is None:
            if cfg.mode in ("solve", "verify"):
                raise ConfigurationError("histogram: missing field (required in "
                                         f"{cfg.mode} mode)")
            raise ConfigurationError("maps[*].d: missing field and no histogram to solve for it")
        try:
            cfg.problem()
        except FractalHistoError as exc:
            raise _qualify("maps", exc) from exc
    if cfg.has_offsets and cfg.mode in ("construct", "attractor", "diagnose"):
        try:
            cfg.system()
        except FractalHistoError as exc:
            raise _qualify("maps", exc) from exc


def load_config(path, mode: str | None = None) -> RunConfig:
    return parse_config(Path(path).read_text(), mode)


def dump_config(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


# -- CSV ---------------------------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else (_fmt(v) if isinstance(v, (float, np.floating))
                                                    else str(v)) for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def export_function_csv(f: SampledFunction, path) -> None:
    write_csv(path, ("t", "f"), zip(f.grid.tolist(), f.values.tolist()))


def read_function_csv(path, interp: str = NEAREST_LEFT) -> SampledFunction:
    """Read a ``t,f`` CSV written by :func:`export_function_csv`."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].strip() != "t,f":
        raise ValidationError(f"{path}: expected header 't,f'")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:] if ln.strip()])
    if data.ndim != 2 or len(data) < 2:
        raise ValidationError(f"{path}: need at least two rows")
    t, v = data[:, 0], data[:, 1]
    f = SampledFunction(t[0], t[-1], v, interp)
    if not np.allclose(f.grid, t, rtol=0.0, atol=1e-12 * (1.0 + np.abs(t).max())):
        raise ValidationError(f"{path}: abscissae do not form a uniform grid")
    return f


def export_points_csv(points, path) -> None:
    pts = np.asarray(points)
    write_csv(path, ("t", "x"), pts.tolist())


# -- SVG ---------------------------------------------------------------------

SVG_W, SVG_H, MARGIN = 800, 500, 60
MAX_MARKS = 20_000
PALETTE = ("#1f4e79", "#c0504d", "#4f8a3c", "#8064a2")


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def emit_svg(series, path, title: str = "") -> None:
    """Write a standalone SVG scatter of one or more point series.

    ``series`` is a list of dicts with ``points`` (an ``(n, 2)`` array),
    optional ``label`` and ``style`` (``"marks"`` for sampled functions,
    ``"dots"`` for clouds).  Samples are drawn as separate marks and never
    joined, since the functions involved are discontinuous.
    """
    series = [s for s in series]
    if not series or any(len(np.asarray(s["points"])) == 0 for s in series):
        raise ValidationError("emit_svg needs at least one nonempty series")
    allpts = np.concatenate([np.asarray(s["points"], dtype=float) for s in series])
    tmin, tmax = float(allpts[:, 0].min()), float(allpts[:, 0].max())
    xmin, xmax = float(allpts[:, 1].min()), float(allpts[:, 1].max())
    if tmax == tmin:
        tmax = tmin + 1.0
    if xmax == xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    pad = 0.05 * (xmax - xmin)
    xmin, xmax = xmin - pad, xmax + pad
    pw, ph = SVG_W - 2 * MARGIN, SVG_H - 2 * MARGIN

    def sx(t):
        return MARGIN + (np.asarray(t) - tmin) / (tmax - tmin) * pw

    def sy(x):
        return SVG_H - MARGIN - (np.asarray(x) - xmin) / (xmax - xmin) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_W}" height="{SVG_H}" '
        f'viewBox="0 0 {SVG_W} {SVG_H}">',
        "<style>",
        ".axis{stroke:#000;stroke-width:1;fill:none}",
        ".tick{font:11px sans-serif;fill:#222}",
        ".title{font:14px sans-serif;fill:#000}",
    ]
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        width = 1.6 if s.get("style", "marks") == "dots" else 1.2
        out.append(f".series-{i}{{stroke:{color};stroke-width:{width};"
                   "stroke-linecap:round;fill:none}")
    out.append("</style>")
    out.append(f'<rect width="{SVG_W}" height="{SVG_H}" fill="#fff"/>')
    x0, y0 = MARGIN, SVG_H - MARGIN
    out.append(f'<path class="axis" d="M{x0} {MARGIN}V{y0}H{SVG_W - MARGIN}"/>')
    for t in _ticks(tmin, tmax):
        px = float(sx(t))
        out.append(f'<path class="axis" d="M{px:.2f} {y0}v5"/>')
        out.append(f'<text class="tick" x="{px:.2f}" y="{y0 + 18}" '
                   f'text-anchor="middle">{t:.3g}</text>')
    for x in _ticks(xmin, xmax):
        py = float(sy(x))
        out.append(f'<path class="axis" d="M{x0} {py:.2f}h-5"/>')
        out.append(f'<text class="tick" x="{x0 - 8}" y="{py + 4:.2f}" '
                   f'text-anchor="end">{x:.3g}</text>')
    if title:
        out.append(f'<text class="title" x="{SVG_W / 2}" y="{MARGIN / 2}" '
                   f'text-anchor="middle">{title}</text>')
    for i, s in enumerate(series):
        pts = np.asarray(s["points"], dtype=float)
        if len(pts) > MAX_MARKS:
            pts = pts[:: -(-len(pts) // MAX_MARKS)]
        dash = "h0.01" if s.get("style", "marks") == "dots" else "h1.2"
        px, py = sx(pts[:, 0]), sy(pts[:, 1])
        d = "".join(f"M{a:.2f} {b:.2f}{dash}" for a, b in zip(px, py))
        label = s.get("label", f"series {i}")
        out.append(f'<path class="series-{i}" d="{d}"><title>{label}</title></path>')
    out.append("</svg>")
    _write_text(path, "\n".join(out) + "\n")


# -- report ------------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(report: dict, path) -> None:
    _write_text(path, dumps_report(report))
