"""Command-line entry point.

    fractalhisto solve <config>
    fractalhisto construct <config>
    fractalhisto verify <config> <function.csv>
    fractalhisto attractor <config> [--points N] [--seed S] [--burn-in B]
    fractalhisto diagnose <config> [--max-p P]
    fractalhisto check {modulus|contraction|banach-witness} <config-or-kind>

Exit status: 0 success, 1 validation error, 2 non-convergence, 3 I/O error.
The JSON report goes to stdout and to every ``report-json`` output.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import attractor as attr
from . import diagnostics as diag
from . import histopolation as histo
from . import io, rakotch
from .core_model import (
    CONTRACTION_KINDS,
    MODULUS_KINDS,
    ContractionSpec,
    ModulusSpec,
)
from .errors import ConfigurationError, FractalHistoError, NonConvergenceError
from .rb_solver import fixed_point, make_sampled, residual

logger = logging.getLogger(__name__)

OK, VALIDATION, NON_CONVERGENCE, IO_ERROR = 0, 1, 2, 3

CATALOG_DEFAULTS = {
    "linear": ("linear", 0.5, ModulusSpec("linear", 0.5)),
    "scaled-sine": ("scaled-sine", 0.5, ModulusSpec("linear", 0.5)),
    "scaled-tanh": ("scaled-tanh", 0.5, ModulusSpec("linear", 0.5)),
    "reciprocal": ("reciprocal", 1.0, ModulusSpec("hyperbolic")),
}
MODULUS_DEFAULTS = {"linear": ModulusSpec("linear", 0.5), "hyperbolic": ModulusSpec("hyperbolic")}


class Runner:
    """Executes one validated :class:`~fractalhisto.io.RunConfig`."""

    def __init__(self, cfg: io.RunConfig, out_dir: Path | None = None):
        self.cfg = cfg
        self.out_dir = Path(out_dir) if out_dir else Path.cwd()
        self.report = {"mode": cfg.mode, "seed": cfg.seed}
        self._solution = None

    def path(self, p: str) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.out_dir / p

    def outputs(self, kind: str):
        return [self.path(p) for p in self.cfg.output_paths(kind)]

    # -- shared steps -----------------------------------------------------

    def solved(self):
        """The histopolation solution (computed once)."""
        if self._solution is None:
            sol = histo.solve(self.cfg.problem())
            hist = self.cfg.histogram
            self.report["histopolation"] = {
                "d": list(sol.d),
                "outer_iterations": len(sol.outer_trace),
                "outer_changes": [change for _, change in sol.outer_trace],
                "inner_iterations": sol.inner_iterations,
                "area_residuals": sol.area_residuals,
                "offset_residuals": histo.offset_residual(sol.system, sol.f, hist),
                "rb_residual": residual(sol.system, sol.f),
            }
            self._solution = sol
        return self._solution

    def system_and_function(self):
        """Construction system with its fixed point, or the solved histopolation pair."""
        cfg = self.cfg
        if not cfg.has_offsets:
            sol = self.solved()
            return sol.system, sol.f
        sys_ = cfg.system()
        sv = cfg.solver
        f, trace = fixed_point(sys_, make_sampled(sys_.interval, sv.K, 0.0, sv.interp),
                               sv.tol_inner, sv.max_inner)
        self.report["fixed_point"] = {
            "K": sv.K,
            "iterations": trace.iterations,
            "final_step": trace.sup_deltas[-1],
            "rb_residual": trace.final_residual,
        }
        return sys_, f

    def write_function(self, sys_, f, title):
        for p in self.outputs("function-csv"):
            io.export_function_csv(f, p)
        for p in self.outputs("plot-svg"):
            io.emit_svg([{"points": np.column_stack([f.grid, f.values]),
                          "label": "f", "style": "marks"}], p, title)

    # -- subcommands -------------------------------------------------------

    def solve(self):
        sol = self.solved()
        t0, tN = sol.system.interval
        self.report["integral"] = histo.integrate(sol.f, t0, tN)
        self.report["area_tolerance"] = histo.AREA_TOL
        self.report["areas_ok"] = bool(
            max(abs(r) for r in sol.area_residuals) <= histo.AREA_TOL
        )
        self.write_function(sol.system, sol.f, "nonlinear fractal histopolation function")

    def construct(self):
        sys_, f = self.system_and_function()
        t0, tN = sys_.interval
        self.report["integral"] = histo.integrate(f, t0, tN)
        self.report["f_t0"] = f.values[0]
        self.write_function(sys_, f, "RB fixed point")

    def verify(self, function_csv):
        cfg = self.cfg
        f = io.read_function_csv(function_csv, cfg.solver.interp)
        prob = cfg.problem()
        areas = histo.verify_areas(f, prob)
        out = {
            "function_csv": str(function_csv),
            "K": f.K,
            "area_residuals": areas,
            "area_tolerance": histo.AREA_TOL,
            "areas_ok": bool(max(abs(r) for r in areas) <= histo.AREA_TOL),
        }
        if cfg.has_offsets:
            sys_ = prob.system([m.d for m in cfg.maps])
            out["rb_residual"] = residual(sys_, f)
            out["offset_residuals"] = histo.offset_residual(sys_, f, cfg.histogram)
        self.report["verify"] = out
        return OK if out["areas_ok"] else VALIDATION

    def attractor(self):
        cfg = self.cfg
        sys_, f = self.system_and_function()
        st = cfg.attractor
        cloud = attr.chaos_game(sys_, st.points, st.burn_in, cfg.seed)
        graph = attr.graph_cloud(f)
        e = attr.eta(sys_)
        to_graph, from_graph = attr.hausdorff_pair(cloud, graph, e)
        self.report["attractor"] = {
            "points": st.points,
            "burn_in": st.burn_in,
            "eta": e,
            "hausdorff_cloud_to_graph": to_graph,
            "hausdorff_graph_to_cloud": from_graph,
        }
        for p in self.outputs("attractor-csv"):
            io.export_points_csv(cloud.points, p)
        for p in self.outputs("plot-svg"):
            io.emit_svg([
                {"points": cloud.points, "label": "chaos game", "style": "dots"},
                {"points": graph.points, "label": "RB fixed point", "style": "marks"},
            ], p, "attractor vs. graph of f")

    def diagnose(self):
        cfg = self.cfg
        sys_, f = self.system_and_function()
        st = cfg.diagnose
        out = {
            "alpha": sys_.alpha,
            "delta_max": sys_.delta_max,
            "C": sys_.C,
            "discontinuity_depth": st.discontinuity_depth,
            "discontinuity_points": len(
                diag.discontinuity_points(sys_.partition, st.discontinuity_depth)
            ),
        }
        if sys_.delta_max < 1.0:
            rows = diag.oscillation_vs_bound(sys_, f, st.max_p)
            out["max_p"] = st.max_p
            out["words"] = len(rows)
            out["words_without_nodes"] = sum(r.measured is None for r in rows)
            out["exceedances"] = sum(r.exceeded for r in rows)
            for p in self.outputs("oscillation-csv"):
                io.write_csv(p, ("word", "lo", "hi", "measured", "bound", "exceeded"), (
                    ("-".join(map(str, r.word)), r.lo, r.hi, r.measured, r.bound,
                     int(r.exceeded)) for r in rows))
        else:
            out["oscillation_bound"] = "not applicable: requires delta_max < 1"
        table = diag.riemann_convergence(sys_, st.K_list, cfg.solver.tol_inner,
                                         interp=cfg.solver.interp)
        out["riemann"] = [{"K": K, "integral": v, "difference": d} for K, v, d in table]
        for p in self.outputs("riemann-csv"):
            io.write_csv(p, ("K", "integral", "difference"), table)
        self.report["diagnose"] = out

    def run(self, function_csv=None) -> int:
        status = OK
        handler = getattr(self, self.cfg.mode)
        if self.cfg.mode == "verify":
            status = handler(function_csv)
        else:
            handler()
        self.report["status"] = status
        for p in self.outputs("report-json"):
            io.write_report(self.report, p)
        return status


def run(cfg: io.RunConfig, out_dir=None, function_csv=None):
    """Run ``cfg``; return ``(exit_status, report)``.  Errors become statuses."""
    runner = Runner(cfg, out_dir)
    try:
        status = runner.run(function_csv)
    except NonConvergenceError as exc:
        runner.report.update(status=NON_CONVERGENCE, error=type(exc).__name__, message=str(exc))
        trace = exc.trace
        if trace is not None:
            runner.report["trace"] = trace.to_dict() if hasattr(trace, "to_dict") else [
                {"d": list(d), "change": ch} for d, ch in trace
            ]
        status = NON_CONVERGENCE
    except FractalHistoError as exc:
        runner.report.update(status=exc.exit_status, error=type(exc).__name__, message=str(exc))
        status = exc.exit_status
    except OSError as exc:
        runner.report.update(status=IO_ERROR, error=type(exc).__name__, message=str(exc))
        status = IO_ERROR
    return status, runner.report


# -- check ------------------------------------------------------------------


def _check_targets(what: str, target: str):
    """Resolve ``target`` to (moduli, contractions): a config path or a catalog kind."""
    if Path(target).is_file():
        cfg = io.load_config(target, "check")
        return cfg, [cfg.modulus], [m.s for m in cfg.maps]
    if what == "modulus":
        if target not in MODULUS_DEFAULTS:
            raise ConfigurationError(
                f"{target!r} is neither a config file nor a modulus kind {sorted(MODULUS_KINDS)}"
            )
        return None, [MODULUS_DEFAULTS[target]], []
    if target not in CATALOG_DEFAULTS:
        raise ConfigurationError(
            f"{target!r} is neither a config file nor a contraction kind "
            f"{sorted(CONTRACTION_KINDS)}"
        )
    kind, param, modulus = CATALOG_DEFAULTS[target]
    return None, [modulus], [ContractionSpec(kind, param, modulus)]


def run_check(what: str, target: str, seed: int | None = None) -> tuple:
    report = {"mode": "check", "check": what, "target": target}
    try:
        cfg, moduli, contractions = _check_targets(what, target)
        settings = cfg.check if cfg else io.CheckSettings()
        seed = seed if seed is not None else (cfg.seed if cfg else 0)
        report["seed"] = seed
        results = []
        if what == "modulus":
            for m in moduli:
                rep = rakotch.verify_modulus(m, settings.range or rakotch.MODULUS_RANGE)
                results.append({
                    "modulus": m.to_dict(),
                    "report": rep.to_dict(),
                    "beta_analytic": m.beta,
                    "beta_estimated": rakotch.estimate_beta(m),
                })
            passed = all(r["report"]["passed"] for r in results)
        elif what == "contraction":
            for s in contractions:
                rep = rakotch.verify_contraction(s, settings.range, settings.n_pairs, seed)
                results.append({"contraction": s.to_dict(), "modulus": s.modulus.to_dict(),
                                "report": rep.to_dict()})
            passed = all(r["report"]["passed"] for r in results)
        else:
            for s in contractions:
                rng = settings.range or s.default_range()
                witnesses = {str(k): rakotch.banach_witness(s, k, rng)
                             for k in settings.k_values}
                results.append({"contraction": s.to_dict(), "range": list(rng),
                                "witnesses": witnesses})
            passed = True
        report["results"] = results
        report["passed"] = passed
        report["status"] = OK
        status = OK
    except FractalHistoError as exc:
        report.update(status=exc.exit_status, error=type(exc).__name__, message=str(exc))
        status = exc.exit_status
    except OSError as exc:
        report.update(status=IO_ERROR, error=type(exc).__name__, message=str(exc))
        status = IO_ERROR
    return status, report


# -- argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fractalhisto",
        description="Nonlinear fractal histopolation functions from histograms.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config")
        p.add_argument("--out-dir", help="base directory for relative output paths")
        p.add_argument("--report", help="also write the JSON report here")
        p.add_argument("--K", type=int, help="grid cells (overrides solver.K)")
        p.add_argument("--seed", type=int)
        return p

    common(sub.add_parser("solve", help="solve for area-preserving offsets"))
    common(sub.add_parser("construct", help="RB fixed point of a fully specified system"))
    p = common(sub.add_parser("verify", help="check bin areas of a function CSV"))
    p.add_argument("function_csv")
    p = common(sub.add_parser("attractor", help="chaos-game attractor vs. graph"))
    p.add_argument("--points", type=int)
    p.add_argument("--burn-in", type=int)
    p = common(sub.add_parser("diagnose", help="oscillation bounds and Riemann sums"))
    p.add_argument("--max-p", type=int)
    p = sub.add_parser("check", help="sample-based contraction checks")
    p.add_argument("what", choices=("modulus", "contraction", "banach-witness"))
    p.add_argument("target", help="config file or catalog kind")
    p.add_argument("--seed", type=int)
    p.add_argument("--report")
    return parser


def _apply_flags(cfg: io.RunConfig, args) -> io.RunConfig:
    if args.K is not None:
        cfg = replace(cfg, solver=replace(cfg.solver, K=args.K))
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "points", None) is not None:
        cfg = replace(cfg, attractor=replace(cfg.attractor, points=args.points))
    if getattr(args, "burn_in", None) is not None:
        cfg = replace(cfg, attractor=replace(cfg.attractor, burn_in=args.burn_in))
    if getattr(args, "max_p", None) is not None:
        cfg = replace(cfg, diagnose=replace(cfg.diagnose, max_p=args.max_p))
    if args.report:
        cfg = replace(cfg, outputs=cfg.outputs + (io.OutputRequest("report-json",
                                                                  str(Path(args.report).resolve())),))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    if args.command == "check":
        status, report = run_check(args.what, args.target, args.seed)
        text = io.dumps_report(report)
        if args.report:
            try:
                io.write_report(report, args.report)
            except OSError as exc:
                logger.error("cannot write report: %s", exc)
                status = IO_ERROR
        sys.stdout.write(text)
        return status
    mode = "construct" if args.command == "construct" else args.command
    try:
        cfg = io.load_config(args.config, mode)
        cfg = _apply_flags(cfg, args)
        io.validate(cfg)
    except FractalHistoError as exc:
        sys.stdout.write(io.dumps_report({"mode": mode, "status": exc.exit_status,
                                          "error": type(exc).__name__, "message": str(exc)}))
        return exc.exit_status
    except OSError as exc:
        sys.stdout.write(io.dumps_report({"mode": mode, "status": IO_ERROR,
                                          "error": type(exc).__name__, "message": str(exc)}))
        return IO_ERROR
    status, report = run(cfg, args.out_dir, getattr(args, "function_csv", None))
    sys.stdout.write(io.dumps_report(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
