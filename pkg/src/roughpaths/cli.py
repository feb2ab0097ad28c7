"""Command-line front end: signatures, metrics, integrals, lifts and the suite.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
non-convergence (with diagnostics on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import acceptance, pathio
from .errors import CoverageGapError, DomainExitError, NonConvergenceError, RoughPathsError
from .integration import LocalOneForm, integrate, integrate_local_oneform
from .lipschitz import build_jet, constant_oneform, differential, rotation_oneform
from .manifold import build_atlas, consistency_check, lift_path
from .rough import RoughPath, dp_metric, dp_product_metric, extend, from_bv_path
from .signature import signature
from .variation import p_variation


@dataclass
class Config:
    tol_sew: float = 1e-10
    max_depth: int = 14
    tensor_degree_max: int = 6

    @classmethod
    def load(cls, path) -> "Config":
        payload = pathio.load_json(path)
        cfg = cls()
        for key, value in payload.items():
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key {key!r}")
            setattr(cfg, key, type(getattr(cfg, key))(value))
        return cfg


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(payload: dict, out) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _window(args) -> tuple | None:
    if args.window_from is None and args.window_to is None:
        return None
    if args.window_from is None or args.window_to is None:
        raise UsageError("--from and --to must be given together")
    return (args.window_from, args.window_to)


def _resolve_oneform(spec: str, dim: int):
    """Parse NAME or NAME:params into a one-form (or ball list)."""
    name, _, params = spec.partition(":")
    if name == "rotation":
        return rotation_oneform()
    if name == "constant":
        matrix = json.loads(params) if params else np.eye(dim).tolist()
        return constant_oneform(matrix)
    if name == "grad":
        return differential(build_jet(params, dim))
    if name == "local":
        payload = pathio.load_json(params)
        return [
            LocalOneForm(
                ball["center"], ball["radius"], _resolve_oneform(ball["oneform"], dim)
            )
            for ball in payload["balls"]
        ]
    raise UsageError(f"unknown one-form {spec!r}")


def _load_rough(path, p=None) -> RoughPath:
    loaded = pathio.detect_and_load(path)
    if isinstance(loaded, RoughPath):
        return loaded
    raise ValueError(f"{path}: expected a rough-path JSON document")


def _maybe_plot_trace(args, traces: dict, title: str) -> None:
    if getattr(args, "plot", None):
        from . import plotting

        plotting.save_trace_plot(traces, args.plot, title=title)


def _maybe_plot_series(args, series: dict, title: str) -> None:
    if getattr(args, "plot", None):
        from . import plotting

        plotting.save_convergence_plot(series, args.plot, title=title)


def build_parser() -> _Parser:
    parser = _Parser(prog="roughpaths", description=__doc__)
    parser.add_argument("--config", help="JSON file with tolerance settings")
    parser.add_argument("--seed", type=int, default=0, help="seed for the suite corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sig = sub.add_parser("sig", help="truncated signature of a CSV path")
    p_sig.add_argument("path")
    p_sig.add_argument("--level", type=int, required=True)
    p_sig.add_argument("--from", dest="window_from", type=float)
    p_sig.add_argument("--to", dest="window_to", type=float)
    p_sig.add_argument("--out")
    p_sig.add_argument("--plot")

    p_pvar = sub.add_parser("pvar", help="grid p-variation of a CSV path")
    p_pvar.add_argument("path")
    p_pvar.add_argument("-p", type=float, required=True, dest="p")
    p_pvar.add_argument("--from", dest="window_from", type=float)
    p_pvar.add_argument("--to", dest="window_to", type=float)
    p_pvar.add_argument("--out")
    p_pvar.add_argument("--plot")

    p_dist = sub.add_parser("dist", help="p-variation distances of two rough paths")
    p_dist.add_argument("a")
    p_dist.add_argument("b")
    p_dist.add_argument("-p", type=float, required=True, dest="p")
    p_dist.add_argument("--out")

    p_ext = sub.add_parser("extend", help="extend a rough path to a higher degree")
    p_ext.add_argument("path")
    p_ext.add_argument("-n", type=int, required=True, dest="degree")
    p_ext.add_argument("--tol", type=float)
    p_ext.add_argument("--out")
    p_ext.add_argument("--plot")

    p_int = sub.add_parser("integrate", help="integrate a one-form along a rough path")
    p_int.add_argument("path", help="rough-path JSON, or CSV to lift at --p")
    p_int.add_argument("--oneform", required=True)
    p_int.add_argument("--p", type=float, required=True, dest="p")
    p_int.add_argument("--tol", type=float)
    p_int.add_argument("--out")
    p_int.add_argument("--plot")

    p_lift = sub.add_parser("lift", help="lift a manifold CSV path chart-wise")
    p_lift.add_argument("path")
    p_lift.add_argument("--atlas", required=True)
    p_lift.add_argument("--p", type=float, required=True, dest="p")
    p_lift.add_argument("--margin", type=float)
    p_lift.add_argument("--out")
    p_lift.add_argument("--plot")

    p_check = sub.add_parser("check", help="consistency report for a local rough path")
    p_check.add_argument("path")
    p_check.add_argument("--atlas", required=True)
    p_check.add_argument("--tol", type=float, default=1e-6)
    p_check.add_argument("--out")

    p_suite = sub.add_parser("suite", help="run the acceptance battery")
    p_suite.add_argument("--out", help="write the JSON report here")
    p_suite.add_argument(
        "--report-dir",
        help="directory for the CSV report and the rendered SVG figures",
    )
    p_suite.add_argument(
        "--only",
        help="comma-separated criterion numbers to run (default: all)",
    )
    return parser


def _cmd_sig(args, cfg: Config) -> int:
    x = pathio.read_path_csv(args.path)
    tensor = signature(x, args.level, _window(args), degree_cap=cfg.tensor_degree_max)
    _emit(tensor.to_dict(), args.out)
    _maybe_plot_trace(args, {"path": x}, f"trace of {Path(args.path).name}")
    return 0


def _cmd_pvar(args, cfg: Config) -> int:
    x = pathio.read_path_csv(args.path)
    value = p_variation(x, args.p, _window(args))
    _emit({"p": args.p, "p_variation": value}, args.out)
    _maybe_plot_trace(args, {"path": x}, f"trace of {Path(args.path).name}")
    return 0


def _cmd_dist(args, cfg: Config) -> int:
    A = pathio.detect_and_load(args.a)
    B = pathio.detect_and_load(args.b)
    if isinstance(A, RoughPath) and isinstance(B, RoughPath):
        payload = {
            "p": args.p,
            "dp_metric": dp_metric(A.functional, B.functional, args.p),
            "product_metric": dp_product_metric(A, B),
        }
    else:
        payload = {"p": args.p, "dp_metric": dp_metric(A, B, args.p)}
    _emit(payload, args.out)
    return 0


def _cmd_extend(args, cfg: Config) -> int:
    rough = _load_rough(args.path)
    tol = args.tol if args.tol is not None else cfg.tol_sew
    functional, info = extend(
        rough, args.degree, tol=tol, max_depth=cfg.max_depth, with_info=True
    )
    payload = {
        "p": rough.p,
        "start": rough.start.tolist(),
        "times": functional.times.tolist(),
        "cells": [c.to_dict() for c in functional.cells],
        "achieved_delta": info.delta,
        "depth": info.depth,
    }
    _emit(payload, args.out)
    _maybe_plot_series(
        args,
        {"raw deltas": info.raw_deltas, "accelerated deltas": info.accelerated_deltas},
        "extension refinement",
    )
    return 0


def _cmd_integrate(args, cfg: Config) -> int:
    tol = args.tol if args.tol is not None else cfg.tol_sew
    if args.path.endswith(".csv"):
        rough = from_bv_path(pathio.read_path_csv(args.path), args.p)
    else:
        rough = _load_rough(args.path)
        if abs(rough.p - args.p) > 1e-12:
            raise ValueError(f"rough path has p={rough.p}, requested {args.p}")
    form = _resolve_oneform(args.oneform, rough.functional.dim)
    if isinstance(form, list):
        result = integrate_local_oneform(form, rough, tol=tol, max_depth=cfg.max_depth)
        info = None
    else:
        result, info = integrate(
            form, rough, tol=tol, max_depth=cfg.max_depth, with_info=True
        )
    payload = result.to_dict()
    if info is not None:
        payload["achieved_delta"] = info.delta
    _emit(payload, args.out)
    _maybe_plot_trace(
        args,
        {"input": rough.trace, "integral": result.trace},
        f"integral of {args.oneform}",
    )
    return 0


def _cmd_lift(args, cfg: Config) -> int:
    x = pathio.read_path_csv(args.path)
    atlas = build_atlas(args.atlas, dim=x.dim)
    local = lift_path(x, atlas, args.p, margin=args.margin)
    _emit(local.to_dict(), args.out)
    _maybe_plot_trace(
        args,
        {item.chart_id + f"@{i}": item.path for i, item in enumerate(local.items)},
        f"chart traces ({args.atlas})",
    )
    return 0


def _cmd_check(args, cfg: Config) -> int:
    local = pathio.detect_and_load(args.path)
    atlas = build_atlas(args.atlas)
    report = consistency_check(
        local, atlas, tol=args.tol, sew_tol=cfg.tol_sew, max_depth=cfg.max_depth
    )
    _emit(report.to_dict(), args.out)
    return 0 if report.ok else 1


def _cmd_suite(args, cfg: Config) -> int:
    indices = None
    if args.only:
        indices = {int(tok) for tok in args.only.split(",")}
    results = acceptance.run_all(seed=args.seed, indices=indices)
    for result in results:
        print(result.line())
    passed = all(r.passed for r in results)
    print(f"{'all criteria passed' if passed else 'FAILURES present'} "
          f"({sum(r.passed for r in results)}/{len(results)})")
    if args.out:
        pathio.dump_json([r.to_dict() for r in results], args.out)
    if args.report_dir:
        _write_suite_report(results, Path(args.report_dir))
    return 0 if passed else 1


def _write_suite_report(results, report_dir: Path) -> None:
    from . import plotting

    report_dir.mkdir(parents=True, exist_ok=True)
    rows = ["index,name,passed,measured,tolerance"]
    for r in results:
        rows.append(f"{r.index},{r.name},{int(r.passed)},{r.measured:.12e},{r.tolerance:.3e}")
    (report_dir / "report.csv").write_text("\n".join(rows) + "\n")
    plotting.save_suite_overview(results, report_dir / "suite_overview.svg")
    for r in results:
        if r.series:
            plotting.save_convergence_plot(
                r.series,
                report_dir / f"criterion_{r.index:02d}.svg",
                title=r.name,
            )
        if r.trace is not None:
            plotting.save_trace_plot(
                {"trace": r.trace},
                report_dir / f"criterion_{r.index:02d}_trace.svg",
                title=r.name,
            )


_COMMANDS = {
    "sig": _cmd_sig,
    "pvar": _cmd_pvar,
    "dist": _cmd_dist,
    "extend": _cmd_extend,
    "integrate": _cmd_integrate,
    "lift": _cmd_lift,
    "check": _cmd_check,
    "suite": _cmd_suite,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = Config.load(args.config) if args.config else Config()
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NonConvergenceError as exc:
        print(
            f"non-convergence: {exc} (delta={exc.delta}, depth={exc.depth})",
            file=sys.stderr,
        )
        return 3
    except (CoverageGapError, DomainExitError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError, json.JSONDecodeError, RoughPathsError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
