"""Batch command-line interface.

One process, one command, deterministic artifacts.  Exit codes: 0 on
success or a passing verification, 1 on a verification failure (the
report is still written), 2 on usage or input errors.  Set
ECONVEX_THREADS to cap suite parallelism.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .funcmodel import AnyFunction, ClosedFormFunction, Grid, SampledFunction, make_uniform_grid, sample
from .errorfn import ErrorFunction
from .transform import (
    default_dual_grid,
    e_biconjugate,
    e_conjugate_brute,
    e_conjugate_fast,
    inf_convolution,
)
from .subdiff import e_subdiff_interval
from .verify import INEQ_TOL, certify_global_min, certify_local_min, check_conjugate_stability, check_e_convex_def
from .suite import run_suite
from . import specio

__all__ = ["main", "run"]


def _parse_grid(descriptor: str) -> Grid:
    try:
        a, b, n = descriptor.split(",")
        return make_uniform_grid(float(a), float(b), int(n))
    except ValueError as err:
        raise ValueError(f"malformed grid descriptor {descriptor!r} (want a,b,n): {err}") from err


def _load_function(path: str, grid: Optional[Grid]) -> SampledFunction:
    f = specio.function_from_spec(path)
    if isinstance(f, ClosedFormFunction):
        if grid is None:
            raise ValueError("a --grid is required to sample a closed-form spec")
        return sample(f, grid)
    return f


def _emit(payload: dict, args, default_stdout: bool = True) -> None:
    text = json.dumps(payload, indent=2)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    elif default_stdout:
        print(text)


def _cmd_conjugate(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    e = specio.error_from_spec(args.e, grid=f.grid)
    dual = _parse_grid(args.dual) if args.dual else default_dual_grid(f, e, args.y)
    conj = e_conjugate_fast if args.algo == "fast" else e_conjugate_brute
    table = conj(f, e, args.y, dual)
    if args.format == "csv":
        if args.out:
            specio.write_table_csv(table, args.out)
        else:
            print("slope,value")
            for s, v in zip(table.dual_grid.points, table.values):
                print(f"{s!r},{v!r}")
    else:
        _emit(specio.table_to_json(table), args)
    return 0


def _cmd_biconjugate(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    e = specio.error_from_spec(args.e, grid=f.grid)
    dual = _parse_grid(args.dual) if args.dual else default_dual_grid(f, e, args.y)
    out_grid = _parse_grid(args.out_grid) if args.out_grid else f.grid
    bic = e_biconjugate(f, e, args.y, dual, out_grid, algorithm=args.algo)
    if args.format == "csv":
        if args.out:
            specio.write_sampled_csv(bic, args.out)
        else:
            print("x,value")
            for x, v in zip(bic.grid.points, bic.values):
                print(f"{x!r},{v!r}")
    else:
        _emit(specio.function_to_spec(bic), args)
    return 0


def _cmd_subdiff(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    e = specio.error_from_spec(args.e, grid=f.grid)
    interval = e_subdiff_interval(f, e, args.at)
    _emit(interval.to_dict(), args)
    return 0


def _cmd_certify(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    e = specio.error_from_spec(args.e, grid=f.grid)
    if args.kind == "global":
        cert = certify_global_min(f, e, args.at)
    else:
        cert = certify_local_min(f, e, args.at, window=args.window)
    payload = {
        "kind": args.kind,
        "at": args.at,
        "certified": bool(cert),
        "is_grid_argmin" if args.kind == "global" else "is_window_min": cert.is_grid_argmin,
        "interval": cert.interval.to_dict(),
    }
    if cert.window is not None:
        payload["window"] = cert.window
    _emit(payload, args)
    return 0 if cert else 1


def _cmd_check_econvex(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    fspec = specio.function_from_spec(args.f)
    if args.t_mode == "t_set":
        if not isinstance(fspec, ClosedFormFunction):
            raise ValueError("t_set mode requires a closed-form function spec")
        f: AnyFunction = fspec
        e = specio.error_from_spec(args.e, grid=grid)
        rep = check_e_convex_def(f, e, grid=grid, t_mode="t_set", seed=args.seed)
    else:
        f = _load_function(args.f, grid)
        e = specio.error_from_spec(args.e, grid=f.grid)
        rep = check_e_convex_def(f, e, seed=args.seed)
    payload = rep.to_dict()
    payload["seed"] = args.seed
    _emit(payload, args)
    return 0 if rep.max_violation <= INEQ_TOL else 1


def _cmd_infconv(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    g = _load_function(args.g, grid)
    out_grid = _parse_grid(args.out_grid) if args.out_grid else f.grid
    result = inf_convolution(f, g, out_grid)
    if args.format == "csv":
        if args.out:
            specio.write_sampled_csv(result, args.out)
        else:
            print("x,value")
            for x, v in zip(result.grid.points, result.values):
                print(f"{x!r},{v!r}")
    else:
        _emit(specio.function_to_spec(result), args)
    return 0


def _cmd_stability(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    f = _load_function(args.f, grid)
    e = specio.error_from_spec(args.e, grid=f.grid)
    dual = _parse_grid(args.dual) if args.dual else None
    rep = check_conjugate_stability(f, e, args.y1, args.y2, dual_grid=dual)
    payload = {
        "triangle": None if rep.triangle is None else rep.triangle.to_dict(),
        "bounded": None if rep.bounded is None else rep.bounded.to_dict(),
        "ok": rep.ok,
    }
    _emit(payload, args)
    return 0 if rep.ok else 1


def _cmd_suite(args) -> int:
    report = run_suite(seed=args.seed, threads=args.threads)
    if args.json:
        payload = {"seed": report.seed, "records": report.to_list()}
        text = json.dumps(payload, indent=2)
        if args.out:
            Path(args.out).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
    else:
        print(report.render_table())
        if args.out:
            Path(args.out).write_text(
                json.dumps({"seed": report.seed, "records": report.to_list()}, indent=2) + "\n",
                encoding="utf-8",
            )
    return 0 if report.all_passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="econvex", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp, with_e=True):
        sp.add_argument("--f", required=True, help="function spec file (JSON)")
        if with_e:
            sp.add_argument("--e", required=True, help="kernel spec file (JSON)")
        sp.add_argument("--grid", help="uniform grid descriptor a,b,n")
        sp.add_argument("--out", help="output file path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("conjugate", help="anchored conjugate table")
    add_common(sp)
    sp.add_argument("--y", type=float, required=True, help="anchor point")
    sp.add_argument("--dual", help="dual grid descriptor a,b,n")
    sp.add_argument("--algo", choices=("brute", "fast"), default="fast")
    sp.set_defaults(fn=_cmd_conjugate)

    sp = sub.add_parser("biconjugate", help="anchored biconjugate on a grid")
    add_common(sp)
    sp.add_argument("--y", type=float, required=True)
    sp.add_argument("--dual", help="dual grid descriptor a,b,n")
    sp.add_argument("--out-grid", help="evaluation grid descriptor a,b,n")
    sp.add_argument("--algo", choices=("brute", "fast"), default="fast")
    sp.set_defaults(fn=_cmd_biconjugate)

    sp = sub.add_parser("subdiff", help="budgeted subdifferential interval")
    add_common(sp)
    sp.add_argument("--at", type=float, required=True, help="grid node to query")
    sp.set_defaults(fn=_cmd_subdiff)

    sp = sub.add_parser("certify", help="minimum certificates")
    add_common(sp)
    sp.add_argument("--at", type=float, required=True)
    sp.add_argument("--kind", choices=("global", "local"), default="global")
    sp.add_argument("--window", type=int, default=5)
    sp.set_defaults(fn=_cmd_certify)

    sp = sub.add_parser("check-econvex", help="budgeted convexity check")
    add_common(sp)
    sp.add_argument("--t-mode", choices=("all_node_triples", "t_set"), default="all_node_triples")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=_cmd_check_econvex)

    sp = sub.add_parser("infconv", help="infimal convolution of two functions")
    add_common(sp, with_e=False)
    sp.add_argument("--g", required=True, help="second function spec file (JSON)")
    sp.add_argument("--out-grid", help="output grid descriptor a,b,n")
    sp.set_defaults(fn=_cmd_infconv)

    sp = sub.add_parser("stability", help="anchor-stability bounds on the transform")
    add_common(sp)
    sp.add_argument("--y1", type=float, required=True)
    sp.add_argument("--y2", type=float, required=True)
    sp.add_argument("--dual", help="dual grid descriptor a,b,n")
    sp.set_defaults(fn=_cmd_stability)

    sp = sub.add_parser("suite", help="run the full proposition suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--json", action="store_true", help="emit the JSON report to stdout")
    sp.add_argument("--out", help="also write the JSON report here")
    sp.add_argument("--threads", type=int, default=None)
    sp.set_defaults(fn=_cmd_suite)
    return p


_DESCRIPTOR_FLAGS = {"--grid", "--dual", "--out-grid"}


def _fold_descriptors(argv):
    """Join grid descriptors onto their flags so "-2,2,401" is not read as an option."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _DESCRIPTOR_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = parser.parse_args(_fold_descriptors(argv))
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
