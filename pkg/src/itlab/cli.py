"""Command-line entry point: generate, solve, verify, bounds, experiment.

Exit codes: 0 success, 1 solver failure or failed check (a report is
still written), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

log = logging.getLogger("itlab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default)


def _default(x):
    import numpy as np

    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    raise TypeError(f"not JSON serialisable: {type(x).__name__}")


def _emit(args, payload: dict, table: list[tuple[str, object]] | None = None) -> None:
    if args.quiet:
        return
    if args.json or table is None:
        print(_dump(payload))
    else:
        width = max(len(k) for k, _ in table)
        for k, v in table:
            print(f"{k:<{width}}  {v}")


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(_dump(payload) + "\n")


# -- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    from itlab.constructions.instances import assemble_upper_bound_instance, random_nkrs
    from itlab.core import save_instance

    seed = args.seed
    if args.kind == "upper-bound":
        G, record = assemble_upper_bound_instance(args.k, args.r, args.s, seed, eps=args.eps)
    else:
        if args.n is None:
            raise UsageError("--n is required for --kind random")
        G = random_nkrs(args.n, args.k, args.r, args.s, seed)
        record = {"n": args.n, "k": args.k, "r": args.r, "s": args.s, "seed": seed}
    record = {"kind": args.kind, **record, "num_parts": G.num_parts, "num_edges": G.num_edges}
    out = Path(args.out)
    save_instance(G, out)
    sidecar = out.with_suffix(".meta.json")
    _write_json(sidecar, record)
    _emit(args, {"instance": str(out), "meta": str(sidecar), **record},
          [("instance", out), ("parts", G.num_parts), ("edges", G.num_edges), ("seed", seed)])
    return EXIT_OK


# -- solve --------------------------------------------------------------------

def cmd_solve(args) -> int:
    from itlab.core import load_instance
    from itlab.solvers import solve

    G = load_instance(args.input)
    t0 = time.perf_counter()
    out = solve(G, args.solver, seed=args.seed, eps=args.eps, p=args.p, max_steps=args.max_steps,
                budget=args.budget, t=args.t)
    payload = out.to_dict() | {"solver": args.solver, "seed": args.seed,
                               "wall_ms": round((time.perf_counter() - t0) * 1e3, 3)}
    if args.out:
        _write_json(args.out, payload)
    if args.plot and out.trajectory:
        from itlab.plotting import plot_trajectory

        plot_trajectory(out.trajectory, args.plot)
    _emit(args, payload, [("status", out.status), ("transversal", out.transversal.to_json() if out.transversal else None),
                          ("steps", out.steps), ("resamples", out.resamples), ("wall_ms", payload["wall_ms"])])
    return EXIT_OK if out.status == "found" else EXIT_FAIL


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    from itlab.analysis.census import matching_census, sampled_common_neighbour_census
    from itlab.constructions.hosts import certify, norm_graph_host, projective_plane_host
    from itlab.core import Transversal, is_independent_transversal, load_instance

    checks: dict[str, object] = {}
    ok = True
    if args.host:
        if args.q is None:
            raise UsageError("--q is required with --host")
        if args.host == "projective":
            H, cert = projective_plane_host(args.q)
            r = 2
        else:
            H, cert = norm_graph_host(args.q, seed=args.seed)
            r = 3
        if args.samples:
            census = sampled_common_neighbour_census(H, r, args.samples, args.seed)
            recomputed = census.max_common
            checks["census"] = {"sampled": True, "samples": args.samples, "max_common": recomputed}
        else:
            recomputed = certify(H, r).max_common_neighbours
            checks["census"] = {"sampled": False, "max_common": recomputed}
            ok &= recomputed == cert.max_common_neighbours
        checks["certificate"] = cert.to_dict()
        checks["host"] = {"kind": args.host, "q": args.q, "n": H.n, "m": H.m}
    if args.input:
        G = load_instance(args.input)
        checks["instance"] = {"r": G.r, "parts": G.num_parts, "edges": G.num_edges,
                              "part_sizes": sorted(set(G.part_sizes.tolist()))}
        if args.census:
            mc = matching_census(G)
            checks["matching_census"] = {"max_edges": mc.max_edges, "min_edges": mc.min_edges,
                                         "all_matching": mc.all_matching, "num_sets": mc.num_sets}
            if args.s is not None:
                viol = mc.violations(args.s)
                checks["matching_census"]["violations"] = viol[:20]
                ok &= not viol
        if args.transversal:
            doc = json.loads(Path(args.transversal).read_text())
            verts = doc["transversal"] if isinstance(doc, dict) else doc
            if verts is None:
                raise UsageError("transversal file holds no transversal")
            valid = is_independent_transversal(G, Transversal.from_sequence(verts))
            checks["transversal_valid"] = valid
            ok &= valid
    if not checks:
        raise UsageError("nothing to verify: pass --in and/or --host")
    checks["ok"] = bool(ok)
    _emit(args, checks)
    return EXIT_OK if ok else EXIT_FAIL


# -- bounds -------------------------------------------------------------------

def cmd_bounds(args) -> int:
    from itlab.analysis.bounds import bound_report
    from itlab.core import load_instance

    G = load_instance(args.input) if args.input else None
    rep = bound_report(args.k, args.r, args.s, G)
    d = rep.to_dict()
    _emit(args, d)
    return EXIT_OK


# -- experiment ---------------------------------------------------------------

def cmd_experiment(args) -> int:
    from itlab.analysis.experiment import parse_sweep, run_experiment
    from itlab.solvers import SOLVERS

    try:
        ns = parse_sweep(args.sweep)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    solvers = tuple(x for s in args.solver for x in s.split(","))
    for s in solvers:
        if s not in SOLVERS or s == "ktfree":
            raise UsageError(f"unsupported experiment solver {s!r}")
    rep = run_experiment(ns, args.k, args.trials, solvers, r=args.r, s=args.s, seed=args.seed, eps=args.eps,
                         verify_failures=not args.no_verify)
    payload = rep.to_dict(timing=not args.no_timing)
    if args.out:
        _write_json(args.out, payload)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    if args.plot:
        from itlab.plotting import plot_success_curve

        plot_success_curve(rep, args.plot)
    if args.json or args.quiet:
        _emit(args, payload)
    else:
        print(rep.to_csv(), end="")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    # SUPPRESS keeps a flag given before the subcommand from being reset by the subparser
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (64-bit, default 0)")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="JSON instead of a table")
    p.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS, help="no stdout")
    p.add_argument("--config", default=argparse.SUPPRESS, help="JSON file of default option values")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="itlab", parents=[common],
                                     description="Independent transversals in partitioned (hyper)graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write an instance file")
    g.add_argument("--kind", choices=["upper-bound", "random"], default="random")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int, default=2)
    g.add_argument("--s", type=int, default=1)
    g.add_argument("--eps", type=float, default=None, help="random-host slack (upper-bound kind)")
    g.add_argument("--out", help="instance path (.json for JSON, else text)")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="find an independent transversal")
    s.add_argument("--solver", choices=["exact", "greedy", "lll", "nibble", "ktfree"], default="nibble")
    s.add_argument("--in", dest="input")
    s.add_argument("--out", help="write the JSON report here")
    s.add_argument("--eps", type=float, default=0.1)
    s.add_argument("--p", type=float, default=None, help="nibble activation probability")
    s.add_argument("--max-steps", type=int, default=10_000)
    s.add_argument("--budget", type=int, default=None, help="exact nodes / lll rounds")
    s.add_argument("--t", type=int, default=2, help="clique order bound for ktfree")
    s.add_argument("--plot", help="PNG of the nibble trajectory")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="check certificates, censuses, transversals")
    v.add_argument("--in", dest="input")
    v.add_argument("--transversal", help="JSON list of vertices, or a solve report")
    v.add_argument("--census", action="store_true", help="matching census of the instance")
    v.add_argument("--s", type=int, default=None, help="required edges per r-set for --census")
    v.add_argument("--host", choices=["projective", "norm"])
    v.add_argument("--q", type=int)
    v.add_argument("--samples", type=int, default=0, help="sampled census instead of exhaustive")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bounds", parents=[common], help="closed-form bounds on f(k,r,s)")
    b.add_argument("--k", type=int)
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--s", type=int, default=1)
    b.add_argument("--in", dest="input", help="also check the LLL condition on this instance")
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("experiment", parents=[common], help="success probability sweep over n")
    e.add_argument("--k", type=int)
    e.add_argument("--r", type=int, default=2)
    e.add_argument("--s", type=int, default=1)
    e.add_argument("--trials", type=int, default=20)
    e.add_argument("--sweep", help="n=a..b[:step] or n=a,b,c")
    e.add_argument("--solver", action="append", default=None, help="repeatable or comma separated")
    e.add_argument("--eps", type=float, default=0.1)
    e.add_argument("--out", help="JSON report path")
    e.add_argument("--csv", help="CSV of success rate and first moment per n")
    e.add_argument("--plot", help="PNG of the success curve")
    e.add_argument("--no-verify", action="store_true", help="skip exact checks of failures")
    e.add_argument("--no-timing", action="store_true", help="drop wall-clock fields from the JSON")
    e.set_defaults(func=cmd_experiment)
    parser.subcommands = {"generate": g, "solve": s, "verify": v, "bounds": b, "experiment": e}
    return parser


FLAG = {"input": "--in"}
REQUIRED = {
    "generate": ("k", "out"),
    "solve": ("input",),
    "verify": (),
    "bounds": ("k",),
    "experiment": ("k", "sweep"),
}


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse argv; values from --config become defaults of the chosen subcommand."""
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if path:
        try:
            conf = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(conf, dict):
            raise UsageError("config must be a JSON object")
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        if "in" in conf:
            conf["input"] = conf.pop("in")
        parser.subcommands[args.command].set_defaults(**conf)
        args = parser.parse_args(argv)
    missing = [FLAG.get(name, f"--{name}") for name in REQUIRED[args.command] if getattr(args, name, None) is None]
    if missing:
        parser.subcommands[args.command].print_usage(sys.stderr)
        raise UsageError(f"{args.command}: missing required option(s) {', '.join(missing)}")
    for name, default in (("seed", 0), ("json", False), ("quiet", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    if args.command == "experiment" and args.solver is None:
        args.solver = ["nibble"]
    return args


def main(argv: list[str] | None = None) -> int:
    from itlab.core import InstanceError
    from itlab.constructions.instances import ConstructionNotImplemented

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"itlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, InstanceError, ConstructionNotImplemented, OSError, ValueError) as exc:
        print(f"itlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
