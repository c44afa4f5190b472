"""Command line: ``basewalk generate|solve|bench|accept``."""
from __future__ import annotations

import argparse
import csv
import json
import sys

from .errors import BasewalkError, ConfigError
from .fractional import constraint_log_rows
from .generators import FAMILIES, generate
from .instance import load_instance, save_instance, save_solution, validate_solution
from .solvers import ALGORITHMS, RoundingParams, solve


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="basewalk", description="Multistage matroid maintenance tools")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated instance as JSON")
    g.add_argument("family", choices=FAMILIES)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--set", dest="params", type=_param, action="append", default=[],
                   metavar="KEY=VALUE", help="generator parameter (value parsed as JSON when possible)")
    g.add_argument("-o", "--out", help="output path (default stdout)")

    s = sub.add_parser("solve", help="solve an instance file")
    s.add_argument("instance")
    s.add_argument("--alg", choices=ALGORITHMS, default="greedy")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--L", type=float, default=0.0, help="threshold scale (default 32 ln(rT))")
    s.add_argument("--policy", choices=("fixed", "rerandomize"), default="fixed")
    s.add_argument("-o", "--out", help="write the solution JSON here")
    s.add_argument("--log-constraints", metavar="CSV",
                   help="dump emitted covering constraints (online and epoch only)")

    b = sub.add_parser("bench", help="run an experiment config")
    b.add_argument("config")
    b.add_argument("-o", "--out", help="CSV path (default stdout)")

    a = sub.add_parser("accept", help="run the acceptance criteria")
    a.add_argument("--bound-scale", type=float, default=1.0,
                   help="multiply the greedy bound (values < 1 tighten it)")
    return p


def _generate(args) -> int:
    inst = generate(args.family, args.seed, **dict(args.params))
    if args.out:
        save_instance(inst, args.out)
    else:
        json.dump(inst.to_dict(), sys.stdout, indent=1)
        sys.stdout.write("\n")
    return 0


def _solve(args) -> int:
    inst = load_instance(args.instance)
    params = RoundingParams(L=args.L, seed=args.seed, policy=args.policy)
    res = solve(inst, args.alg, seed=args.seed, params=params)
    report = validate_solution(inst, res.solution)
    if not report.ok:
        raise BasewalkError(f"solver produced an invalid solution: {report.failures}")
    summary = {"algorithm": args.alg, "holding": report.cost.holding,
               "acquisition": report.cost.acquisition, "total": report.cost.total}
    if args.out:
        save_solution(res.solution, args.out, {"cost": summary})
    if args.log_constraints:
        if res.trace is None:
            raise ConfigError(f"--log-constraints needs --alg online or epoch, not {args.alg}")
        with open(args.log_constraints, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=["timestep", "size", "rhs", "x_before", "x_after"])
            w.writeheader()
            w.writerows(constraint_log_rows(res.trace))
    print(f"{args.alg}: total {summary['total']} (holding {summary['holding']}, "
          f"acquisition {summary['acquisition']})")
    if not args.out:
        json.dump(res.solution.to_dict(), sys.stdout)
        sys.stdout.write("\n")
    return 0


def _bench(args) -> int:
    from .harness import run_experiment
    report = run_experiment(args.config)
    text = report.to_csv()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(report.summary(), file=sys.stderr if not args.out else sys.stdout)
    return 0


def _accept(args) -> int:
    from .acceptance import acceptance_suite
    results = acceptance_suite(args.bound_scale, echo=print)
    hard_fail = sum(1 for r in results if not r.passed and r.hard)
    warn = sum(1 for r in results if not r.passed and not r.hard)
    print(f"{len(results) - hard_fail - warn} passed, {hard_fail} failed, {warn} warnings")
    return 1 if hard_fail else 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"generate": _generate, "solve": _solve, "bench": _bench, "accept": _accept}
    try:
        return handler[args.command](args)
    except (BasewalkError, ValueError, OSError) as exc:
        print(f"basewalk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
