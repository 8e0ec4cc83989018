"""Command line interface.

Exit codes: 0 completed, 1 usage or input error, 2 an exactly-checked
inequality or identity failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .. import analytic
from ..core import (
    BFN1_MAGIC,
    Coalition,
    InvariantViolation,
    from_bfn1,
    save_bfn1,
)
from ..generators import (
    cnf_to_function,
    dual_tribes,
    from_dimacs,
    hamming_ball,
    random_kcnf,
    theorem1_params,
    theorem2_params,
    to_dimacs,
    tribes,
    tribes_k_for_target,
)
from ..influence import (
    greedy_coalition,
    kkl_reference,
    max_coalition,
    report,
    sampled_coalition,
)
from ..trace import find_shattered, loads_family, max_trace_size
from .config import KEYS, ExperimentConfig, coerce, load_config
from .experiments import run_experiment
from .report import dumps, write_report, write_rows_csv

OBJECTIVE_NAMES = {"jplus": "j_plus", "jminus": "j_minus", "itotal": "i_total"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_function(path):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == BFN1_MAGIC:
        return from_bfn1(data)
    return cnf_to_function(from_dimacs(data.decode()))


def _parse_coalition(text: str, n: int) -> Coalition:
    text = text.strip()
    if not text:
        return Coalition.empty(n)
    return Coalition.of(n, [int(tok) - 1 for tok in text.split(",")])


def _jsonable(value):
    if isinstance(value, Fraction):
        return {"exact": f"{value.numerator}/{value.denominator}", "float": float(value)}
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


def cmd_gen(args):
    if args.type == "kcnf":
        F = random_kcnf(args.n, args.k, args.m, args.seed)
        text = to_dimacs(F)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.type == "tribes":
        f = tribes(args.m, args.k)
    elif args.type == "dual-tribes":
        f = dual_tribes(args.m, args.k)
    else:
        f = hamming_ball(args.n, args.r)
    if not args.out:
        raise UsageError("--out is required for truth-table output")
    save_bfn1(f, args.out)
    print(json.dumps({"n": f.n, "weight": f.weight, "out": args.out}))
    return 0


def cmd_influence(args):
    f = _load_function(args.fn)
    S = _parse_coalition(args.coalition, f.n)
    print(json.dumps({"coalition": [i + 1 for i in S.indices()], **report(f, S).to_dict()},
                     indent=2, sort_keys=True))
    return 0


def cmd_search(args):
    f = _load_function(args.fn)
    objective = OBJECTIVE_NAMES[args.objective]
    if args.mode == "exhaustive":
        out = max_coalition(f, args.size, objective, budget=args.budget,
                            workers=args.workers).to_dict()
    elif args.mode == "sample":
        out = sampled_coalition(f, args.size, objective, args.samples, args.seed).to_dict()
    else:
        direction = "toward-0" if objective == "j_minus" else "toward-1"
        S, trajectory = greedy_coalition(f, args.size, direction)
        out = {"best_set": [i + 1 for i in S.indices()], "mode": "greedy",
               "direction": direction, "trajectory": [x.to_dict() for x in trajectory]}
    print(json.dumps(out, indent=2, sort_keys=True))
    return 0


def cmd_trace(args):
    with open(args.family) as fh:
        F = loads_family(fh.read())
    if args.find_shattered:
        Y = find_shattered(F, args.r)
        out = {"r": args.r, "size": len(F),
               "shattered": None if Y is None else [i + 1 for i in Y.indices()]}
    else:
        Y, size = max_trace_size(F, args.r)
        out = {"r": args.r, "size": len(F), "best_set": [i + 1 for i in Y.indices()],
               "trace_size": size}
    print(json.dumps(out, sort_keys=True))
    return 0


ANALYTIC = {
    "miss_probability": (analytic.miss_probability, {"n": int, "s": int, "k": int}),
    "expected_mu": (analytic.expected_mu, {"k": int, "m": int}),
    "pair_sat_probability": (analytic.pair_sat_probability, {"n": int, "k": int, "d": int}),
    "second_moment_ratio": (analytic.second_moment_ratio, {"n": int, "k": int, "m": int}),
    "t_operator_subcube": (analytic.t_operator_subcube, {"n": int, "k": int, "c": int}),
    "t_operator_ratio": (analytic.t_operator_ratio, {"n": int, "k": int, "c": int}),
    "binomial_tail": (analytic.binomial_tail, {"n": int, "r": int}),
    "ball_hit_ratio": (analytic.ball_hit_ratio, {"n": int, "k": int, "r": int}),
    "chernoff_bound": (analytic.chernoff_bound, {"m": int, "p": float, "zeta": float}),
    "isoperimetric_bound": (analytic.isoperimetric_bound, {"t": float}),
    "kkl_reference": (kkl_reference, {"t": float, "n": int, "c": float}),
    "theorem1_params": (theorem1_params, {"n": int, "alpha": float, "delta": float}),
    "theorem2_params": (theorem2_params, {"nu": int, "delta": float}),
    "tribes_k_for_target": (tribes_k_for_target, {"n": int, "t": float}),
}


def cmd_analytic(args):
    fn, schema = ANALYTIC[args.quantity]
    kwargs = {}
    for item in args.params:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        key, value = item.split("=", 1)
        if key not in schema:
            raise UsageError(f"{args.quantity} takes {sorted(schema)}, not {key!r}")
        kwargs[key] = schema[key](value)
    missing = sorted(set(schema) - set(kwargs))
    if missing:
        raise UsageError(f"{args.quantity} needs {missing}")
    print(json.dumps({"quantity": args.quantity, "params": kwargs,
                      "value": _jsonable(fn(**kwargs))}, sort_keys=True))
    return 0


def cmd_experiment(args):
    if args.config:
        config = load_config(args.config)
    elif args.experiment:
        config = ExperimentConfig(args.experiment)
    else:
        raise UsageError("experiment needs --config or --experiment")
    if args.experiment:
        config.experiment = args.experiment
    for key in KEYS:
        value = getattr(args, key)
        if value is not None:
            config.params[key] = coerce(key, value)
    if args.out:
        config.out = args.out
    if args.csv:
        config.csv = args.csv
    result = run_experiment(config)
    text = dumps(result)
    if config.out:
        write_report(result, config.out)
    else:
        sys.stdout.write(text)
    if config.csv:
        write_rows_csv(result["rows"], config.csv)
    return 2 if result["summary"].get("violations", 0) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="boolinf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a function or formula")
    p.add_argument("--type", required=True, choices=["kcnf", "tribes", "dual-tribes", "ball"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("influence", help="influence report of one coalition")
    p.add_argument("--fn", required=True, help="BFN1 or DIMACS file")
    p.add_argument("--coalition", default="", help="comma list of 1-based indices")
    p.set_defaults(func=cmd_influence)

    p = sub.add_parser("search", help="coalition search")
    p.add_argument("--fn", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--objective", choices=sorted(OBJECTIVE_NAMES), default="jplus")
    p.add_argument("--mode", choices=["exhaustive", "greedy", "sample"], default="exhaustive")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("trace", help="trace and shattering queries")
    p.add_argument("--family", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--find-shattered", action="store_true")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("analytic", help="closed-form reference quantities")
    p.add_argument("--quantity", required=True, choices=sorted(ANALYTIC))
    p.add_argument("--params", nargs="*", default=[], metavar="KEY=VALUE")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("experiment", help="run an experiment from a key=value config")
    p.add_argument("--config")
    p.add_argument("--experiment")
    for key in KEYS:
        p.add_argument("--" + key.replace("_", "-"), dest=key)
    p.add_argument("--out")
    p.add_argument("--csv")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
