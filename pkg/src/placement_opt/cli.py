"""Command line front end: generate, solve, compare, estimate, verify.

Exit codes: 0 ok, 1 property violation under ``verify``, 2 bad input or
instance parse failure, 3 brute-force size guard exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .choice import MnlModel, check_weak_rationality
from .core import Instance, SizeGuardError, substream
from .estimation import EstimationPlan, estimate_w
from .instances import (
    from_json,
    gen_coverage_mmnl,
    gen_first_slot_only,
    gen_heavy_tail_line,
    gen_random,
    gen_uniform_line,
    to_json,
)
from .oracle import BruteForceOracle, GreedyUniformOracle, MnlExactOracle, exact_oracle
from .solvers import (
    SolveReport,
    WEvaluator,
    best_of_many_line,
    brute_force_placement,
    check_pair_objective_properties,
    evaluate_exact,
    markov_deterministic_placement,
    randomized_placement,
    uniform_price_matroid_greedy,
)

DEFAULT_SEED = 20240901

ALGORITHMS = ("brute", "best-of-many", "randomized", "uniform-greedy", "markov-greedy")
ORACLES = ("auto", "brute", "mnl-exact", "greedy-uniform")


class InstanceParseError(ValueError):
    pass


def _load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as handle:
            return from_json(handle.read())
    except Exception as exc:
        raise InstanceParseError(f"cannot parse instance {path}: {exc}") from exc


def _make_oracle(name: str, instance: Instance):
    if name == "auto":
        return exact_oracle(instance)
    if name == "brute":
        return BruteForceOracle(instance)
    if name == "mnl-exact":
        return MnlExactOracle(instance)
    if name == "greedy-uniform":
        return GreedyUniformOracle(instance)
    raise ValueError(f"unknown oracle {name!r}")


def _run_algorithm(name: str, instance: Instance, args) -> SolveReport:
    seed = args.seed
    if name == "brute":
        return brute_force_placement(instance, seed=seed)
    oracle = _make_oracle(args.oracle, instance)
    if name == "best-of-many":
        return best_of_many_line(instance, oracle, seed=seed)
    if name == "randomized":
        plan = None
        if args.epsilon is not None and args.delta is not None:
            plan = EstimationPlan.for_instance(
                instance, args.epsilon, args.delta, args.samples_override
            )
        return randomized_placement(
            instance,
            oracle,
            repetitions=args.repetitions,
            seed=seed,
            rng=substream(seed, "placement"),
            plan=plan,
        )
    if name == "uniform-greedy":
        return uniform_price_matroid_greedy(instance, seed=seed)
    if name == "markov-greedy":
        return markov_deterministic_placement(instance, oracle, seed=seed)
    raise ValueError(f"unknown algorithm {name!r}")


def _write_output(payload: str, path: str | None):
    if path is None:
        print(payload)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")


# ---------------------------------------------------------------------------
# verbs


def cmd_gen(args) -> int:
    family = args.family
    if family == "first-slot-only":
        instance = gen_first_slot_only(args.k)
    elif family == "uniform-line":
        instance = gen_uniform_line(args.m)
    elif family == "heavy-tail-line":
        instance = gen_heavy_tail_line(args.m, args.epsilon)
    elif family == "coverage-mmnl":
        sets = json.loads(args.sets)
        instance = gen_coverage_mmnl(sets, args.universe, args.cardinality, args.epsilon)
    elif family == "random":
        instance = gen_random(
            args.n,
            args.m,
            model=args.model,
            price_range=(args.price_min, args.price_max),
            browsing=args.browsing,
            seed=args.seed,
        )
    else:
        raise ValueError(f"unknown family {family!r}")
    _write_output(to_json(instance), args.output)
    return 0


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    report = _run_algorithm(args.algorithm, instance, args)
    _write_output(json.dumps(report.to_dict()), args.output)
    return 0


def cmd_compare(args) -> int:
    instance = _load_instance(args.instance)
    names = sorted(set(args.algorithms.split(",")))
    for name in names:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}")
    workers = max(1, int(os.environ.get("PLACEMENT_OPT_THREADS", "1")))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            name: pool.submit(_run_algorithm, name, instance, args) for name in names
        }
        reports = {name: fut.result() for name, fut in futures.items()}

    opt = None
    if "brute" in reports:
        opt = reports["brute"].w
    elif instance.n**instance.m <= args.opt_guard:
        opt = brute_force_placement(instance).w

    best = max(report.w for report in reports.values())
    rows = []
    for name in names:  # already sorted; completion order is irrelevant
        w = reports[name].w
        rows.append(
            {
                "algorithm": name,
                "w": w,
                "ratio_to_best": w / best if best > 0 else 1.0,
                "ratio_to_opt": (w / opt if opt and opt > 0 else None),
                "report": reports[name].to_dict(),
            }
        )
    _write_output(json.dumps({"instance": args.instance, "results": rows}), args.output)
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["algorithm", "w", "ratio_to_best", "ratio_to_opt"])
            for row in rows:
                writer.writerow(
                    [row["algorithm"], row["w"], row["ratio_to_best"], row["ratio_to_opt"]]
                )
    return 0


def cmd_estimate(args) -> int:
    instance = _load_instance(args.instance)
    slots = tuple(int(s) for s in args.placement.split(","))
    plan = EstimationPlan.for_instance(
        instance, args.epsilon, args.delta, args.samples_override
    )
    value, samples = estimate_w(
        instance, slots, plan, substream(args.seed, "estimation")
    )
    _write_output(
        json.dumps(
            {
                "w_estimate": {
                    "value": value,
                    "epsilon": plan.epsilon,
                    "delta": plan.delta,
                    "samples": samples,
                },
                "seed": args.seed,
            }
        ),
        args.output,
    )
    return 0


def cmd_verify(args) -> int:
    instance = _load_instance(args.instance)
    failures: list[str] = []

    if instance.n <= 6:
        violations = check_weak_rationality(instance.choice_model, instance.n)
    else:
        violations = check_weak_rationality(
            instance.choice_model, instance.n, trials=args.trials, seed=args.seed
        )
    if violations:
        failures.append(f"weak rationality: {len(violations)} violations")

    if np.ptp(instance.prices) == 0.0 and instance.n * instance.m <= 12:
        try:
            problems = check_pair_objective_properties(instance)
            if problems:
                failures.append(f"pair objective: {len(problems)} violations")
        except SizeGuardError:
            pass

    if instance.n**instance.m <= args.opt_guard:
        opt = brute_force_placement(instance).w
        slots = (instance.i_star,) * instance.m
        truth = evaluate_exact(instance, slots)
        plan = EstimationPlan.for_instance(instance, 0.2, 0.1)
        rng = substream(args.seed, "estimation")
        hits = sum(
            abs(estimate_w(instance, slots, plan, rng)[0] - truth) <= 0.2 * opt
            for _ in range(50)
        )
        if opt > 0 and hits < 40:  # plan guarantees >= 1 - 2*delta = 80%
            failures.append(f"estimator coverage: {hits}/50 within bound")
    else:
        print("note: instance too large for the brute-force coverage check")

    for line in failures:
        print(f"FAIL {line}")
    if not failures:
        print("OK all checks passed")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="placement-opt",
        description="Optimize product placement over display locations.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    gen = sub.add_parser("gen", help="generate an instance JSON")
    gen.add_argument(
        "--family",
        required=True,
        choices=[
            "first-slot-only",
            "uniform-line",
            "heavy-tail-line",
            "coverage-mmnl",
            "random",
        ],
    )
    gen.add_argument("--k", type=int, default=4)
    gen.add_argument("--m", type=int, default=4)
    gen.add_argument("--n", type=int, default=5)
    gen.add_argument("--epsilon", type=float, default=1.0)
    gen.add_argument("--sets", type=str, default="[[0]]", help="JSON list of sets")
    gen.add_argument("--universe", type=int, default=1)
    gen.add_argument("--cardinality", type=int, default=1)
    gen.add_argument("--model", choices=["mnl", "mmnl", "markov", "ranked"], default="mnl")
    gen.add_argument(
        "--browsing", choices=["line", "explicit", "singleton", "full"], default="line"
    )
    gen.add_argument("--price-min", type=float, default=1.0)
    gen.add_argument("--price-max", type=float, default=10.0)
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(func=cmd_gen)

    solve = sub.add_parser("solve", help="run one placement algorithm")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    solve.add_argument("--oracle", choices=ORACLES, default="auto")
    solve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    solve.add_argument("--repetitions", type=int, default=32)
    solve.add_argument("--epsilon", type=float, default=None)
    solve.add_argument("--delta", type=float, default=None)
    solve.add_argument("--samples-override", type=int, default=None)
    solve.add_argument("-o", "--output", default=None)
    solve.set_defaults(func=cmd_solve)

    compare = sub.add_parser("compare", help="run several algorithms and tabulate")
    compare.add_argument("--instance", required=True)
    compare.add_argument("--algorithms", required=True, help="comma separated names")
    compare.add_argument("--oracle", choices=ORACLES, default="auto")
    compare.add_argument("--seed", type=int, default=DEFAULT_SEED)
    compare.add_argument("--repetitions", type=int, default=32)
    compare.add_argument("--epsilon", type=float, default=None)
    compare.add_argument("--delta", type=float, default=None)
    compare.add_argument("--samples-override", type=int, default=None)
    compare.add_argument("--opt-guard", type=int, default=200_000)
    compare.add_argument("--csv", default=None)
    compare.add_argument("-o", "--output", default=None)
    compare.set_defaults(func=cmd_compare)

    estimate = sub.add_parser("estimate", help="Monte-Carlo estimate of a placement")
    estimate.add_argument("--instance", required=True)
    estimate.add_argument("--placement", required=True, help="comma separated ids")
    estimate.add_argument("--epsilon", type=float, default=0.1)
    estimate.add_argument("--delta", type=float, default=0.05)
    estimate.add_argument("--samples-override", type=int, default=None)
    estimate.add_argument("--seed", type=int, default=DEFAULT_SEED)
    estimate.add_argument("-o", "--output", default=None)
    estimate.set_defaults(func=cmd_estimate)

    verify = sub.add_parser("verify", help="run property checks on an instance")
    verify.add_argument("--instance", required=True)
    verify.add_argument("--trials", type=int, default=2000)
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.add_argument("--opt-guard", type=int, default=50_000)
    verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InstanceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
