"""Command-line front end: ``refinekit check`` and ``refinekit bench ladder``.

Exit codes: 0 refines, 1 does not refine, 2 usage, parse, budget or oracle error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass

from .engine import BudgetExceeded, ExplorationConfig, UnsoundConfigError, Verdict, refines
from .generators import gen_ladder
from .lts import DEFAULT_TAU, Lts, ParseError, read_aut
from .minimise import minimise
from .oracle import ORACLE_BUDGET, OracleTooLarge, oracle_refines

EXIT_REFINES, EXIT_FAILS, EXIT_ERROR = 0, 1, 2

RELATIONS = {"trace": "tr", "stable-failures": "sfr", "failures-divergences": "fdr",
             "tr": "tr", "sfr": "sfr", "fdr": "fdr"}

BENCH_COLUMNS = ("n", "k", "verdict", "wall_time", "working_max",
                 "antichain_hits", "antichain_misses", "antichain_max")


@dataclass
class RunReport:
    verdict: Verdict
    wall_time: float
    preprocessing_time: float
    spec_size: tuple[int, int]
    impl_size: tuple[int, int]
    spec_size_reduced: tuple[int, int]
    impl_size_reduced: tuple[int, int]

    def fields(self) -> dict:
        out = {"refines": self.verdict.refines, **self.verdict.metrics.as_dict(),
               "wall_time": round(self.wall_time, 6),
               "preprocessing_time": round(self.preprocessing_time, 6)}
        for name in ("spec_size", "impl_size", "spec_size_reduced", "impl_size_reduced"):
            states, trans = getattr(self, name)
            out[name.replace("size", "states")] = states
            out[name.replace("size", "transitions")] = trans
        return out


def _size(lts: Lts) -> tuple[int, int]:
    return lts.num_states, lts.num_transitions


def _parse_range(text: str) -> range:
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected A:B:STEP") from None
    if len(nums) == 1:
        nums = [nums[0], nums[0], 1]
    elif len(nums) == 2:
        nums.append(1)
    elif len(nums) != 3:
        raise argparse.ArgumentTypeError(f"bad range {text!r}, expected A:B:STEP")
    lo, hi, step = nums
    if step <= 0 or lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo, hi + 1, step)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refinekit", description="Antichain-based refinement checking of LTSs.")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="check SPEC ⊑ IMPL")
    check.add_argument("spec", metavar="SPEC.aut")
    check.add_argument("impl", metavar="IMPL.aut")
    check.add_argument("--relation", choices=sorted(RELATIONS), default="trace")
    check.add_argument("--strategy", choices=("df", "bf"), default="df")
    check.add_argument("--variant", choices=("improved", "legacy"), default="improved")
    check.add_argument("--minimize", action="store_true", help="reduce the specification first")
    check.add_argument("--minimize-impl", action="store_true", help="reduce the implementation too")
    check.add_argument("--allow-unsound-legacy-fdr", action="store_true")
    check.add_argument("--counterexample", action="store_true")
    check.add_argument("--metrics", choices=("json", "csv"))
    check.add_argument("--oracle", action="store_true", help="cross-check against the brute-force oracle")
    check.add_argument("--node-budget", type=int)
    check.add_argument("--tau", default=DEFAULT_TAU, metavar="NAME")

    bench = sub.add_parser("bench", help="benchmark sweeps")
    bench_sub = bench.add_subparsers(dest="family", required=True)
    ladder = bench_sub.add_parser("ladder", help="ladder self-refinement under traces")
    ladder.add_argument("--n-range", type=_parse_range, required=True, metavar="A:B:STEP")
    ladder.add_argument("--k-range", type=_parse_range, required=True, metavar="A:B:STEP")
    ladder.add_argument("--variant", choices=("improved", "legacy"), default="improved")
    ladder.add_argument("--strategy", choices=("df", "bf"), default="df")
    ladder.add_argument("--node-budget", type=int)
    return parser


def _error(message: str) -> int:
    print(f"refinekit: error: {message}", file=sys.stderr)
    return EXIT_ERROR


def run_check(args) -> int:
    relation = RELATIONS[args.relation]
    try:
        config = ExplorationConfig(relation=relation, strategy=args.strategy, variant=args.variant,
                                   allow_unsound=args.allow_unsound_legacy_fdr,
                                   node_budget=args.node_budget)
    except UnsoundConfigError:
        return _error("the legacy failures-divergences algorithm is unsound: it can reject "
                      "a diverging specification that every system refines, and it tests "
                      "implementation divergence before specification divergence; rerun "
                      "with --allow-unsound-legacy-fdr to run it anyway")
    try:
        spec = read_aut(args.spec, tau=args.tau)
        impl = read_aut(args.impl, tau=args.tau)
    except ParseError as exc:
        return _error(f"cannot parse input: {exc}")
    except OSError as exc:
        return _error(str(exc))

    if args.oracle:
        size = 2 ** spec.num_states * impl.num_states
        if size > ORACLE_BUDGET:
            return _error(f"--oracle rejected: instance size {size} exceeds the oracle budget {ORACLE_BUDGET}")

    start = time.perf_counter()
    spec_r = minimise(spec) if args.minimize else spec
    impl_r = minimise(impl) if args.minimize_impl else impl
    prep = time.perf_counter() - start

    start = time.perf_counter()
    try:
        verdict = refines(spec_r, impl_r, config)
    except BudgetExceeded as exc:
        return _error(f"budget-exceeded: {exc}")
    wall = time.perf_counter() - start
    report = RunReport(verdict, wall, prep, _size(spec), _size(impl), _size(spec_r), _size(impl_r))

    print(f"refines: {'true' if verdict.refines else 'false'}")
    if not verdict.refines:
        print(f"witness: {verdict.witness_kind}")
        if args.counterexample:
            print("counterexample: " + (" ".join(verdict.counterexample) or "(empty)"))
    if args.metrics == "json":
        print(json.dumps(report.fields()))
    elif args.metrics == "csv":
        fields = report.fields()
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(fields.keys())
        writer.writerow(fields.values())

    if args.oracle:
        try:
            expected = oracle_refines(spec, impl, relation)
        except OracleTooLarge as exc:
            return _error(str(exc))
        if expected != verdict.refines:
            return _error(f"oracle disagreement: oracle says refines={expected}")
        print("oracle: agrees")
    return EXIT_REFINES if verdict.refines else EXIT_FAILS


def run_bench_ladder(args) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for n in args.n_range:
        for k in args.k_range:
            lts = gen_ladder(n, k)
            config = ExplorationConfig(relation="tr", strategy=args.strategy, variant=args.variant,
                                       node_budget=args.node_budget)
            start = time.perf_counter()
            try:
                verdict = refines(lts, lts, config)
                outcome, metrics = str(verdict.refines).lower(), verdict.metrics
            except BudgetExceeded as exc:
                outcome, metrics = "budget-exceeded", exc.metrics
            wall = time.perf_counter() - start
            writer.writerow((n, k, outcome, f"{wall:.6f}", metrics.working_max,
                             metrics.antichain_hits, metrics.antichain_misses, metrics.antichain_max))
            sys.stdout.flush()
    return EXIT_REFINES


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_REFINES
    if args.command == "check":
        return run_check(args)
    return run_bench_ladder(args)


if __name__ == "__main__":
    sys.exit(main())
