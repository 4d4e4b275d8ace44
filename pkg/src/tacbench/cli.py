"""Command-line interface: generate / run / report / stats."""

from __future__ import annotations

import argparse
import ast
import sys
from pathlib import Path

from tacbench import bench
from tacbench.cluster import METHOD_IDS


def _parse_overrides(pairs) -> dict:
    overrides: dict = {}
    for pair in pairs or []:
        try:
            target, raw = pair.split("=", 1)
            method, param = target.split(".", 1)
        except ValueError:
            raise SystemExit(f"--set expects <method>.<param>=<value>, got {pair!r}")
        if method not in METHOD_IDS:
            raise SystemExit(f"--set: unknown method {method!r}")
        try:
            value = ast.literal_eval(raw)
        except (ValueError, SyntaxError):
            value = raw
        overrides.setdefault(method, {})[param] = value
    return overrides


def _config(args) -> bench.BenchConfig:
    methods = tuple(args.methods.split(",")) if args.methods else METHOD_IDS
    return bench.BenchConfig(
        methods=methods,
        patients=args.patients,
        seed=args.seed,
        curves_per_organ=args.curves_per_organ,
        output_dir=Path(args.out),
        standardize=args.standardize,
        parallel=getattr(args, "parallel", False),
        ref_method=getattr(args, "ref_method", "GMM"),
        overrides=_parse_overrides(getattr(args, "set", None)),
    )


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--patients", type=int, default=30)
    parser.add_argument("--curves-per-organ", type=int, default=1000,
                        dest="curves_per_organ")
    parser.add_argument("--methods", default="",
                        help="comma-separated subset of the 15 method ids")
    parser.add_argument("--out", default="bench-out", help="output directory")
    parser.add_argument("--standardize", action="store_true",
                        help="z-score each frame before clustering")
    parser.add_argument("--set", action="append", metavar="METHOD.PARAM=VALUE",
                        help="per-method hyperparameter override")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tacbench",
        description="Synthetic TAC clustering benchmark",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write synthetic patient datasets")
    _add_common(p_gen)

    p_run = sub.add_parser("run", help="run the method x patient matrix")
    _add_common(p_run)
    p_run.add_argument("--parallel", action="store_true",
                       help="parallelize runs (timings not comparable)")

    p_rep = sub.add_parser("report", help="emit tables, CSVs and figures")
    _add_common(p_rep)
    p_rep.add_argument("--ref-method", default="GMM", dest="ref_method",
                       help="reference method for the timing t-tests")

    p_stats = sub.add_parser("stats", help="test one method pair")
    _add_common(p_stats)
    p_stats.add_argument("method_a", choices=METHOD_IDS)
    p_stats.add_argument("method_b", choices=METHOD_IDS)
    p_stats.add_argument("--m", type=int, default=1,
                         help="Bonferroni pairwise-test count")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            manifest = bench.cmd_generate(_config(args))
            print(f"wrote {len(manifest['patients'])} datasets to {args.out}")
        elif args.command == "run":
            config = _config(args)
            if config.parallel:
                print("note: --parallel run; timings are not comparable",
                      file=sys.stderr)
            records = bench.cmd_run(config)
            failed = sum(1 for r in records if r.status != "ok")
            print(f"wrote {len(records)} records "
                  f"({failed} failed) to {config.output_dir / 'runs.csv'}")
        elif args.command == "report":
            config = _config(args)
            outputs = bench.cmd_report(config)
            print(f"medians for {len(outputs['medians'])} methods; "
                  f"significance m={outputs['m_accuracy']}, "
                  f"timing m={outputs['m_timing']}")
            for fig in outputs["figures"]:
                print(f"figure: {fig}")
        elif args.command == "stats":
            config = _config(args)
            records = bench.read_records(config.output_dir / "runs.csv")
            outputs = bench.cmd_stats(records, args.method_a, args.method_b,
                                      m=args.m)
            for name, item in outputs.items():
                res = item["result"]
                star = item["stars"]
                print(f"{name}: statistic={res.statistic:.6g} "
                      f"p={res.p_value:.6g} direction={res.direction} "
                      f"stars={star.symbol or '-'}")
    except (ValueError, FileNotFoundError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
