"""Command line entry point: ``craftplan learn|eval|compare|emit-plots``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    emit_report,
    evaluate_sr,
    plot_curves,
    run_learning,
    write_eval,
)


def _config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.seeds:
        cfg.seeds = [int(s) for s in args.seeds.split(",")]
    return cfg


def cmd_learn(args) -> int:
    cfg = _config(args)
    log = run_learning(cfg, args.out)
    finals = log.final_ega()
    for seed, value in finals.items():
        print(f"seed {seed}: final EGA {value:.3f}")
    for fault in log.faults:
        print(f"fault: {fault}", file=sys.stderr)
    return 0 if finals else 1


def cmd_eval(args) -> int:
    cfg = _config(args)
    records = evaluate_sr(cfg, args.graph)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(json.dumps(cfg.to_json(), indent=2, sort_keys=True))
    write_eval(records, out / "eval.csv")
    wins = sum(r.success for r in records)
    print(f"SR {wins}/{len(records)} = {wins / len(records):.3f}")
    return 0


def cmd_compare(args) -> int:
    for path in emit_report(args.runs, args.out):
        print(path)
    return 0


def cmd_emit_plots(args) -> int:
    run = Path(args.run)
    written = emit_report([run], run / "report")
    curves = run / "report" / "ega_curves.csv"
    if curves in written:
        print(plot_curves(curves, run / "report" / "ega.png"))
    for path in written:
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="craftplan", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    learn = sub.add_parser("learn", help="explore and learn a dependency graph")
    learn.add_argument("--config", help="experiment config JSON")
    learn.add_argument("--seeds", help="comma-separated seeds, overriding the config")
    learn.add_argument("--out", required=True, help="output directory")
    learn.set_defaults(func=cmd_learn)

    ev = sub.add_parser("eval", help="success rate on the benchmark goals")
    ev.add_argument("--config", help="experiment config JSON")
    ev.add_argument("--seeds", help="comma-separated seeds, overriding the config")
    ev.add_argument("--graph", default="oracle", help="graph checkpoint JSON, or 'oracle'")
    ev.add_argument("--out", required=True)
    ev.set_defaults(func=cmd_eval)

    cmp_ = sub.add_parser("compare", help="summarize several run directories")
    cmp_.add_argument("--runs", nargs="+", required=True)
    cmp_.add_argument("--out", required=True)
    cmp_.set_defaults(func=cmd_compare)

    plots = sub.add_parser("emit-plots", help="summary tables and an EGA plot for one run")
    plots.add_argument("--run", required=True)
    plots.set_defaults(func=cmd_emit_plots)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
