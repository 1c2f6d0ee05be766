"""Command-line entry point: ``loopsight {generate,dataset,experiment,report}``."""

from __future__ import annotations

import argparse
import logging
import sys

from loopsight.codegen import ClassLabel, GeneratorConfig, evolve, write_corpus
from loopsight.dataset import CorpusError, build_dataset
from loopsight.experiments import ExperimentConfig, report_from_dir, run_experiment


def _generate(args) -> int:
    cfg = GeneratorConfig(
        label=ClassLabel.parse(args.cls),
        population_size=args.population,
        generations=args.generations,
        hof_size=args.hof,
        seed=args.seed,
        external_compile=args.external_compile,
    )
    hof, curve = evolve(cfg)
    paths = write_corpus(hof, curve, args.out, cfg)
    best = hof[0][1] if hof else None
    print(f"wrote {len(paths)} programs to {args.out} (best fitness {best})")
    return 0


def _dataset(args) -> int:
    meta = build_dataset(args.pos, args.neg, args.out, width=args.width, seed=args.seed)
    print(f"wrote {meta['rows']} rows of width {meta['width']} to {args.out}")
    return 0


def _experiment(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    report = run_experiment(cfg)
    for (model, level), s in report.summaries.items():
        print(f"{model} {round(level * 100)}%: median accuracy {s.accuracy.median:.2f} over {s.accuracy.n} runs")
    print(f"report written to {cfg.out}")
    return 0


def _report(args) -> int:
    report_from_dir(args.inp, args.out)
    print(f"report rebuilt from {args.inp} into {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopsight", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="evolve one class of labelled programs")
    g.add_argument("--class", dest="cls", required=True, help="independent or ambiguous")
    g.add_argument("--population", type=int, default=10_000)
    g.add_argument("--generations", type=int, default=50)
    g.add_argument("--hof", type=int, default=500, help="Hall-of-Fame size, i.e. programs written")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--external-compile", action="store_true", help="also require Python's own compile() to accept")
    g.set_defaults(func=_generate)

    d = sub.add_parser("dataset", help="tokenize and encode program directories into a dataset cache")
    d.add_argument("--pos", action="append", required=True, help="directory of Independent programs (repeatable)")
    d.add_argument("--neg", action="append", required=True, help="directory of Ambiguous programs (repeatable)")
    d.add_argument("--out", required=True)
    d.add_argument("--width", type=int, default=None, help="pad/truncate width (default: longest program)")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=_dataset)

    e = sub.add_parser("experiment", help="run the repeated train/evaluate protocol")
    e.add_argument("--config", required=True, help="JSON experiment config")
    e.set_defaults(func=_experiment)

    r = sub.add_parser("report", help="rebuild report files from persisted run records")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.set_defaults(func=_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (CorpusError, FileNotFoundError, ValueError) as exc:
        print(f"loopsight: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
