"""Full-protocol run: 2000 + 2000 programs from population 10000 over 50 generations,
30 runs of 1000 epochs for both models at every variance level.

    python3 scripts/paper_scale.py --out paper_run [--levels 100 95 90 85 80]

This takes days on a single CPU core. Stages whose output already exists are
skipped, down to individual training runs, so an interrupted run can be resumed.
"""

import argparse
import logging
from pathlib import Path

from loopsight.codegen import ClassLabel, GeneratorConfig, evolve, write_corpus
from loopsight.dataset import build_dataset
from loopsight.experiments import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="paper_run")
    ap.add_argument("--population", type=int, default=10_000)
    ap.add_argument("--generations", type=int, default=50)
    ap.add_argument("--per-class", type=int, default=2000)
    ap.add_argument("--runs", type=int, default=30)
    ap.add_argument("--epochs", type=int, default=1000)
    ap.add_argument("--levels", type=int, nargs="+", default=[100, 95, 90, 85, 80])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = Path(args.out)

    dirs = {}
    for offset, label in enumerate((ClassLabel.INDEPENDENT, ClassLabel.AMBIGUOUS)):
        dirs[label] = out / "corpus" / label.slug
        if (dirs[label] / "curve.csv").exists():
            continue
        cfg = GeneratorConfig(label, population_size=args.population, generations=args.generations,
                              hof_size=args.per_class, seed=args.seed + 11 + offset)
        hof, curve = evolve(cfg)
        write_corpus(hof, curve, dirs[label], cfg)

    if not (out / "dataset" / "dataset.csv").exists():
        build_dataset([dirs[ClassLabel.INDEPENDENT]], [dirs[ClassLabel.AMBIGUOUS]], out / "dataset", seed=args.seed)

    exp = ExperimentConfig(corpus=str(out / "dataset"), levels=tuple(args.levels), runs=args.runs,
                           base_seed=args.seed, epochs=args.epochs, out=str(out / "report"))
    report = run_experiment(exp, resume=True)
    for (model, level), s in report.summaries.items():
        a = s.accuracy
        print(f"{model} {round(level * 100)}%: mean {a.mean:.2f} std {a.std:.2f} median {a.median:.2f} "
              f"CI [{a.ci95[0]:.2f}, {a.ci95[1]:.2f}]")
    for level, cmp in report.comparisons.items():
        print(f"KS {round(level * 100)}%: accuracy D={cmp.accuracy.statistic:.4f} p={cmp.accuracy.p_value:.4f}; "
              f"loss D={cmp.loss.statistic:.4f} p={cmp.loss.p_value:.4g}")


if __name__ == "__main__":
    main()
