"""Desk-scale end-to-end run: 200 + 200 evolved programs, 5 runs of each model at 100% variance.

    python3 scripts/desk_scale.py --out desk_run [--epochs 200 --runs 5]

Writes the two GA corpora, the dataset cache and the experiment report under
``--out`` and prints the median test accuracy per model.
"""

import argparse
import logging
import time
from pathlib import Path

from loopsight.codegen import ClassLabel, GeneratorConfig, evolve, write_corpus
from loopsight.dataset import build_dataset
from loopsight.experiments import ExperimentConfig, run_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="desk_run")
    ap.add_argument("--population", type=int, default=500)
    ap.add_argument("--generations", type=int, default=20)
    ap.add_argument("--per-class", type=int, default=200)
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")
    out = Path(args.out)

    t0 = time.perf_counter()
    dirs = {}
    for offset, label in enumerate((ClassLabel.INDEPENDENT, ClassLabel.AMBIGUOUS)):
        cfg = GeneratorConfig(label, population_size=args.population, generations=args.generations,
                              hof_size=args.per_class, seed=args.seed + 11 + offset)
        hof, curve = evolve(cfg)
        dirs[label] = out / "corpus" / label.slug
        write_corpus(hof, curve, dirs[label], cfg)
        print(f"{label.slug}: {len(hof)} programs, best fitness {hof[0][1]}, {time.perf_counter() - t0:.0f}s")

    meta = build_dataset([dirs[ClassLabel.INDEPENDENT]], [dirs[ClassLabel.AMBIGUOUS]], out / "dataset", seed=args.seed)
    print(f"dataset: {meta['rows']} rows, width {meta['width']}")

    exp = ExperimentConfig(corpus=str(out / "dataset"), levels=(1.0,), runs=args.runs, base_seed=args.seed,
                           epochs=args.epochs, out=str(out / "report"))
    report = run_experiment(exp)
    for (model, _), s in report.summaries.items():
        print(f"{model}: median test accuracy {s.accuracy.median:.2f}% "
              f"(mean {s.accuracy.mean:.2f}, worst {s.accuracy.worst:.2f}, best {s.accuracy.best:.2f})")
    print(f"total {time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
