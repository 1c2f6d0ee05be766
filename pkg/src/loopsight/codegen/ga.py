"""Generational GA that evolves labelled programs and archives the best ones."""

from __future__ import annotations

import bisect
import csv
import json
import logging
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from statistics import fmean

from loopsight.lang import LexError, ParseError, parse, python_compiles

from loopsight.codegen.fitness import count_features, score_fitness
from loopsight.codegen.operators import crossover_lines, mutate_program, roulette_select
from loopsight.codegen.program import ClassLabel, Program
from loopsight.codegen.reuse import iter_loops, loop_carries_reuse
from loopsight.codegen.synth import synthesize_program

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorConfig:
    label: ClassLabel
    population_size: int = 10_000
    generations: int = 50
    crossover_prob: float = 0.9
    mutation_prob: float = 0.1
    hof_size: int = 500
    seed: int = 0
    external_compile: bool = False

    def __post_init__(self):
        object.__setattr__(self, "label", ClassLabel(self.label))
        if self.population_size < 2:
            raise ValueError("population_size must be at least 2")
        if self.generations < 1:
            raise ValueError("generations must be at least 1")
        if not 1 <= self.hof_size <= self.population_size:
            raise ValueError("hof_size must be between 1 and population_size")
        for name in ("crossover_prob", "mutation_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    avg: float
    max: float
    min: float


class HallOfFame:
    """Best-ever distinct programs; equal fitness goes to the earlier discovery."""

    def __init__(self, size: int):
        self.size = size
        self._entries: list[tuple[int, int, str]] = []  # (-fitness, discovery order, source)
        self._members: dict[str, int] = {}
        self._counter = 0

    def update(self, programs: list[Program], fitnesses: list[int]) -> None:
        for p, f in zip(programs, fitnesses):
            if p.source in self._members:
                continue
            key = (-f, self._counter, p.source)
            self._counter += 1
            if len(self._entries) >= self.size and key >= self._entries[-1]:
                continue
            bisect.insort(self._entries, key)
            self._members[p.source] = f
            if len(self._entries) > self.size:
                dropped = self._entries.pop()
                del self._members[dropped[2]]

    @property
    def best_fitness(self) -> int:
        return -self._entries[0][0]

    def items(self, label: ClassLabel) -> list[tuple[Program, int]]:
        return [(Program(src, label), -neg) for neg, _, src in self._entries]

    def __len__(self):
        return len(self._entries)


def class_consistent(module, label: ClassLabel) -> bool:
    carrying = sum(1 for loop in iter_loops(module.body) if loop_carries_reuse(loop))
    return carrying == 0 if label is ClassLabel.INDEPENDENT else carrying >= 1


class _Assessor:
    """Fitness plus class check, parsed once per distinct source."""

    def __init__(self, label: ClassLabel, external_compile: bool):
        self.label = label
        self.external = external_compile
        self.cache: dict[str, tuple[int, bool | None]] = {}

    def __call__(self, p: Program) -> tuple[int, bool | None]:
        hit = self.cache.get(p.source)
        if hit is not None:
            return hit
        try:
            module = parse(p.source)
        except (LexError, ParseError):
            module = None
        compiles = python_compiles(p.source) if self.external else module is not None
        fitness = score_fitness(count_features(p.source), compiles).total
        consistent = None if module is None else class_consistent(module, self.label)
        self.cache[p.source] = (fitness, consistent)
        return fitness, consistent

    def retain(self, programs: list[Program]) -> None:
        keep = {p.source for p in programs}
        self.cache = {s: v for s, v in self.cache.items() if s in keep}


def evolve(cfg: GeneratorConfig) -> tuple[list[tuple[Program, int]], list[GenerationStats]]:
    """Run the GA; returns Hall-of-Fame (program, fitness) pairs best first, and one stats row per generation.

    Offspring that parse but break their class's loop property are replaced by
    the parent they came from. Offspring that fail to parse are kept and left
    to the compile penalty.

    The ``max`` column of each stats row is the best fitness seen so far (the
    Hall-of-Fame maximum); ``avg`` and ``min`` describe the current population.
    """
    rng = random.Random(cfg.seed)
    assess = _Assessor(cfg.label, cfg.external_compile)
    pop = [synthesize_program(cfg.label, rng) for _ in range(cfg.population_size)]
    fits = [assess(p)[0] for p in pop]
    hof = HallOfFame(cfg.hof_size)
    hof.update(pop, fits)
    curve: list[GenerationStats] = []

    def keeps_class(child: Program) -> bool:
        return assess(child)[1] is not False

    for gen in range(1, cfg.generations + 1):
        offspring = roulette_select(pop, fits, len(pop), rng)
        for i in range(1, len(offspring), 2):
            if rng.random() < cfg.crossover_prob:
                c1, c2 = crossover_lines(offspring[i - 1], offspring[i], rng)
                if keeps_class(c1):
                    offspring[i - 1] = c1
                if keeps_class(c2):
                    offspring[i] = c2
        for i in range(len(offspring)):
            if rng.random() < cfg.mutation_prob:
                child = mutate_program(offspring[i], rng)
                if keeps_class(child):
                    offspring[i] = child
        pop = offspring
        fits = [assess(p)[0] for p in pop]
        hof.update(pop, fits)
        assess.retain(pop)
        curve.append(GenerationStats(gen, fmean(fits), hof.best_fitness, min(fits)))
        log.debug("gen %d avg %.3f max %d min %d", gen, curve[-1].avg, curve[-1].max, curve[-1].min)
    return hof.items(cfg.label), curve


def write_curve(curve: list[GenerationStats], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["generation", "avg", "max", "min"])
        for row in curve:
            writer.writerow([row.generation, repr(float(row.avg)), row.max, row.min])


def read_curve(path) -> list[GenerationStats]:
    with open(path, newline="") as fh:
        return [
            GenerationStats(int(r["generation"]), float(r["avg"]), float(r["max"]), float(r["min"]))
            for r in csv.DictReader(fh)
        ]


def write_corpus(hall_of_fame: list[tuple[Program, int]], curve: list[GenerationStats], out_dir, cfg: GeneratorConfig) -> list[Path]:
    """One ``<class>_<index>.py`` per Hall-of-Fame member plus ``curve.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(len(hall_of_fame) - 1)))
    paths = []
    for index, (program, _) in enumerate(hall_of_fame):
        path = out / f"{cfg.label.slug}_{index:0{width}d}.py"
        path.write_text(program.source, encoding="utf-8")
        paths.append(path)
    write_curve(curve, out / "curve.csv")
    meta = asdict(cfg) | {"label": cfg.label.slug, "fitness": [f for _, f in hall_of_fame]}
    (out / "generation.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return paths
