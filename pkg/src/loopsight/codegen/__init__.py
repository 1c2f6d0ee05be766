"""Genetic-algorithm synthesis of labelled programs."""

from loopsight.codegen.fitness import (
    MAX_FITNESS,
    MIN_FITNESS,
    FitnessBreakdown,
    StructuralCounts,
    count_features,
    evaluate,
    score_fitness,
)
from loopsight.codegen.ga import GenerationStats, GeneratorConfig, HallOfFame, evolve, read_curve, write_corpus
from loopsight.codegen.operators import crossover_lines, mutate_program, roulette_select, splice
from loopsight.codegen.program import ClassLabel, Program
from loopsight.codegen.reuse import reuse_count
from loopsight.codegen.synth import synthesize_program

__all__ = [
    "MAX_FITNESS",
    "MIN_FITNESS",
    "ClassLabel",
    "FitnessBreakdown",
    "GenerationStats",
    "GeneratorConfig",
    "HallOfFame",
    "Program",
    "StructuralCounts",
    "count_features",
    "crossover_lines",
    "evaluate",
    "evolve",
    "mutate_program",
    "read_curve",
    "reuse_count",
    "roulette_select",
    "score_fitness",
    "splice",
    "synthesize_program",
    "write_corpus",
]
