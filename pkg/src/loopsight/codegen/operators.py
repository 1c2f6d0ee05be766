"""Variation and selection operators on line-oriented program genomes."""

from __future__ import annotations

import random

from loopsight.lang import LexError, TokenKind, scan_line

from loopsight.codegen.fitness import assignment_targets
from loopsight.codegen.program import Program

ROULETTE_EPS = 1e-6
FRESH_BASES = ("var", "tmp", "val", "item", "node", "acc", "res", "num", "key", "buf")


def crossover_lines(a: Program, b: Program, rng: random.Random) -> tuple[Program, Program]:
    """Swap one contiguous block of whole lines between ``a`` and ``b``.

    Block boundaries are drawn independently in each parent, so children can
    differ in length from both parents and need not be well formed.
    """
    if a.label != b.label:
        raise ValueError("crossover requires parents of the same class")
    la, lb = a.lines, b.lines
    if len(la) < 2 or len(lb) < 2:
        return a, b
    i, j = sorted(rng.sample(range(len(la) + 1), 2))
    k, m = sorted(rng.sample(range(len(lb) + 1), 2))
    return splice(a, b, (i, j), (k, m))


def splice(a: Program, b: Program, cut_a: tuple[int, int], cut_b: tuple[int, int]) -> tuple[Program, Program]:
    """Exchange ``a.lines[i:j]`` with ``b.lines[k:m]`` (half-open, zero-based)."""
    (i, j), (k, m) = cut_a, cut_b
    la, lb = a.lines, b.lines
    child1 = la[:i] + lb[k:m] + la[j:]
    child2 = lb[:k] + la[i:j] + lb[m:]
    return Program.from_lines(child1, a.label), Program.from_lines(child2, b.label)


def _identifier_spans(lines: list[str]):
    """(line index, column, text) for every identifier that is not an attribute name."""
    for idx, raw in enumerate(lines):
        try:
            toks = scan_line(raw, idx + 1)
        except LexError:
            continue
        prev = None
        for tok in toks:
            if tok.kind is TokenKind.IDENTIFIER and not (prev is not None and prev.text == "."):
                yield idx, tok.col - 1, tok.text
            prev = tok


def _number_spans(lines: list[str]):
    for idx, raw in enumerate(lines):
        try:
            toks = scan_line(raw, idx + 1)
        except LexError:
            continue
        for tok in toks:
            if tok.kind is TokenKind.NUMBER and tok.text.isdigit():
                yield idx, tok.col - 1, tok.text


def _replace_spans(lines: list[str], spans, new_text) -> list[str]:
    out = list(lines)
    # Right to left within a line keeps earlier columns valid.
    for idx, col, old in sorted(spans, key=lambda s: (s[0], -s[1])):
        text = new_text(old)
        out[idx] = out[idx][:col] + text + out[idx][col + len(old):]
    return out


def rename_variable(p: Program, old: str, new: str) -> Program:
    spans = [s for s in _identifier_spans(p.lines) if s[2] == old]
    return Program.from_lines(_replace_spans(p.lines, spans, lambda _: new), p.label)


def _fresh_name(used: set[str], rng: random.Random) -> str:
    while True:
        name = f"{rng.choice(FRESH_BASES)}{rng.randint(0, 99)}"
        if name not in used:
            return name


def mutate_program(p: Program, rng: random.Random) -> Program:
    """Apply one small edit: rename a variable, perturb an integer literal, or insert a print.

    Renaming is consistent across the whole program and picks a name not yet
    used anywhere, so the data-flow structure (and hence the class) is
    unchanged. Inserted prints sit at top level, outside every loop.
    """
    lines = p.lines
    variables = assignment_targets(p.source)
    numbers = list(_number_spans(lines))
    kinds = ["print"]
    if variables:
        kinds.append("rename")
    if numbers:
        kinds.append("literal")
    kind = rng.choice(sorted(kinds))

    if kind == "rename":
        old = rng.choice(variables)
        used = {s[2] for s in _identifier_spans(lines)}
        return rename_variable(p, old, _fresh_name(used, rng))

    if kind == "literal":
        idx, col, old = rng.choice(numbers)
        value = int(old)
        delta = rng.choice((-3, -2, -1, 1, 2, 3))
        new_value = max(1, value + delta)
        if new_value == value:
            new_value = value + abs(delta)
        new = str(new_value)
        out = list(lines)
        out[idx] = out[idx][:col] + new + out[idx][col + len(old):]
        return Program.from_lines(out, p.label)

    positions = [i for i, raw in enumerate(lines) if raw.strip() and not raw[0].isspace()] + [len(lines)]
    pos = rng.choice(positions)
    arg = rng.choice(variables) if variables else str(rng.randint(0, 9))
    return Program.from_lines(lines[:pos] + [f"print({arg})"] + lines[pos:], p.label)


def roulette_select(pop: list, fitnesses: list[float], k: int, rng: random.Random) -> list:
    """Sample ``k`` individuals with replacement, proportional to ``f - min(f) + eps``."""
    if not pop:
        raise ValueError("empty population")
    if len(pop) != len(fitnesses):
        raise ValueError("population and fitness lists differ in length")
    if k < 1:
        raise ValueError("k must be at least 1")
    low = min(fitnesses)
    weights = [f - low + ROULETTE_EPS for f in fitnesses]
    return rng.choices(pop, weights=weights, k=k)
