"""Structural feature counts and the additive fitness score.

f(P) = s1 + ... + s7 + s_comp, each term +1 when its feature count falls in
the rewarded (inclusive) range and a penalty otherwise.
"""

from __future__ import annotations

from dataclasses import astuple, dataclass

from loopsight.lang import LexError, TokenKind, python_compiles, scan_line, validate

from loopsight.codegen.program import Program

ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "//=", "%=", "**="})

# (feature, low, high, reward, penalty)
SCORE_TABLE = (
    ("imports", 1, 12, 1, -1),
    ("defs", 2, 8, 1, -1),
    ("ifs", 2, 8, 1, -1),
    ("prints", 2, 8, 1, -1),
    ("variables", 2, 100, 1, -1),
    ("fors", 1, 6, 1, -5),
    ("lines", 10, 150, 1, -1),
)
COMPILE_REWARD, COMPILE_PENALTY = 1, -5
MAX_FITNESS = sum(t[3] for t in SCORE_TABLE) + COMPILE_REWARD
MIN_FITNESS = sum(t[4] for t in SCORE_TABLE) + COMPILE_PENALTY


@dataclass(frozen=True)
class StructuralCounts:
    imports: int = 0
    defs: int = 0
    ifs: int = 0
    prints: int = 0
    variables: int = 0
    fors: int = 0
    lines: int = 0


@dataclass(frozen=True)
class FitnessBreakdown:
    s1: int
    s2: int
    s3: int
    s4: int
    s5: int
    s6: int
    s7: int
    s_comp: int

    @property
    def total(self) -> int:
        return sum(astuple(self))


def _line_tokens(source: str):
    """Yield the token list of each physical line, skipping lines that fail to lex."""
    for lineno, raw in enumerate(source.splitlines(), start=1):
        try:
            toks = scan_line(raw, lineno)
        except LexError:
            continue
        if toks:
            yield toks


def assignment_targets(source: str) -> list[str]:
    """Names bound by assignment or by a ``for`` header, in first-seen order."""
    names: dict[str, None] = {}
    for toks in _line_tokens(source):
        first = toks[0]
        if first.kind is TokenKind.KEYWORD and first.text == "for":
            if len(toks) > 1 and toks[1].kind is TokenKind.IDENTIFIER:
                names.setdefault(toks[1].text)
            continue
        if (
            first.kind is TokenKind.IDENTIFIER
            and len(toks) > 1
            and toks[1].kind is TokenKind.OPERATOR
            and toks[1].text in ASSIGN_OPS
        ):
            names.setdefault(first.text)
    return list(names)


def count_features(program: Program | str) -> StructuralCounts:
    source = program.source if isinstance(program, Program) else program
    imports = defs = ifs = prints = fors = 0
    for toks in _line_tokens(source):
        for i, tok in enumerate(toks):
            if tok.kind is TokenKind.KEYWORD:
                if tok.text == "import":
                    imports += 1
                elif tok.text == "def":
                    defs += 1
                elif tok.text == "if":
                    ifs += 1
                elif tok.text == "for":
                    fors += 1
            elif (
                tok.kind is TokenKind.IDENTIFIER
                and tok.text == "print"
                and i + 1 < len(toks)
                and toks[i + 1].text == "("
                and not (i > 0 and toks[i - 1].text == ".")
            ):
                prints += 1
    return StructuralCounts(
        imports=imports,
        defs=defs,
        ifs=ifs,
        prints=prints,
        variables=len(assignment_targets(source)),
        fors=fors,
        lines=len(source.splitlines()),
    )


def score_fitness(counts: StructuralCounts, compiles: bool) -> FitnessBreakdown:
    scores = []
    for name, low, high, reward, penalty in SCORE_TABLE:
        value = getattr(counts, name)
        scores.append(reward if low <= value <= high else penalty)
    scores.append(COMPILE_REWARD if compiles else COMPILE_PENALTY)
    return FitnessBreakdown(*scores)


def compiles(source: str, external: bool = False) -> bool:
    if external:
        return python_compiles(source)
    return validate(source).ok


def evaluate(program: Program | str, external_compile: bool = False) -> FitnessBreakdown:
    source = program.source if isinstance(program, Program) else program
    return score_fitness(count_features(source), compiles(source, external_compile))
