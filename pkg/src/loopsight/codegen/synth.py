"""Random program synthesis for the two classes.

Both classes share the program skeleton: imports, global lists and counters,
functions that each own at least one loop, and top-level calls. Conditionals
and prints are placed inside loop bodies. The classes differ only in how those
loop bodies are built: independent loops write iteration-private values (fresh
temporaries or ``out[i]`` slots), ambiguous loops read state left behind by the
previous iteration (accumulators, recurrences, previous-value tracking,
running maxima).
"""

from __future__ import annotations

import random

from loopsight.codegen.program import ClassLabel, Program

MODULES = (
    "math", "random", "os", "sys", "time", "json", "re", "string",
    "itertools", "functools", "collections", "statistics", "operator", "copy",
)
FUNC_NAMES = (
    "compute", "process", "transform", "update", "helper", "evaluate",
    "combine", "adjust", "measure", "check", "build", "normalize",
)
PARAM_NAMES = ("a", "b", "c", "p", "q", "r", "u", "w")
LIST_NAMES = ("data", "values", "items", "numbers", "samples")
INT_NAMES = ("n", "size", "limit", "factor", "offset", "base", "step", "width", "rate", "count")
LOCAL_NAMES = ("v", "z", "val", "cur", "y", "h", "m", "d")
# Identifier pools used only inside loops, one family per class.
INDEP_INDEX_VARS = ("i", "j", "idx")
INDEP_ELEM_VARS = ("x", "item")
INDEP_ARRAYS = ("out", "squares", "scaled", "doubled", "slots", "buf")
INDEP_TEMPS = ("tmp", "sq", "part", "piece", "cell", "local")
DEP_INDEX_VARS = ("k", "step_i", "pos")
DEP_ELEM_VARS = ("elem", "e")
DEP_STATE = ("acc", "total", "running", "carry", "prev", "last", "memo", "tally", "agg", "state")
DEP_ARRAYS = ("seq", "fib", "chain", "hist")
LABELS = ('"result"', '"value:"', '"done"', '"total:"', '"check"')

IND = "    "


class _Builder:
    def __init__(self, label: ClassLabel, rng: random.Random):
        self.label = label
        self.rng = rng

    # -- small pieces

    def literal(self, low: int = 1, high: int = 20) -> str:
        return str(self.rng.randint(low, high))

    def operand(self, names: list[str]) -> str:
        if names and self.rng.random() < 0.6:
            return self.rng.choice(names)
        return self.literal()

    def arith(self, names: list[str]) -> str:
        op = self.rng.choice(("+", "-", "*", "%"))
        return f"{self.operand(names)} {op} {self.operand(names)}"

    def fresh(self, pool, taken: set[str]) -> str:
        free = [n for n in pool if n not in taken]
        name = self.rng.choice(free) if free else f"{self.rng.choice(pool)}{len(taken)}"
        taken.add(name)
        return name

    def print_line(self, names: list[str]) -> str:
        if names and self.rng.random() < 0.7:
            if self.rng.random() < 0.5:
                return f"print({self.rng.choice(LABELS)}, {self.rng.choice(names)})"
            return f"print({self.rng.choice(names)})"
        return f"print({self.rng.choice(LABELS)})"

    # -- conditionals

    def if_block(self, depth: int, names: list[str], taken: set[str]) -> list[str]:
        pad = IND * depth
        subject = self.operand(names)
        cmp = self.rng.choice((">", "<", "==", "!=", ">=", "<="))
        target = self.fresh(LOCAL_NAMES, taken)
        lines = [f"{pad}if {subject} {cmp} {self.literal(0, 30)}:", f"{pad}{IND}{target} = {self.arith(names)}"]
        if self.rng.random() < 0.5:
            lines += [f"{pad}else:", f"{pad}{IND}{target} = {self.literal()}"]
        return lines

    # -- loops

    def loop_block(self, depth, names, lists, taken, n_ifs=0, n_prints=0) -> list[str]:
        """One loop whose body embeds ``n_ifs`` conditionals and ``n_prints`` prints."""
        pad = IND * depth
        pieces = ["if"] * n_ifs + ["print"] * n_prints + ["plain"] * self.rng.randint(2, 5)
        self.rng.shuffle(pieces)
        if self.label is ClassLabel.INDEPENDENT:
            return self._independent_loop(pad, names, lists, taken, pieces)
        return self._dependent_loop(pad, names, lists, taken, pieces)

    def _source_list(self, lists: list[str]) -> str:
        if lists and self.rng.random() < 0.8:
            return self.rng.choice(lists)
        return "[" + ", ".join(self.literal() for _ in range(3)) + "]"

    def _independent_loop(self, pad, names, lists, taken, pieces):
        """Every body write is a fresh temporary or the slot indexed by the loop variable."""
        rng = self.rng
        outside = list(names)
        inner = pad + IND
        pre: list[str] = []
        if rng.random() < 0.6:
            var = rng.choice(INDEP_INDEX_VARS)
            size = self.literal(3, 30)
            slot = self.fresh(INDEP_ARRAYS, taken)
            pre.append(f"{pad}{slot} = [{self.literal(0, 2)}] * {size}")
            header = f"{pad}for {var} in range({size}):"
            names.append(slot)
        else:
            var = rng.choice(INDEP_ELEM_VARS)
            slot = None
            header = f"{pad}for {var} in {self._source_list(lists)}:"
        readable = [var]
        body: list[str] = []
        for piece in pieces:
            subject = rng.choice(readable)
            if piece == "print":
                body.append(f"{inner}print({subject})")
            elif piece == "if":
                if slot is not None:
                    body += [f"{inner}if {subject} % 2 == 0:", f"{inner}{IND}{slot}[{var}] = {subject} * {self.literal()}"]
                    if rng.random() < 0.5:
                        body += [f"{inner}else:", f"{inner}{IND}{slot}[{var}] = {subject} + {self.literal()}"]
                else:
                    body += [f"{inner}if {subject} > {self.literal()}:", f"{inner}{IND}print({subject})"]
            elif slot is not None and rng.random() < 0.5:
                op = rng.choice(("*", "+", "%"))
                body.append(f"{inner}{slot}[{var}] = {subject} {op} {self.operand(outside)}")
            else:
                tmp = self.fresh(INDEP_TEMPS, taken)
                op = rng.choice(("*", "+", "-"))
                body.append(f"{inner}{tmp} = {subject} {op} {self.operand(outside)}")
                readable.append(tmp)
        return pre + [header] + body

    def _dependent_loop(self, pad, names, lists, taken, pieces):
        """At least one body statement reads state written by the previous iteration."""
        rng = self.rng
        outside = list(names)
        inner = pad + IND
        state = self.fresh(DEP_STATE, taken)
        pre = [f"{pad}{state} = {self.literal(0, 5)}"]
        names.append(state)
        chain = None
        if rng.random() < 0.5:
            var = rng.choice(DEP_INDEX_VARS)
            size = self.literal(3, 30)
            if rng.random() < 0.5:
                chain = self.fresh(DEP_ARRAYS, taken)
                pre.append(f"{pad}{chain} = [1] * {size}")
                header = f"{pad}for {var} in range(1, {size}):"
                names.append(chain)
            else:
                header = f"{pad}for {var} in range({size}):"
        else:
            var = rng.choice(DEP_ELEM_VARS)
            header = f"{pad}for {var} in {self._source_list(lists)}:"
        body: list[str] = []
        for piece in pieces:
            choice = rng.random()
            if piece == "print":
                body.append(f"{inner}print({state})")
            elif piece == "if":
                if choice < 0.4:
                    body += [f"{inner}if {var} > {state}:", f"{inner}{IND}{state} = {var}"]
                elif choice < 0.7:
                    limit = self.literal(10, 50)
                    body += [f"{inner}if {state} > {limit}:", f"{inner}{IND}{state} = {state} - {limit}"]
                else:
                    body += [f"{inner}if {var} % 2 == 0:", f"{inner}{IND}{state} += {var}"]
            elif choice < 0.3:
                body.append(f"{inner}{state} = {state} {rng.choice(('+', '-', '*'))} {var}")
            elif choice < 0.55:
                aug = rng.choice(("+=", "-=", "*="))
                body.append(f"{inner}{state} {aug} {var} {rng.choice(('*', '+'))} {self.operand(outside)}")
            elif chain is not None and choice < 0.75:
                body.append(f"{inner}{chain}[{var}] = {chain}[{var} - 1] + {state}")
            else:
                prev = self.fresh(DEP_STATE, taken)
                delta = self.fresh(DEP_STATE, taken)
                pre.append(f"{pad}{prev} = 0")
                body += [f"{inner}{delta} = {var} - {prev}", f"{inner}{prev} = {var}"]
        return pre + [header] + body

    # -- whole program

    def build(self) -> Program:
        rng = self.rng
        n_imports = rng.randint(1, 12)
        n_defs = rng.randint(2, 8)
        n_ifs = rng.randint(0, 8)
        n_prints = rng.randint(0, 8)
        # An ambiguous program needs a loop to carry its defining reuse.
        n_fors = rng.randint(1 if self.label is ClassLabel.AMBIGUOUS else 0, 6)

        lines = [f"import {m}" for m in rng.sample(MODULES, n_imports)]

        taken: set[str] = set()
        lists = [self.fresh(LIST_NAMES, taken)]
        lines.append(f"{lists[0]} = [{', '.join(self.literal(0, 50) for _ in range(3))}]")
        globals_ = [self.fresh(INT_NAMES, taken)]
        lines.append(f"{globals_[0]} = {self.literal()}")

        # Loops go to random functions or the top level (-1). Conditionals and
        # prints live inside loop bodies; without loops they fall back to
        # plain function-body statements.
        owners = [rng.randint(-1, n_defs - 1) for _ in range(n_fors)]
        slots = n_fors if n_fors else n_defs
        ifs_at = [0] * slots
        prints_at = [0] * slots
        for _ in range(n_ifs):
            ifs_at[rng.randrange(slots)] += 1
        for _ in range(n_prints):
            prints_at[rng.randrange(slots)] += 1

        func_names = rng.sample(FUNC_NAMES, n_defs)
        for f_index, fname in enumerate(func_names):
            params = rng.sample(PARAM_NAMES, rng.randint(1, 2))
            local_taken = set(taken) | set(params)
            local_names = list(params)
            lines.append(f"def {fname}({', '.join(params)}):")
            if not n_fors:
                for _ in range(ifs_at[f_index]):
                    lines += self.if_block(1, local_names, local_taken)
                for _ in range(prints_at[f_index]):
                    lines.append(f"{IND}print({rng.choice(local_names)})")
            for loop_index, owner in enumerate(owners):
                if owner == f_index:
                    lines += self.loop_block(1, local_names, list(params), local_taken, ifs_at[loop_index], prints_at[loop_index])
            lines.append(f"{IND}return {self.arith(local_names + globals_)}")

        top_names = list(globals_)
        for loop_index, owner in enumerate(owners):
            if owner == -1:
                lines += self.loop_block(0, top_names, lists, taken, ifs_at[loop_index], prints_at[loop_index])
        target = self.fresh(LOCAL_NAMES, taken)
        lines.append(f"{target} = {rng.choice(func_names)}({self.operand(top_names + lists)})")
        return Program.from_lines(lines, self.label)


def synthesize_program(label: ClassLabel, rng: random.Random) -> Program:
    """Draw one random program of class ``label`` from the restricted grammar."""
    return _Builder(ClassLabel(label), rng).build()
