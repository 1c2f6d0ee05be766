"""Static detection of loop-carried reuse.

A loop carries reuse when some iteration may read a variable whose value was
written by an earlier iteration of the same loop. Per iteration we track the
names definitely assigned so far; a read of a name that the body writes
somewhere, made before that name is definitely assigned, is carried.

Element writes ``a[t] = ...`` indexed exactly by the loop variable ``t`` are
iteration-private: reading ``a[t]`` back is fine, while any other read of
``a`` (``a[t - 1]``, ``a[0]``, ``a`` itself) is carried.
"""

from __future__ import annotations

from loopsight.lang.parser import (
    Assign,
    Attribute,
    BinOp,
    BoolOp,
    Call,
    Compare,
    Constant,
    ExprStmt,
    For,
    FunctionDef,
    If,
    Import,
    ListExpr,
    Module,
    Name,
    Pass,
    Return,
    Subscript,
    UnaryOp,
    parse,
)

SCALAR = "scalar"
OWN = "own"
OTHER = "other"


def _collect_writes(stmts, loop_var: str, writes: dict[str, set[str]]) -> None:
    for stmt in stmts:
        if isinstance(stmt, Assign):
            target = stmt.target
            if isinstance(target, Name):
                writes.setdefault(target.id, set()).add(SCALAR)
            elif isinstance(target, Subscript) and isinstance(target.value, Name):
                idx = target.index
                kind = OWN if isinstance(idx, Name) and idx.id == loop_var else OTHER
                writes.setdefault(target.value.id, set()).add(kind)
        elif isinstance(stmt, For):
            writes.setdefault(stmt.target, set()).add(SCALAR)
            _collect_writes(stmt.body, loop_var, writes)
        elif isinstance(stmt, If):
            _collect_writes(stmt.body, loop_var, writes)
            _collect_writes(stmt.orelse, loop_var, writes)
        elif isinstance(stmt, FunctionDef):
            writes.setdefault(stmt.name, set()).add(SCALAR)
        elif isinstance(stmt, Import):
            for name in stmt.names:
                writes.setdefault(name, set()).add(SCALAR)


class _LoopScan:
    def __init__(self, loop: For):
        self.loop_var = loop.target
        self.writes: dict[str, set[str]] = {}
        _collect_writes(loop.body, self.loop_var, self.writes)
        self.carried: set[str] = set()

    def read_name(self, name: str, defined: set[str]) -> None:
        if name in self.writes and name not in defined:
            self.carried.add(name)

    def read_expr(self, node, defined: set[str]) -> None:
        if isinstance(node, Name):
            self.read_name(node.id, defined)
        elif isinstance(node, Subscript):
            self.read_expr(node.index, defined)
            base = node.value
            if not isinstance(base, Name):
                self.read_expr(base, defined)
                return
            kinds = self.writes.get(base.id)
            if not kinds or base.id in defined:
                return
            own_index = isinstance(node.index, Name) and node.index.id == self.loop_var
            if own_index and kinds == {OWN}:
                return
            self.carried.add(base.id)
        elif isinstance(node, (BinOp,)):
            self.read_expr(node.left, defined)
            self.read_expr(node.right, defined)
        elif isinstance(node, UnaryOp):
            self.read_expr(node.operand, defined)
        elif isinstance(node, Compare):
            self.read_expr(node.left, defined)
            for c in node.comparators:
                self.read_expr(c, defined)
        elif isinstance(node, BoolOp):
            for v in node.values:
                self.read_expr(v, defined)
        elif isinstance(node, Call):
            self.read_expr(node.func, defined)
            for a in node.args:
                self.read_expr(a, defined)
        elif isinstance(node, Attribute):
            self.read_expr(node.value, defined)
        elif isinstance(node, ListExpr):
            for e in node.elts:
                self.read_expr(e, defined)
        elif isinstance(node, Constant) or node is None:
            return
        else:  # pragma: no cover - parser produces no other node types
            raise TypeError(f"unexpected expression node {node!r}")

    def block(self, stmts, defined: set[str]) -> set[str]:
        for stmt in stmts:
            defined = self.statement(stmt, defined)
        return defined

    def statement(self, stmt, defined: set[str]) -> set[str]:
        if isinstance(stmt, Assign):
            target = stmt.target
            self.read_expr(stmt.value, defined)
            if stmt.op != "=":
                self.read_expr(target, defined)
            elif isinstance(target, Subscript):
                self.read_expr(target.index, defined)
            if isinstance(target, Name):
                return defined | {target.id}
            return defined
        if isinstance(stmt, (ExprStmt, Return)):
            self.read_expr(stmt.value, defined)
            return defined
        if isinstance(stmt, If):
            self.read_expr(stmt.test, defined)
            then_defined = self.block(stmt.body, set(defined))
            else_defined = self.block(stmt.orelse, set(defined))
            return then_defined & else_defined
        if isinstance(stmt, For):
            self.read_expr(stmt.iter, defined)
            self.block(stmt.body, defined | {stmt.target})
            return defined
        if isinstance(stmt, FunctionDef):
            return defined | {stmt.name}
        if isinstance(stmt, Import):
            return defined | set(stmt.names)
        if isinstance(stmt, Pass):
            return defined
        raise TypeError(f"unexpected statement node {stmt!r}")  # pragma: no cover


def loop_carries_reuse(loop: For) -> set[str]:
    """Names carried across iterations of ``loop`` (empty set when the loop is independent)."""
    scan = _LoopScan(loop)
    scan.block(loop.body, {loop.target})
    return scan.carried


def iter_loops(stmts):
    for stmt in stmts:
        if isinstance(stmt, For):
            yield stmt
            yield from iter_loops(stmt.body)
        elif isinstance(stmt, If):
            yield from iter_loops(stmt.body)
            yield from iter_loops(stmt.orelse)
        elif isinstance(stmt, FunctionDef):
            yield from iter_loops(stmt.body)


def reuse_count(source_or_module) -> int:
    """Number of loops in the program that carry reuse across iterations."""
    module = source_or_module if isinstance(source_or_module, Module) else parse(source_or_module)
    return sum(1 for loop in iter_loops(module.body) if loop_carries_reuse(loop))
