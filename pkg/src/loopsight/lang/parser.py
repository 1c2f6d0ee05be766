"""Recursive-descent parser for the restricted grammar.

    module     := stmt*
    stmt       := compound | simple NEWLINE
    compound   := def | if | for
    def        := 'def' NAME '(' [NAME (',' NAME)*] ')' ':' block
    if         := 'if' expr ':' block ('elif' expr ':' block)* ['else' ':' block]
    for        := 'for' NAME 'in' expr ':' block
    block      := NEWLINE INDENT stmt+ DEDENT
    simple     := import | from-import | 'return' [expr] | 'pass'
                | target ('=' | '+=' | '-=' | '*=' | ...) expr | expr
    target     := NAME | NAME '[' expr ']'
    expr       := or-test with the usual Python precedence down to atoms
    atom       := NAME | NUMBER | STRING | True | False | None
                | '(' expr ')' | '[' [expr (',' expr)*] ']'
    trailer    := '(' [expr (',' expr)*] ')' | '[' expr ']' | '.' NAME

Context rules checked beyond the grammar: ``return`` only inside a ``def``,
and no duplicate parameter names.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from loopsight.lang.lexer import LexError, Token, TokenKind, tokenize


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# --- expressions -----------------------------------------------------------


@dataclass
class Name:
    id: str


@dataclass
class Constant:
    text: str


@dataclass
class ListExpr:
    elts: list


@dataclass
class BinOp:
    op: str
    left: object
    right: object


@dataclass
class UnaryOp:
    op: str
    operand: object


@dataclass
class Compare:
    left: object
    ops: list[str]
    comparators: list


@dataclass
class BoolOp:
    op: str
    values: list


@dataclass
class Call:
    func: object
    args: list


@dataclass
class Subscript:
    value: object
    index: object


@dataclass
class Attribute:
    value: object
    attr: str


# --- statements ------------------------------------------------------------


@dataclass
class Import:
    names: list[str]
    module: str | None = None
    line: int = 0


@dataclass
class Assign:
    target: object  # Name | Subscript
    op: str  # "=" or an augmented operator such as "+="
    value: object
    line: int = 0


@dataclass
class ExprStmt:
    value: object
    line: int = 0


@dataclass
class Return:
    value: object | None
    line: int = 0


@dataclass
class Pass:
    line: int = 0


@dataclass
class FunctionDef:
    name: str
    params: list[str]
    body: list
    line: int = 0


@dataclass
class If:
    test: object
    body: list
    orelse: list = field(default_factory=list)
    line: int = 0


@dataclass
class For:
    target: str
    iter: object
    body: list
    line: int = 0


@dataclass
class Module:
    body: list


ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "//=", "%=", "**="})
COMPARE_OPS = frozenset({"==", "!=", "<", ">", "<=", ">="})


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.func_depth = 0

    # -- token helpers

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at(self, kind: TokenKind, text: str | None = None, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok is not None and tok.kind is kind and (text is None or tok.text == text)

    def at_op(self, *texts: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind in (TokenKind.OPERATOR, TokenKind.PUNCT) and tok.text in texts

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            return ParseError(message + " (unexpected end of input)", line, 1)
        return ParseError(message, tok.line, tok.col)

    def advance(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, kind: TokenKind, text: str | None = None) -> Token:
        if not self.at(kind, text):
            want = text if text is not None else kind.value
            got = self.peek()
            raise self.error(f"expected {want!r}, got {got.text if got else 'EOF'!r}")
        return self.advance()

    def expect_op(self, text: str) -> Token:
        if not self.at_op(text):
            got = self.peek()
            raise self.error(f"expected {text!r}, got {got.text if got else 'EOF'!r}")
        return self.advance()

    # -- statements

    def module(self) -> Module:
        body = []
        while self.peek() is not None:
            if self.at(TokenKind.INDENT):
                raise self.error("unexpected indent")
            body.append(self.statement())
        return Module(body)

    def statement(self):
        if self.at(TokenKind.KEYWORD, "def"):
            return self.funcdef()
        if self.at(TokenKind.KEYWORD, "if"):
            return self.if_stmt()
        if self.at(TokenKind.KEYWORD, "for"):
            return self.for_stmt()
        stmt = self.simple()
        self.expect(TokenKind.NEWLINE)
        return stmt

    def block(self) -> list:
        self.expect(TokenKind.NEWLINE)
        if not self.at(TokenKind.INDENT):
            raise self.error("expected an indented block")
        self.advance()
        body = [self.statement()]
        while not self.at(TokenKind.DEDENT):
            if self.peek() is None:
                raise self.error("missing dedent")
            if self.at(TokenKind.INDENT):
                raise self.error("unexpected indent")
            body.append(self.statement())
        self.advance()
        return body

    def funcdef(self) -> FunctionDef:
        line = self.advance().line
        name = self.expect(TokenKind.IDENTIFIER).text
        self.expect_op("(")
        params: list[str] = []
        if not self.at_op(")"):
            while True:
                tok = self.expect(TokenKind.IDENTIFIER)
                if tok.text in params:
                    raise ParseError(f"duplicate argument {tok.text!r} in function definition", tok.line, tok.col)
                params.append(tok.text)
                if not self.at_op(","):
                    break
                self.advance()
        self.expect_op(")")
        self.expect_op(":")
        self.func_depth += 1
        try:
            body = self.block()
        finally:
            self.func_depth -= 1
        return FunctionDef(name, params, body, line)

    def if_stmt(self) -> If:
        line = self.advance().line
        test = self.expr()
        self.expect_op(":")
        body = self.block()
        orelse: list = []
        if self.at(TokenKind.KEYWORD, "elif"):
            orelse = [self.if_stmt()]
        elif self.at(TokenKind.KEYWORD, "else"):
            self.advance()
            self.expect_op(":")
            orelse = self.block()
        return If(test, body, orelse, line)

    def for_stmt(self) -> For:
        line = self.advance().line
        target = self.expect(TokenKind.IDENTIFIER).text
        self.expect(TokenKind.KEYWORD, "in")
        iterable = self.expr()
        self.expect_op(":")
        body = self.block()
        return For(target, iterable, body, line)

    def simple(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expected a statement")
        line = tok.line
        if tok.kind is TokenKind.KEYWORD:
            if tok.text == "import":
                self.advance()
                return Import(self.name_list(), None, line)
            if tok.text == "from":
                self.advance()
                module = self.expect(TokenKind.IDENTIFIER).text
                self.expect(TokenKind.KEYWORD, "import")
                return Import(self.name_list(), module, line)
            if tok.text == "return":
                self.advance()
                if self.func_depth == 0:
                    raise ParseError("'return' outside function", tok.line, tok.col)
                value = None if self.at(TokenKind.NEWLINE) else self.expr()
                return Return(value, line)
            if tok.text == "pass":
                self.advance()
                return Pass(line)
        value = self.expr()
        if self.at(TokenKind.OPERATOR) and self.peek().text in ASSIGN_OPS:
            op_tok = self.advance()
            if not isinstance(value, (Name, Subscript)):
                raise ParseError("cannot assign to expression", op_tok.line, op_tok.col)
            if isinstance(value, Subscript) and not isinstance(value.value, Name):
                raise ParseError("unsupported assignment target", op_tok.line, op_tok.col)
            return Assign(value, op_tok.text, self.expr(), line)
        return ExprStmt(value, line)

    def name_list(self) -> list[str]:
        names = [self.expect(TokenKind.IDENTIFIER).text]
        while self.at_op(","):
            self.advance()
            names.append(self.expect(TokenKind.IDENTIFIER).text)
        return names

    # -- expressions

    def expr(self):
        return self.or_test()

    def or_test(self):
        values = [self.and_test()]
        while self.at(TokenKind.KEYWORD, "or"):
            self.advance()
            values.append(self.and_test())
        return values[0] if len(values) == 1 else BoolOp("or", values)

    def and_test(self):
        values = [self.not_test()]
        while self.at(TokenKind.KEYWORD, "and"):
            self.advance()
            values.append(self.not_test())
        return values[0] if len(values) == 1 else BoolOp("and", values)

    def not_test(self):
        if self.at(TokenKind.KEYWORD, "not"):
            self.advance()
            return UnaryOp("not", self.not_test())
        return self.comparison()

    def comparison(self):
        left = self.arith()
        ops, comparators = [], []
        while self.at(TokenKind.OPERATOR) and self.peek().text in COMPARE_OPS:
            ops.append(self.advance().text)
            comparators.append(self.arith())
        return Compare(left, ops, comparators) if ops else left

    def arith(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.at_op("*", "/", "//", "%"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.at_op("+", "-"):
            op = self.advance().text
            return UnaryOp(op, self.factor())
        return self.power()

    def power(self):
        node = self.atom_with_trailers()
        if self.at_op("**"):
            self.advance()
            node = BinOp("**", node, self.factor())
        return node

    def atom_with_trailers(self):
        node = self.atom()
        while True:
            if self.at_op("("):
                self.advance()
                node = Call(node, self.expr_list(")"))
                self.expect_op(")")
            elif self.at_op("["):
                self.advance()
                index = self.expr()
                self.expect_op("]")
                node = Subscript(node, index)
            elif self.at_op("."):
                self.advance()
                node = Attribute(node, self.expect(TokenKind.IDENTIFIER).text)
            else:
                return node

    def expr_list(self, closer: str) -> list:
        items = []
        if self.at_op(closer):
            return items
        items.append(self.expr())
        while self.at_op(","):
            self.advance()
            if self.at_op(closer):
                break
            items.append(self.expr())
        return items

    def atom(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expected an expression")
        if tok.kind is TokenKind.IDENTIFIER:
            self.advance()
            return Name(tok.text)
        if tok.kind in (TokenKind.NUMBER, TokenKind.STRING):
            self.advance()
            return Constant(tok.text)
        if tok.kind is TokenKind.KEYWORD and tok.text in ("True", "False", "None"):
            self.advance()
            return Constant(tok.text)
        if self.at_op("("):
            self.advance()
            inner = self.expr()
            self.expect_op(")")
            return inner
        if self.at_op("["):
            self.advance()
            elts = self.expr_list("]")
            self.expect_op("]")
            return ListExpr(elts)
        raise self.error(f"unexpected token {tok.text!r}")


def parse(source: str) -> Module:
    """Parse ``source``; raises :class:`LexError` or :class:`ParseError` on the first violation."""
    return _Parser(tokenize(source)).module()


@dataclass(frozen=True)
class CompileVerdict:
    ok: bool
    error: tuple[int, int, str] | None = None

    def __post_init__(self):
        if self.ok != (self.error is None):
            raise ValueError("ok must be True exactly when error is None")


def validate(source: str) -> CompileVerdict:
    """Report whether ``source`` is a well-formed program of the restricted grammar."""
    try:
        parse(source)
    except (LexError, ParseError) as exc:
        return CompileVerdict(False, (exc.line, exc.col, exc.message))
    return CompileVerdict(True)


def python_compiles(source: str) -> bool:
    """Compile check delegated to the running Python interpreter."""
    try:
        compile(source, "<generated>", "exec")
    except (SyntaxError, ValueError):
        return False
    return True
