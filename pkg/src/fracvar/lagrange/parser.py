"""Recursive-descent parser for Lagrangian expressions ``L(t, x, y)``.

Grammar (lowest precedence first)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' unary)?          # right-associative, above unary minus
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are ``t``, ``x1..xn``, ``y1..yn`` (plain ``x``/``y`` when n = 1), the
constant ``pi`` and the functions ``abs sin cos exp ln sqrt gamma``.
``-y^2`` therefore parses as ``-(y^2)`` and ``2^-1`` as ``2^(-1)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..errors import ParseError

FUNCTIONS = ("abs", "sin", "cos", "exp", "ln", "sqrt", "gamma")
CONSTANTS = {"pi": math.pi}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^(),]))"
)


@dataclass(frozen=True)
class Num:
    value: float
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    kind: str  # "t", "x" or "y"
    index: int  # 0-based component; 0 for t
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: object
    pos: int = field(default=0, compare=False)


@dataclass(frozen=True)
class LagrangianExpr:
    """Parsed expression together with its dimension and source text."""

    ast: object
    n: int
    source: str = ""

    def to_source(self) -> str:
        return to_source(self.ast)

    def depends_on_x(self) -> bool:
        return _uses(self.ast, "x")

    def depends_on_y(self) -> bool:
        return _uses(self.ast, "y")


def _uses(node, kind: str) -> bool:
    if isinstance(node, Var):
        return node.kind == kind
    if isinstance(node, Neg):
        return _uses(node.operand, kind)
    if isinstance(node, BinOp):
        return _uses(node.left, kind) or _uses(node.right, kind)
    if isinstance(node, Call):
        return _uses(node.arg, kind)
    return False


def is_constant(node) -> bool:
    """True when the subtree contains no variable (t included)."""
    if isinstance(node, Num):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return is_constant(node.operand)
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    return is_constant(node.arg)


class _Parser:
    def __init__(self, src: str, n: int):
        self.src = src
        self.n = n
        self.tokens = []
        self._lex()
        self.i = 0

    def _lex(self):
        pos = 0
        src = self.src
        while pos < len(src):
            if src[pos:].strip() == "":
                break
            m = _TOKEN.match(src, pos)
            if m is None or m.end() == pos:
                at = pos + len(src[pos:]) - len(src[pos:].lstrip())
                raise ParseError(f"unexpected character {src[at]!r}", self._byte(at),
                                 ("number", "name", "operator"), src)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(src)))

    def _byte(self, char_offset: int) -> int:
        return len(self.src[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, expected, tok=None):
        kind, text, pos = tok or self.peek()
        what = "end of input" if kind == "end" else f"{text!r}"
        raise ParseError(f"unexpected {what}", self._byte(pos), expected, self.src)

    def expect_op(self, op: str):
        tok = self.peek()
        if tok[0] != "op" or tok[1] != op:
            self.fail((op,))
        return self.advance()

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, pos = self.advance()
            node = BinOp(op, node, self.term(), pos)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.advance()
            node = BinOp(op, node, self.unary(), pos)
        return node

    def unary(self):
        kind, text, pos = self.peek()
        if kind == "op" and text in "+-":
            self.advance()
            operand = self.unary()
            return Neg(operand, pos) if text == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            _, _, pos = self.advance()
            return BinOp("^", base, self.unary(), pos)
        return base

    def atom(self):
        atom_start = ("number", "name", "(", "-", "+")
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text), self._byte(pos))
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "name":
            self.advance()
            if text in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(text, arg, self._byte(pos))
            return self.variable(text, pos)
        self.fail(atom_start)

    def variable(self, name: str, pos: int):
        off = self._byte(pos)
        if name in CONSTANTS:
            return Num(CONSTANTS[name], off)
        if name == "t":
            return Var("t", 0, off)
        if name in ("x", "y"):
            if self.n == 1:
                return Var(name, 0, off)
            raise ParseError(f"bare {name!r} is ambiguous for n = {self.n}; use {name}1..{name}{self.n}",
                             off, (f"{name}1",), self.src)
        m = re.fullmatch(r"([xy])([1-9]\d*)", name)
        if m:
            idx = int(m.group(2))
            if idx > self.n:
                raise ParseError(f"variable index exceeds dimension: {name} with n = {self.n}",
                                 off, (), self.src)
            return Var(m.group(1), idx - 1, off)
        raise ParseError(f"unknown identifier {name!r}", off,
                         ("t", "x1", "y1", "pi") + FUNCTIONS, self.src)


def parse_lagrangian(src: str, n: int) -> LagrangianExpr:
    """Parse ``src`` into a :class:`LagrangianExpr` of dimension ``n``."""
    if int(n) != n or n < 1:
        raise ValueError(f"dimension n must be a positive integer, got {n}")
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    ast = _Parser(src, int(n)).parse()
    return LagrangianExpr(ast, int(n), src)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node) -> str:
    """Fully parenthesized text that parses back to an equivalent tree."""
    if isinstance(node, Num):
        return repr(float(node.value)) if node.value >= 0 else f"({node.value!r})"
    if isinstance(node, Var):
        return "t" if node.kind == "t" else f"{node.kind}{node.index + 1}"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    return f"{node.func}({to_source(node.arg)})"


def combine(terms, n: int) -> LagrangianExpr:
    """Linear combination ``sum c_i * L_i`` as a new expression."""
    node = None
    for coef, expr in terms:
        if expr.n != n:
            raise ValueError("all terms must share the dimension")
        piece = BinOp("*", Num(float(coef)), expr.ast)
        node = piece if node is None else BinOp("+", node, piece)
    if node is None:
        node = Num(0.0)
    src = " + ".join(f"({float(c)!r})*({e.source or e.to_source()})" for c, e in terms) or "0"
    return LagrangianExpr(node, n, src)
